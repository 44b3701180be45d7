use iontrap_core::model::{build_h_lab, build_h_transformed};
use iontrap_core::oracle::{cutoff_convergence, hermitian_eigensystem, nearest_eigenpair};
use iontrap_core::{FockBasis, ModelParams};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleRequest {
    pub params: ModelParams,
    pub cutoff: usize,
    pub count: usize,
    pub target: Option<f64>,
    /// Cutoffs for a convergence scan around `target`.
    pub cutoffs: Vec<usize>,
    /// Diagonalize the lab-frame Hamiltonian instead of the transformed one.
    pub lab: bool,
}

pub fn oracle_report(req: &OracleRequest) -> CliResult<Value> {
    let basis = FockBasis::with_spin(req.cutoff)?;
    let h = if req.lab {
        build_h_lab(&req.params, basis)?
    } else {
        build_h_transformed(&req.params, basis)?
    };
    let spectrum = hermitian_eigensystem(&h, false)?;
    let interior = spectrum.interior();
    let shown = &interior[..req.count.min(interior.len())];
    let mut v = json!({
        "omega": req.params.rabi,
        "eta": req.params.lamb_dicke,
        "detuning": req.params.detuning,
        "eps": req.params.eps(),
        "frame": if req.lab { "lab" } else { "transformed" },
        "cutoff": req.cutoff,
        "eigenvalues": shown,
    });
    if let Some(target) = req.target {
        let pair = nearest_eigenpair(&spectrum, target)?;
        v["nearest"] = json!({
            "target": target,
            "eigenvalue": pair.value,
            "index": pair.index,
            "distance": (pair.value - target).abs(),
            "gap_to_next": pair.gap_to_next,
        });
        if !req.cutoffs.is_empty() {
            v["convergence"] = serde_json::to_value(cutoff_convergence(&req.params, target, &req.cutoffs)?)
                .map_err(|e| CliError::usage(e.to_string()))?;
        }
    } else if !req.cutoffs.is_empty() {
        return Err(CliError::usage("a convergence scan needs --target"));
    }
    Ok(v)
}
