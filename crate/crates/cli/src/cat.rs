use iontrap_core::states::{
    cat_identity_overlap, cat_state, coherent_state, fidelity, parity, wigner_grid, CatParams,
};
use iontrap_core::{FockBasis, C64};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::format::fmt_g;

#[derive(Debug, Clone, PartialEq)]
pub struct CatRequest {
    pub eta: f64,
    pub omega_l: f64,
    pub cutoff: usize,
    /// Amplitudes listed in the report.
    pub levels: usize,
}

pub fn cat_report(req: &CatRequest) -> CliResult<Value> {
    let basis = FockBasis::motional(req.cutoff)?;
    let recipe = CatParams::recipe(req.eta, req.omega_l)?;
    let overlap = cat_identity_overlap(req.eta, basis)?;
    let state = cat_state(req.eta, basis)?;
    let far = coherent_state(C64::new(0.0, req.eta), basis)?;
    let amps: Vec<Value> = state
        .amplitudes()
        .iter()
        .take(req.levels.min(req.cutoff))
        .enumerate()
        .map(|(n, a)| json!({"n": n, "re": a.re, "im": a.im}))
        .collect();
    Ok(json!({
        "eta": req.eta,
        "cutoff": req.cutoff,
        "recipe": {"omega_l": recipe.omega_l, "t": recipe.t},
        "identity_overlap": overlap,
        "parity": parity(&state),
        "fidelity_with_coherent": fidelity(&state, &far)?,
        "tail_mass": state.tail_mass(iontrap_core::states::TAIL_LEVELS),
        "amplitudes": amps,
    }))
}

/// `x,p,w` rows over a square grid of `points × points` on `[−radius, radius]²`.
pub fn wigner_csv(req: &CatRequest, radius: f64, points: usize) -> CliResult<Vec<u8>> {
    if !(radius > 0.0) || !radius.is_finite() || points < 2 {
        return Err(CliError::usage("wigner grid needs radius > 0 and at least 2 points"));
    }
    let basis = FockBasis::motional(req.cutoff)?;
    let state = cat_state(req.eta, basis)?;
    let axis: Vec<f64> = (0..points)
        .map(|i| -radius + 2.0 * radius * i as f64 / (points - 1) as f64)
        .collect();
    let w = wigner_grid(&state, &axis, &axis)?;
    let mut out = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let io = |e: csv::Error| CliError::usage(format!("csv: {e}"));
    out.write_record(["x", "p", "w"]).map_err(io)?;
    for (i, x) in axis.iter().enumerate() {
        for (j, p) in axis.iter().enumerate() {
            out.write_record([fmt_g(*x), fmt_g(*p), fmt_g(w[i][j])]).map_err(io)?;
        }
    }
    out.into_inner().map_err(|e| CliError::usage(format!("csv: {e}")))
}
