use iontrap_core::oracle::{validate_series_solution, ValidationReport};
use iontrap_core::series::{
    case1_closed_form, case2_closed_form, case2_constraint_residual, terminate_general,
    GeneralSolution, Pin, SolverOptions, TerminationGuess,
};
use iontrap_core::{Branch, FockBasis, SeriesSolution};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct SolveRequest {
    pub order: usize,
    pub eta: f64,
    pub branches: Vec<Branch>,
    pub rabi: Option<f64>,
    /// Transformed-frame detuning `ε = −Δ/2`.
    pub eps: Option<f64>,
    pub guess: Option<TerminationGuess>,
    pub cutoff: usize,
}

#[derive(Debug, Clone)]
pub struct Solved {
    pub solution: SeriesSolution,
    pub method: &'static str,
    pub solver: Option<GeneralSolution>,
    pub report: ValidationReport,
}

/// Closed form when one exists for the request (order one with a fixed
/// detuning, order two with a fixed Ω), else the numerical solver with any
/// given Ω or ε held fixed.
pub fn solve(req: &SolveRequest) -> CliResult<Vec<Solved>> {
    if req.order == 0 {
        return Err(CliError::usage("order must be at least 1"));
    }
    if req.branches.is_empty() {
        return Err(CliError::usage("no branches selected"));
    }
    let basis = FockBasis::with_spin(req.cutoff)?;
    let validated = |solution: SeriesSolution, method, solver| -> CliResult<Solved> {
        let report = validate_series_solution(&solution, basis)?;
        Ok(Solved {
            solution,
            method,
            solver,
            report,
        })
    };

    match (req.order, req.rabi, req.eps) {
        (1, None, Some(eps)) => req
            .branches
            .iter()
            .map(|&b| validated(case1_closed_form(req.eta, eps, b)?, "closed_form", None))
            .collect(),
        (2, Some(rabi), None) => case2_closed_form(rabi, req.eta)?
            .into_iter()
            .filter(|s| req.branches.contains(&s.branch))
            .map(|s| validated(s, "closed_form", None))
            .collect(),
        (_, rabi, eps) => {
            let pin = match (rabi, eps) {
                (Some(_), Some(_)) => {
                    return Err(CliError::usage(
                        "give at most one of omega and detuning for the numerical solver",
                    ))
                }
                (Some(r), None) => Pin::Rabi(r),
                (None, Some(e)) => Pin::Eps(e),
                (None, None) => Pin::Free,
            };
            let opts = SolverOptions {
                pin,
                oracle_cutoff: Some(req.cutoff),
                ..SolverOptions::default()
            };
            let guess = req.guess.or_else(|| {
                rabi.or(eps).map(|_| TerminationGuess {
                    rabi: rabi.unwrap_or(1.0),
                    eps: eps.unwrap_or(0.0),
                    c0: None,
                })
            });
            req.branches
                .iter()
                .map(|&b| {
                    let found = terminate_general(req.order, b, req.eta, guess, &opts)?;
                    validated(found.solution.clone(), "numerical", Some(found))
                })
                .collect()
        }
    }
}

pub fn report_json(r: &ValidationReport) -> Value {
    json!({
        "verdict": r.verdict,
        "passed": r.passed(),
        "eigen_gap": r.eigen_gap,
        "residual": r.residual,
        "overlap": r.overlap,
        "nearest_eigenvalue": r.nearest_eigenvalue,
    })
}

pub fn solution_json(s: &Solved) -> Value {
    let sol = &s.solution;
    let p = &sol.params;
    let constraint = (sol.order == 2)
        .then(|| case2_constraint_residual(p.rabi, p.lamb_dicke, sol.eps(), sol.branch).ok())
        .flatten();
    let mut v = json!({
        "order": sol.order,
        "branch": sol.branch,
        "method": s.method,
        "omega": p.rabi,
        "eta": p.lamb_dicke,
        "detuning": p.detuning,
        "eps": sol.eps(),
        "g": sol.g(),
        "energy": sol.energy,
        "z": sol.coeffs.z,
        "b": sol.coeffs.b,
        "c": sol.coeffs.c,
        "termination_residual": sol.termination_residual,
        "constraint_residual": constraint,
        "oracle": report_json(&s.report),
    });
    if let Some(g) = &s.solver {
        v["solver"] = json!({
            "iterations": g.iterations,
            "seed": g.seed,
            "jacobian_rank": g.jacobian_rank,
            "singular_values": g.singular_values,
            "oracle_eigenvalue": g.oracle_eigenvalue,
        });
    }
    v
}

pub fn solutions_json(req: &SolveRequest, solved: &[Solved]) -> Value {
    json!({
        "order": req.order,
        "eta": req.eta,
        "cutoff": req.cutoff,
        "solutions": solved.iter().map(solution_json).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn req(order: usize, eta: f64) -> SolveRequest {
        SolveRequest {
            order,
            eta,
            branches: vec![Branch::Plus],
            rabi: None,
            eps: None,
            guess: None,
            cutoff: 100,
        }
    }

    #[test]
    fn order_one_closed_form() {
        let r = SolveRequest {
            eps: Some(0.0),
            ..req(1, 0.2)
        };
        let s = solve(&r).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s[0].solution.rabi() - 1.959_591_8).abs() < 1e-6);
        assert_eq!(s[0].solution.energy, 1.0);
        assert!(s[0].report.passed());
    }

    #[test]
    fn order_two_closed_form() {
        let r = SolveRequest {
            rabi: Some(0.5),
            branches: Branch::BOTH.to_vec(),
            ..req(2, 0.1)
        };
        let s = solve(&r).unwrap();
        assert_eq!(s.len(), 4);
        for x in &s {
            let v = solution_json(x);
            assert!(v["constraint_residual"].as_f64().unwrap() < 1e-9);
        }
    }

    #[test]
    fn infeasible_is_usage_error() {
        let r = SolveRequest {
            eps: Some(0.6),
            branches: vec![Branch::Minus],
            ..req(1, 0.2)
        };
        assert_eq!(solve(&r).unwrap_err().code, crate::error::EXIT_USAGE);
    }

    #[test]
    fn over_pinned() {
        let r = SolveRequest {
            rabi: Some(1.0),
            eps: Some(0.1),
            ..req(3, 0.3)
        };
        assert_eq!(solve(&r).unwrap_err().code, crate::error::EXIT_USAGE);
    }
}
