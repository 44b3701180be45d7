//! Numerical termination at arbitrary order.
//!
//! Unknowns are `(Ω, ε, c₀)` at fixed `η`; the residual is
//! `(b_{N+1}, c_{N+1}, c_N ∓ b_N)`. Once `c_N = ±b_N` holds, the recurrences
//! force `b_{N+1} = −c_{N+1}`, so the system has rank two and its solutions
//! form a curve. The solver is Levenberg-Marquardt with a central-difference
//! Jacobian; pinning `Ω` or `ε` selects a single point on the curve.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::model::{build_h_transformed, FockBasis, ModelParams, DEFAULT_CUTOFF};
use crate::oracle::{hermitian_eigensystem, nearest_eigenpair, ENERGY_TOL};

use super::recurrence::{residual_vector, run};
use super::{assemble, matching_c0, Branch, SeriesSolution, TERMINATION_TOL};

/// Which unknown, if any, is held fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Pin {
    Free,
    Rabi(f64),
    Eps(f64),
}

/// Starting point. A missing `c0` is filled in by solving `c_N = ±b_N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TerminationGuess {
    pub rabi: f64,
    pub eps: f64,
    pub c0: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub pin: Pin,
    pub max_iterations: usize,
    pub residual_tol: f64,
    pub step_tol: f64,
    /// Cutoff for the oracle check of each converged seed; `None` skips it.
    pub oracle_cutoff: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            pin: Pin::Free,
            max_iterations: 200,
            residual_tol: TERMINATION_TOL,
            step_tol: 1e-12,
            oracle_cutoff: Some(DEFAULT_CUTOFF),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GeneralSolution {
    pub solution: SeriesSolution,
    pub iterations: usize,
    /// Numerical rank of the residual Jacobian at the solution.
    pub jacobian_rank: usize,
    pub singular_values: Vec<f64>,
    /// Index of the seed that converged.
    pub seed: usize,
    pub oracle_eigenvalue: Option<f64>,
}

struct Problem {
    order: usize,
    sign: f64,
    g: f64,
    pin: Pin,
}

impl Problem {
    /// Expands the free unknowns into `(Ω, ε, c₀)`.
    fn full(&self, u: &[f64]) -> (f64, f64, f64) {
        match self.pin {
            Pin::Free => (u[0], u[1], u[2]),
            Pin::Rabi(rabi) => (rabi, u[0], u[1]),
            Pin::Eps(eps) => (u[0], eps, u[1]),
        }
    }

    fn pack(&self, rabi: f64, eps: f64, c0: f64) -> Vec<f64> {
        match self.pin {
            Pin::Free => vec![rabi, eps, c0],
            Pin::Rabi(_) => vec![eps, c0],
            Pin::Eps(_) => vec![rabi, c0],
        }
    }

    fn residual(&self, u: &[f64]) -> DVector<f64> {
        let (rabi, eps, c0) = self.full(u);
        let energy = self.order as f64 + self.sign * eps;
        let (b, c) = run(energy, self.sign * self.g, rabi, self.g, eps, self.order + 1, c0);
        DVector::from_row_slice(&residual_vector(&b, &c, self.order, self.sign))
    }

    fn jacobian(&self, u: &[f64]) -> DMatrix<f64> {
        let k = u.len();
        let mut jac = DMatrix::zeros(3, k);
        for i in 0..k {
            let h = 1e-7 * u[i].abs().max(1.0);
            let mut up = u.to_vec();
            let mut down = u.to_vec();
            up[i] += h;
            down[i] -= h;
            let col = (self.residual(&up) - self.residual(&down)) / (2.0 * h);
            jac.set_column(i, &col);
        }
        jac
    }

    fn admissible(&self, u: &[f64]) -> bool {
        let (rabi, eps, c0) = self.full(u);
        rabi >= 0.0 && rabi.is_finite() && eps.is_finite() && c0.is_finite()
    }
}

fn max_abs(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

struct Run {
    u: Vec<f64>,
    residual: f64,
    iterations: usize,
    trace: Vec<f64>,
}

fn levenberg_marquardt(problem: &Problem, start: Vec<f64>, opts: &SolverOptions) -> Run {
    let mut u = start;
    let mut r = problem.residual(&u);
    let mut trace = vec![max_abs(&r)];
    let mut lambda = 1e-3;
    let mut iterations = 0;

    while iterations < opts.max_iterations {
        if !(max_abs(&r) > 1e-15) {
            break;
        }
        iterations += 1;
        let jac = problem.jacobian(&u);
        let jtj = jac.transpose() * &jac;
        let grad = jac.transpose() * &r;
        let scale = jtj.diagonal().iter().fold(0.0_f64, |m, x| m.max(*x)).max(1e-300);

        let mut accepted = None;
        while lambda < 1e14 {
            let mut lhs = jtj.clone();
            for i in 0..lhs.nrows() {
                lhs[(i, i)] += lambda * (jtj[(i, i)] + 1e-12 * scale);
            }
            let Some(step) = lhs.lu().solve(&(-&grad)) else {
                lambda *= 4.0;
                continue;
            };
            let trial: Vec<f64> = u.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            if problem.admissible(&trial) {
                let r_trial = problem.residual(&trial);
                if r_trial.iter().all(|x| x.is_finite()) && r_trial.norm() < r.norm() {
                    lambda = (lambda / 3.0).max(1e-15);
                    accepted = Some((trial, r_trial, max_abs(&step)));
                    break;
                }
            }
            lambda *= 4.0;
        }
        let Some((trial, r_trial, step)) = accepted else {
            break;
        };
        u = trial;
        r = r_trial;
        trace.push(max_abs(&r));
        if step < opts.step_tol && max_abs(&r) < opts.residual_tol {
            break;
        }
    }
    Run {
        residual: max_abs(&r),
        u,
        iterations,
        trace,
    }
}

fn seeds(problem: &Problem, guess: Option<TerminationGuess>) -> Vec<(f64, f64, Option<f64>)> {
    let base: Vec<(f64, f64, Option<f64>)> = match guess {
        Some(TerminationGuess { rabi, eps, c0 }) => vec![
            (rabi, eps, c0),
            (rabi, eps, None),
            (rabi * 1.1, eps, None),
            (rabi * 0.9, eps, None),
            (rabi, eps + 0.1, None),
            (rabi, eps - 0.1, None),
            (rabi * 1.25, eps + 0.25, None),
            (rabi * 0.75, eps - 0.25, None),
        ],
        None => {
            let s = problem.sign;
            [0.5, 1.0, 2.0, 3.0]
                .iter()
                .flat_map(|&o| [(o, -0.5 * s, None), (o, 0.5 * s, None)])
                .collect()
        }
    };
    base.into_iter()
        .map(|(rabi, eps, c0)| match problem.pin {
            Pin::Free => (rabi, eps, c0),
            Pin::Rabi(r) => (r, eps, c0),
            Pin::Eps(e) => (rabi, e, c0),
        })
        .collect()
}

/// Finds `(Ω, ε, c₀)` terminating the series at `order` on `branch`.
///
/// Seeds are tried in order; the first one whose converged point passes the
/// oracle check (when enabled) is returned. Failure means no seed converged,
/// not that no solution exists.
pub fn terminate_general(
    order: usize,
    branch: Branch,
    eta: f64,
    guess: Option<TerminationGuess>,
    opts: &SolverOptions,
) -> Result<GeneralSolution> {
    if order < 1 {
        return Err(invalid("order", "must be at least 1"));
    }
    if !eta.is_finite() || eta < 0.0 {
        return Err(invalid("eta", format!("must be finite and >= 0, got {eta}")));
    }
    if eta == 0.0 {
        return Err(Error::SingularRecurrence);
    }
    if let Some(g) = guess {
        if g.rabi < 0.0 {
            return Err(Error::OutOfDomain { rabi: g.rabi });
        }
    }
    if let Pin::Rabi(r) = opts.pin {
        if r < 0.0 {
            return Err(Error::OutOfDomain { rabi: r });
        }
    }

    let problem = Problem {
        order,
        sign: branch.sign(),
        g: eta / 2.0,
        pin: opts.pin,
    };
    let mut total_iterations = 0;
    let mut best: Option<Run> = None;

    for (seed, (rabi, eps, c0)) in seeds(&problem, guess).into_iter().enumerate() {
        let c0 = match c0 {
            Some(c0) => c0,
            None => {
                let params = ModelParams::from_eps(rabi.max(0.0), eta, eps)?;
                matching_c0(&params, order, branch).unwrap_or(0.0)
            }
        };
        let run = levenberg_marquardt(&problem, problem.pack(rabi, eps, c0), opts);
        total_iterations += run.iterations;

        if run.residual < opts.residual_tol {
            let (rabi, eps, c0) = problem.full(&run.u);
            if rabi < 0.0 {
                return Err(Error::OutOfDomain { rabi });
            }
            let params = ModelParams::from_eps(rabi, eta, eps)?;
            let solution = assemble(order, branch, params, c0)?;
            let oracle_eigenvalue = match opts.oracle_cutoff {
                Some(cutoff) => {
                    let h = build_h_transformed(&params, FockBasis::with_spin(cutoff)?)?;
                    let spectrum = hermitian_eigensystem(&h, false)?;
                    let value = nearest_eigenpair(&spectrum, solution.energy)?.value;
                    if (value - solution.energy).abs() >= ENERGY_TOL {
                        continue;
                    }
                    Some(value)
                }
                None => None,
            };
            let jac = problem.jacobian(&run.u);
            let singular_values: Vec<f64> =
                jac.singular_values().iter().copied().collect::<Vec<_>>();
            let top = singular_values.iter().fold(0.0_f64, |m, x| m.max(*x));
            let jacobian_rank = singular_values.iter().filter(|&&s| s > 1e-6 * top).count();
            return Ok(GeneralSolution {
                solution,
                iterations: run.iterations,
                jacobian_rank,
                singular_values,
                seed,
                oracle_eigenvalue,
            });
        }
        if best.as_ref().is_none_or(|b| run.residual < b.residual) {
            best = Some(run);
        }
    }

    let best = best.expect("at least one seed");
    Err(Error::NoSolutionFound {
        iterations: total_iterations,
        residual: best.residual,
        trace: best.trace,
    })
}
