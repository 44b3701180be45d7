//! Closed-form terminated solutions of orders one and two.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::model::ModelParams;

use super::{assemble, Branch, SeriesSolution};

const POLE_TOL: f64 = 1e-14;
const CASE2_TOL: f64 = 1e-9;

fn check_eta(eta: f64) -> Result<()> {
    if !eta.is_finite() || eta < 0.0 {
        return Err(invalid("eta", format!("must be finite and >= 0, got {eta}")));
    }
    if eta == 0.0 {
        return Err(Error::SingularRecurrence);
    }
    Ok(())
}

/// Order-one solution: `E = 1 ± ε`, `z = ±g`, on the restricted relation
/// `Ω = 2√(1 ± 2ε − 4g²)`.
pub fn case1_closed_form(eta: f64, eps: f64, branch: Branch) -> Result<SeriesSolution> {
    check_eta(eta)?;
    if !eps.is_finite() {
        return Err(invalid("eps", "must be finite"));
    }
    let s = branch.sign();
    let g2 = eta * eta / 4.0;
    let radicand = 1.0 + 2.0 * s * eps - 4.0 * g2;
    if radicand < 0.0 {
        return Err(Error::ConstraintInfeasible { radicand });
    }
    let rabi = 2.0 * radicand.sqrt();
    let half = rabi / 2.0;
    // c₀ = ±(1 − Ω/2 ± 2ε − 2g²)/(1 + Ω/2 ± 2ε − 2g²); the denominator equals
    // Ω²/4 + Ω/2 + 2g² on the constraint and stays positive for η > 0.
    let c0 = s * (1.0 - half + 2.0 * s * eps - 2.0 * g2) / (1.0 + half + 2.0 * s * eps - 2.0 * g2);
    let params = ModelParams::from_eps(rabi, eta, eps)?;
    assemble(1, branch, params, c0)
}

/// The order-one energy expressed through `(Ω, η)` alone:
/// `E = 1/2 + η²/2 + Ω²/8`, shared by both branches.
pub fn energy_identity_case1(rabi: f64, eta: f64) -> f64 {
    0.5 + eta * eta / 2.0 + rabi * rabi / 8.0
}

/// Detuning `ε` at which `(Ω, η)` lies on the order-one constraint of the
/// given branch.
pub fn case1_implied_eps(rabi: f64, eta: f64, branch: Branch) -> f64 {
    branch.sign() * (rabi * rabi / 8.0 - 0.5 + eta * eta / 2.0)
}

/// Coefficients of the order-two constraint written as a quadratic.
///
/// With `X = ε − g²` (branch +) the constraint is `AX² + BX + C = 0`; with
/// `Y = ε + g²` (branch −) it is `AY² − BY + C = 0`. The coefficients follow
/// from eliminating `c₀` between `c₂ = ±b₂` and `b₃ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub discriminant: f64,
}

pub fn case2_quadratic(rabi: f64, eta: f64) -> QuadraticCoeffs {
    let g2 = eta * eta / 4.0;
    let o2 = rabi * rabi;
    let a = 8.0;
    let b = 12.0 - 16.0 * g2 - 1.5 * o2;
    let c = o2 * o2 / 16.0 - 1.25 * o2 + 4.0 + 1.5 * o2 * g2 - 20.0 * g2 + 8.0 * g2 * g2;
    QuadraticCoeffs {
        a,
        b,
        c,
        discriminant: b * b - 4.0 * a * c,
    }
}

/// Order-two energies: `plus` from the `X` roots (`E = 2 + g² + X`),
/// `minus` from the `Y` roots (`E = 2 + g² − Y`). Each list holds the `+√`
/// root first and is empty when the discriminant is negative.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Case2Energies {
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
}

pub fn case2_energies(rabi: f64, eta: f64) -> Case2Energies {
    let q = case2_quadratic(rabi, eta);
    if q.discriminant < 0.0 {
        return Case2Energies {
            plus: Vec::new(),
            minus: Vec::new(),
        };
    }
    let g2 = eta * eta / 4.0;
    let root = q.discriminant.sqrt();
    let plus = [root, -root]
        .iter()
        .map(|r| 2.0 + g2 + (-q.b + r) / (2.0 * q.a))
        .collect();
    let minus = [root, -root]
        .iter()
        .map(|r| 2.0 + g2 - (q.b + r) / (2.0 * q.a))
        .collect();
    Case2Energies { plus, minus }
}

/// Roots of the branch's quadratic, translated to `ε`.
fn case2_eps_roots(rabi: f64, eta: f64, branch: Branch) -> Vec<f64> {
    let q = case2_quadratic(rabi, eta);
    if q.discriminant < 0.0 {
        return Vec::new();
    }
    let g2 = eta * eta / 4.0;
    let root = q.discriminant.sqrt();
    [root, -root]
        .iter()
        .map(|r| match branch {
            Branch::Plus => (-q.b + r) / (2.0 * q.a) + g2,
            Branch::Minus => (q.b + r) / (2.0 * q.a) - g2,
        })
        .collect()
}

/// All order-two solutions at `(Ω, η)`: for each branch, one per real root.
/// An empty list means the constraint has no real solution here.
pub fn case2_closed_form(rabi: f64, eta: f64) -> Result<Vec<SeriesSolution>> {
    check_eta(eta)?;
    if !rabi.is_finite() || rabi < 0.0 {
        return Err(invalid("rabi", format!("must be finite and >= 0, got {rabi}")));
    }
    let g2 = eta * eta / 4.0;
    let mut out = Vec::new();
    for branch in Branch::BOTH {
        let s = branch.sign();
        for eps in case2_eps_roots(rabi, eta, branch) {
            let w = g2 - s * eps;
            let p = 1.0 - 2.0 * w;
            let num = p * (2.0 - rabi / 2.0 - 2.0 * w) + rabi - rabi * rabi / 4.0 - 2.0 * g2;
            let den = p * (2.0 + rabi / 2.0 - 2.0 * w) - rabi - rabi * rabi / 4.0 - 2.0 * g2;
            let c0 = s * num / den;
            if !c0.is_finite() {
                continue;
            }
            let params = ModelParams::from_eps(rabi, eta, eps)?;
            let sol = assemble(2, branch, params, c0)?;
            let constraint = case2_constraint_residual(rabi, eta, eps, branch);
            if sol.termination_residual < CASE2_TOL
                && matches!(constraint, Ok(r) if r < CASE2_TOL)
            {
                out.push(sol);
            }
        }
    }
    Ok(out)
}

/// `|LHS − RHS|` of the order-two restricted condition, both sides kept as
/// rational functions of `w = g² ∓ ε`.
///
/// The left side is `±1/c₀` from `c₂ = ±b₂`; the right side is `±1/c₀` from
/// `b₃ = 0`. They coincide exactly on the constraint manifold.
pub fn case2_constraint_residual(rabi: f64, eta: f64, eps: f64, branch: Branch) -> Result<f64> {
    let o = rabi;
    let g2 = eta * eta / 4.0;
    let w = g2 - branch.sign() * eps;
    let p = 1.0 - 2.0 * w;

    let lhs_num = 2.0 * g2 - p * (2.0 + o / 2.0 - 2.0 * w) + o + o * o / 4.0;
    let lhs_den = 2.0 * g2 - p * (2.0 - o / 2.0 - 2.0 * w) - o + o * o / 4.0;

    let rhs_num = o.powi(3) + 2.0 * o * o - 2.0 * o * o * w + 12.0 * g2 * o
        - 16.0 * o * w * w
        + 8.0 * o * w
        - 8.0 * o
        + 32.0 * w.powi(3)
        - 48.0 * w * w
        + 16.0 * w
        - 48.0 * g2 * w
        + 32.0 * g2;
    let rhs_den = 2.0
        * (16.0 * w.powi(3) - 24.0 * w * w + 8.0 * w - 3.0 * o * o * w + 8.0 * o * w
            - 2.0 * g2 * o
            - 24.0 * g2 * w
            + 16.0 * g2);

    if lhs_den.abs() < POLE_TOL {
        return Err(Error::Pole {
            location: "left-hand side",
            value: lhs_den,
        });
    }
    if rhs_den.abs() < POLE_TOL {
        return Err(Error::Pole {
            location: "right-hand side",
            value: rhs_den,
        });
    }
    Ok((lhs_num / lhs_den - rhs_num / rhs_den).abs())
}
