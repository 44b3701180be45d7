//! Coherent-state (Bargmann) series solutions of the transformed Hamiltonian.
//!
//! Each spin component of an eigenfunction is written `e^{−zα} Σ bₙαⁿ` (upper
//! level) and `e^{−zα} Σ cₙαⁿ` (lower level). Substitution gives a pair of
//! three-term recurrences for `bₙ`, `cₙ`. With `z = ±g` and `E = N ± ε` the
//! series terminates after order `N` exactly when
//! `b_{N+1} = c_{N+1} = 0` and `c_N = ±b_N`; those conditions hold only on a
//! constraint manifold in `(Ω, η, ε)`, which is what the closed forms and the
//! general solver locate.

mod closed_form;
mod fock;
mod general;
mod recurrence;
mod special;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::model::ModelParams;

pub use closed_form::{
    case1_closed_form, case1_implied_eps, case2_closed_form, case2_constraint_residual,
    case2_energies, case2_quadratic, energy_identity_case1, Case2Energies, QuadraticCoeffs,
};
pub use fock::{series_to_fock, series_to_fock_unchecked};
pub use general::{
    terminate_general, GeneralSolution, Pin, SolverOptions, TerminationGuess,
};
pub use recurrence::{matching_c0, recurrence_coefficients, termination_residual};
pub use special::{special_case_small_eta, LinearPair, SpecialCaseSolution};

/// Default acceptance bound on the termination residual.
pub const TERMINATION_TOL: f64 = 1e-10;

/// Sign choice `z = ±g`, `E = N ± ε`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Branch::Plus => "+",
            Branch::Minus => "-",
        }
    }

    pub const BOTH: [Branch; 2] = [Branch::Plus, Branch::Minus];
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Branch {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "+" | "plus" | "p" => Ok(Branch::Plus),
            "-" | "minus" | "m" => Ok(Branch::Minus),
            other => Err(format!("unknown branch `{other}` (expected + or -)")),
        }
    }
}

/// Polynomial coefficients generated by the recurrences, with `b₀ = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesCoefficients {
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub z: f64,
    pub energy: f64,
}

/// A terminated series eigensolution of order `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesSolution {
    pub order: usize,
    pub branch: Branch,
    pub params: ModelParams,
    /// `N + branch·ε`.
    pub energy: f64,
    /// Coefficients through index `N + 1`.
    pub coeffs: SeriesCoefficients,
    pub termination_residual: f64,
}

impl SeriesSolution {
    pub fn eps(&self) -> f64 {
        self.params.eps()
    }

    pub fn g(&self) -> f64 {
        self.params.g()
    }

    pub fn rabi(&self) -> f64 {
        self.params.rabi
    }
}

/// Builds a solution record from parameters on the constraint manifold,
/// regenerating the coefficients through the recurrences.
pub(crate) fn assemble(
    order: usize,
    branch: Branch,
    params: ModelParams,
    c0: f64,
) -> crate::Result<SeriesSolution> {
    let s = branch.sign();
    let energy = order as f64 + s * params.eps();
    let z = s * params.g();
    let coeffs = recurrence_coefficients(energy, z, &params, (order + 1).max(2), c0)?;
    let termination_residual = termination_residual(&coeffs, order, branch);
    Ok(SeriesSolution {
        order,
        branch,
        params,
        energy,
        coeffs,
        termination_residual,
    })
}
