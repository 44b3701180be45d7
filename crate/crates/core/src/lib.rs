//! Trapped-ion spectra beyond the rotating-wave approximation.
//!
//! A single two-level ion in a harmonic trap driven by a laser,
//! `H = (Δ/2)σ_z + a†a + (Ω/2)(σ₊e^{iηx̂} + h.c.)` in units of the trap
//! frequency, is mapped by a unitary onto
//! `H^I = (Ω/2)σ_z + a†a + g(a†+a)σ_x + εσ_x + g²` with `g = η/2`,
//! `ε = −Δ/2`. The crate provides
//!
//! - [`model`]: parameters, truncated bases and both Hamiltonians;
//! - [`series`]: terminating coherent-state series solutions of `H^I`;
//! - [`rwa`]: rotating-wave reference spectra;
//! - [`oracle`]: dense diagonalization used to check everything else;
//! - [`states`]: coherent, displaced and cat states with fidelity, parity
//!   and Wigner diagnostics.

// `!(x < tol)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod rwa;
pub mod series;
pub mod states;

pub type C64 = num_complex::Complex64;

pub use error::{Error, Result};
pub use model::{
    build_h_lab, build_h_transformed, derive_params, displacement_matrix, transform_uv,
    DerivedParams, FockBasis, ModelParams, OperatorMatrix, Spin, DEFAULT_CUTOFF,
};
pub use oracle::{
    cutoff_convergence, hermitian_eigensystem, nearest_eigenpair, validate_series_solution,
    ConvergenceReport, EigenPair, Spectrum, ValidationReport, Verdict,
};
pub use rwa::{rwa_energy, rwa_hamiltonian, rwa_resonant_rabi, RwaQuery, RwaScheme};
pub use series::{
    case1_closed_form, case2_closed_form, recurrence_coefficients, special_case_small_eta,
    terminate_general, Branch, SeriesCoefficients, SeriesSolution,
};
pub use states::{cat_state, coherent_state, fidelity, parity, wigner_grid, CatParams, StateVector};
