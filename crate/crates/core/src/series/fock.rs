use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::displace_vector;
use crate::model::{build_h_transformed, FockBasis, Spin};
use crate::oracle::RESIDUAL_TOL;
use crate::states::StateVector;
use crate::C64;

use super::SeriesSolution;

/// Fock image of `e^{−zα} Σₙ pₙαⁿ`: re-expand in powers of `(α+z)`, send
/// `(α+z)^m ↦ √m!|m⟩`, then displace by `−z`. Unnormalized.
fn component(poly: &[f64], z: f64, cutoff: usize) -> DVector<C64> {
    let mut shifted = vec![0.0; poly.len()];
    for (n, &p) in poly.iter().enumerate() {
        // (α+z−z)^n = Σ_m C(n,m) (−z)^{n−m} (α+z)^m
        let mut binom = 1.0;
        for m in (0..=n).rev() {
            shifted[m] += p * binom * (-z).powi((n - m) as i32);
            // C(n, m−1) = C(n, m)·m/(n−m+1)
            binom *= m as f64 / (n - m + 1) as f64;
        }
    }
    let mut v = DVector::zeros(cutoff);
    let mut sqrt_fact = 1.0;
    for (m, d) in shifted.iter().enumerate() {
        if m > 0 {
            sqrt_fact *= (m as f64).sqrt();
        }
        v[m] = C64::from(d * sqrt_fact);
    }
    displace_vector(C64::from(-z), &v)
}

/// Normalized Fock-space vector of a series solution, without the residual
/// check.
pub fn series_to_fock_unchecked(sol: &SeriesSolution, basis: FockBasis) -> Result<DVector<C64>> {
    basis.require_spin()?;
    let order = sol.order;
    if basis.cutoff() <= order + 1 {
        return Err(Error::Truncation {
            detail: format!("cutoff {} cannot hold a polynomial of order {order}", basis.cutoff()),
        });
    }
    let z = sol.coeffs.z;
    let up = component(&sol.coeffs.b[..=order], z, basis.cutoff());
    let down = component(&sol.coeffs.c[..=order], z, basis.cutoff());
    let mut v = DVector::zeros(basis.dim());
    for n in 0..basis.cutoff() {
        v[basis.index(n, Spin::Up)] = up[n];
        v[basis.index(n, Spin::Down)] = down[n];
    }
    let norm = v.norm();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::Truncation {
            detail: "series vector has zero or non-finite norm".into(),
        });
    }
    Ok(v / C64::from(norm))
}

/// As [`series_to_fock_unchecked`], but rejects the result when
/// `‖H^I v − E v‖ ≥ 1e−7`, which signals that the basis is too small.
pub fn series_to_fock(sol: &SeriesSolution, basis: FockBasis) -> Result<StateVector> {
    let v = series_to_fock_unchecked(sol, basis)?;
    let h = build_h_transformed(&sol.params, basis)?;
    let residual = (h.entries() * &v - &v * C64::from(sol.energy)).norm();
    if !(residual < RESIDUAL_TOL) {
        return Err(Error::Truncation {
            detail: format!("Rayleigh residual {residual:.3e} at {basis}"),
        });
    }
    StateVector::new(basis, v)?.normalize()
}
