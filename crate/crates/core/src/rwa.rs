//! Rotating-wave reference models at the two resonance families,
//! `Ω = 2^{−M}` and `Ω = K`.
//!
//! `H_M = (1 − 2^{−M})a†a + g(a†σ₋ + aσ₊) + g²` and
//! `H_K = ((K−1)/2K)·Ω·σ_z + g(a†σ₋ + aσ₊) + g²` (with `Ω = K`) both conserve
//! `a†a + σ₊σ₋`, so they split into doublets `{|n+1,↓⟩, |n,↑⟩}` plus the
//! isolated `|0,↓⟩`. The energies are reported as they stand; no claim is
//! made that they live in the same frame as the transformed Hamiltonian.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, Matrix2};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::model::{
    kron_motion_spin, number_matrix, sigma_minus, sigma_plus, sigma_z, spin_matrix, FockBasis,
    OperatorMatrix, Spin,
};
use crate::series::Branch;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RwaScheme {
    /// Fractional resonance, `Ω = 2^{−M}`.
    M,
    /// Integer resonance, `Ω = K`.
    K,
}

impl fmt::Display for RwaScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RwaScheme::M => "M",
            RwaScheme::K => "K",
        })
    }
}

impl FromStr for RwaScheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "M" | "m" => Ok(RwaScheme::M),
            "K" | "k" => Ok(RwaScheme::K),
            other => Err(format!("unknown RWA scheme `{other}` (expected M or K)")),
        }
    }
}

/// One branch `E±` of doublet `n` in a resonance family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RwaQuery {
    pub scheme: RwaScheme,
    pub index: u32,
    pub n: usize,
    pub sign: Branch,
}

fn check_index(index: u32) -> Result<()> {
    if index < 1 {
        return Err(invalid("index", "resonance index must be at least 1"));
    }
    Ok(())
}

/// `2^{−M}` or `K`.
pub fn resonant_rabi(scheme: RwaScheme, index: u32) -> Result<f64> {
    check_index(index)?;
    Ok(match scheme {
        RwaScheme::M => 2f64.powi(-(index as i32)),
        RwaScheme::K => index as f64,
    })
}

pub fn rwa_resonant_rabi(q: &RwaQuery) -> Result<f64> {
    resonant_rabi(q.scheme, q.index)
}

/// Resonance closest to `rabi` in absolute distance, over `M ≥ 1` and
/// `K ≥ 1`. Ties go to the M family.
pub fn nearest_resonance(rabi: f64) -> Result<(RwaScheme, u32)> {
    if !(rabi > 0.0) || !rabi.is_finite() {
        return Err(invalid("rabi", format!("must be finite and > 0, got {rabi}")));
    }
    let k = rabi.round().max(1.0) as u32;
    let mut best = (RwaScheme::K, k, (rabi - k as f64).abs());
    for m in (1..=52).rev() {
        let d = (rabi - 2f64.powi(-m)).abs();
        if d <= best.2 {
            best = (RwaScheme::M, m as u32, d);
        }
    }
    Ok((best.0, best.1))
}

/// Closed-form doublet energy:
/// `E±_M = (1−2^{−M})(n+½) + η²/4 ± ½√(η²(n+1) + (1−2^{−M})²)`,
/// `E±_K = η²/4 ± ½√(η²(n+1) + (K−1)²)`.
pub fn rwa_energy(q: &RwaQuery, eta: f64) -> Result<f64> {
    check_index(q.index)?;
    if !eta.is_finite() || eta < 0.0 {
        return Err(invalid("eta", format!("must be finite and >= 0, got {eta}")));
    }
    let n = q.n as f64;
    let e2 = eta * eta;
    let (offset, split) = match q.scheme {
        RwaScheme::M => {
            let d = 1.0 - 2f64.powi(-(q.index as i32));
            (d * (n + 0.5), d)
        }
        RwaScheme::K => (0.0, q.index as f64 - 1.0),
    };
    Ok(offset + e2 / 4.0 + q.sign.sign() * 0.5 * (e2 * (n + 1.0) + split * split).sqrt())
}

/// Matrix of `H_M` or `H_K` on a Fock⊗spin basis.
pub fn rwa_hamiltonian(
    scheme: RwaScheme,
    index: u32,
    eta: f64,
    basis: FockBasis,
) -> Result<OperatorMatrix> {
    basis.require_spin()?;
    let rabi = resonant_rabi(scheme, index)?;
    if !eta.is_finite() || eta < 0.0 {
        return Err(invalid("eta", format!("must be finite and >= 0, got {eta}")));
    }
    let g = eta / 2.0;
    let c = basis.cutoff();
    let a = DMatrix::from_fn(c, c, |i, j| {
        if j == i + 1 {
            C64::from((j as f64).sqrt())
        } else {
            C64::from(0.0)
        }
    });
    let jc = kron_motion_spin(&a.adjoint(), &sigma_minus()) + kron_motion_spin(&a, &sigma_plus());
    let free = match scheme {
        RwaScheme::M => number_matrix(basis).into_entries() * C64::from(1.0 - rabi),
        RwaScheme::K => {
            let k = index as f64;
            spin_matrix(basis, &sigma_z())?.into_entries() * C64::from((k - 1.0) / (2.0 * k) * rabi)
        }
    };
    let entries = free + jc * C64::from(g) + DMatrix::identity(2 * c, 2 * c) * C64::from(g * g);
    OperatorMatrix::new(basis, entries)
}

/// `a†a + σ₊σ₋`.
pub fn excitation_number(basis: FockBasis) -> Result<OperatorMatrix> {
    basis.require_spin()?;
    let up = sigma_plus() * sigma_minus();
    let entries = number_matrix(basis).into_entries() + spin_matrix(basis, &up)?.into_entries();
    OperatorMatrix::new(basis, entries)
}

/// The 2×2 block of `h` on `{|n+1,↓⟩, |n,↑⟩}`.
pub fn sector_block(h: &OperatorMatrix, n: usize) -> Result<Matrix2<C64>> {
    let basis = h.basis();
    basis.require_spin()?;
    if n + 1 >= basis.cutoff() {
        return Err(invalid("n", format!("doublet {n} does not fit in {basis}")));
    }
    let idx = [basis.index(n + 1, Spin::Down), basis.index(n, Spin::Up)];
    let m = h.entries();
    Ok(Matrix2::from_fn(|i, j| m[(idx[i], idx[j])]))
}

/// Eigenvalues `[E−, E+]` of the doublet-`n` block.
pub fn sector_eigenvalues(h: &OperatorMatrix, n: usize) -> Result<[f64; 2]> {
    let b = sector_block(h, n)?;
    let mean = 0.5 * (b[(0, 0)].re + b[(1, 1)].re);
    let half = 0.5 * (b[(0, 0)].re - b[(1, 1)].re);
    let r = half.hypot(b[(0, 1)].norm());
    Ok([mean - r, mean + r])
}
