//! The decoupled limit `η → 0`, where the transformed Hamiltonian reduces to
//! `(Ω/2)σ_z + a†a + εσ_x` and the first excited doublet is solved by linear
//! polynomials with `z = 0`.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{FockBasis, Spin};
use crate::states::StateVector;
use crate::C64;

/// `Ψ(α) = (b₀ + b₁α, c₀ + c₁α)` for the (up, down) components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearPair {
    pub b0: f64,
    pub b1: f64,
    pub c0: f64,
    pub c1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpecialCaseSolution {
    /// `1 ± √(ε² + Ω²/4)`.
    pub energy: f64,
    pub psi_s: LinearPair,
    /// The same eigenfunction in the lab frame, over `{|0⟩, |1⟩} ⊗ spin`.
    pub psi_os: StateVector,
}

/// Both solutions, `E = 1 + λ` first and `E = 1 − λ` second with
/// `λ = √(ε² + Ω²/4)`.
///
/// At this order `b₀ = c₀ = 0` and `(b₁, c₁)` is the eigenvector of
/// `[[Ω/2, ε], [ε, −Ω/2]]`, so `c₁/b₁ = (E − Ω/2 − 1)/ε` when `ε ≠ 0`.
pub fn special_case_small_eta(rabi: f64, eps: f64) -> Result<[SpecialCaseSolution; 2]> {
    if !rabi.is_finite() || rabi < 0.0 {
        return Err(crate::error::invalid(
            "rabi",
            format!("must be finite and >= 0, got {rabi}"),
        ));
    }
    if !eps.is_finite() {
        return Err(crate::error::invalid("eps", "must be finite"));
    }
    if rabi == 0.0 && eps == 0.0 {
        return Err(Error::DegenerateSpecialCase);
    }
    let half = rabi / 2.0;
    let lambda = eps.hypot(half);
    let basis = FockBasis::with_spin(2)?;
    let solve = |l: f64| -> Result<SpecialCaseSolution> {
        // Two equivalent eigenvector forms; take the better-conditioned one.
        let (x, y) = ((eps, l - half), (l + half, eps));
        let (b1, c1) = if x.0.hypot(x.1) >= y.0.hypot(y.1) { x } else { y };
        let n = b1.hypot(c1);
        let (b1, c1) = (b1 / n, c1 / n);

        // Lab frame: up|1⟩ = −i(b₁ − c₁)/√2, down|1⟩ = −i(b₁ + c₁)/√2.
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = DVector::zeros(basis.dim());
        amps[basis.index(1, Spin::Up)] = C64::new(0.0, -(b1 - c1) * r);
        amps[basis.index(1, Spin::Down)] = C64::new(0.0, -(b1 + c1) * r);
        Ok(SpecialCaseSolution {
            energy: 1.0 + l,
            psi_s: LinearPair {
                b0: 0.0,
                b1,
                c0: 0.0,
                c1,
            },
            psi_os: StateVector::new(basis, amps)?.normalize()?,
        })
    };
    Ok([solve(lambda)?, solve(-lambda)?])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_h_lab, transform_uv, ModelParams};

    #[test]
    fn energies() {
        let [p, m] = special_case_small_eta(2.0, 1.0).unwrap();
        assert!((p.energy - (1.0 + 2f64.sqrt())).abs() < 1e-12);
        assert!((m.energy - (1.0 - 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn degenerate_rejected() {
        assert_eq!(
            special_case_small_eta(0.0, 0.0).unwrap_err(),
            Error::DegenerateSpecialCase
        );
    }

    #[test]
    fn coefficient_ratio() {
        let (rabi, eps) = (1.3, -0.4);
        for s in special_case_small_eta(rabi, eps).unwrap() {
            let want = (s.energy - rabi / 2.0 - 1.0) / eps;
            assert!((s.psi_s.c1 / s.psi_s.b1 - want).abs() < 1e-12);
        }
    }

    #[test]
    fn lab_state_is_eigenvector() {
        let (rabi, eps) = (0.7, 0.45);
        let p = ModelParams::from_eps(rabi, 0.0, eps).unwrap();
        let basis = FockBasis::with_spin(2).unwrap();
        let h = build_h_lab(&p, basis).unwrap();
        for s in special_case_small_eta(rabi, eps).unwrap() {
            let v = s.psi_os.amplitudes();
            let r = h.entries() * v - v * C64::from(s.energy);
            assert!(r.norm() < 1e-12);
        }
    }

    #[test]
    fn lab_state_matches_transform() {
        let (rabi, eps) = (1.1, -0.2);
        let p = ModelParams::from_eps(rabi, 0.0, eps).unwrap();
        let basis = FockBasis::with_spin(2).unwrap();
        let uv = transform_uv(&p, basis).unwrap();
        for s in special_case_small_eta(rabi, eps).unwrap() {
            let mut v = DVector::zeros(4);
            v[basis.index(1, Spin::Up)] = C64::from(s.psi_s.b1);
            v[basis.index(1, Spin::Down)] = C64::from(s.psi_s.c1);
            let lab = uv.entries() * v;
            assert!((lab - s.psi_os.amplitudes()).norm() < 1e-12);
        }
    }

    #[test]
    fn large_detuning_and_carrier_limits() {
        // Far detuned: no transition, one spin level only.
        for s in special_case_small_eta(0.01, 10.0).unwrap() {
            let pops = s.psi_os.spin_populations().unwrap();
            assert!(pops[0].min(pops[1]) < 1e-5, "{pops:?}");
        }
        // Resonant carrier: equal weights.
        for s in special_case_small_eta(1.0, 1e-9).unwrap() {
            let pops = s.psi_os.spin_populations().unwrap();
            assert!((pops[0] - 0.5).abs() < 1e-8 && (pops[1] - 0.5).abs() < 1e-8);
        }
    }
}
