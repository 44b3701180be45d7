//! Motional states: coherent and displaced Fock states, the displaced even
//! coherent ("cat") state, and the usual diagnostics on them.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::linalg::{displace_vector, displacement_elements};
use crate::model::{FockBasis, Spin};
use crate::C64;

/// Levels at the top of the basis whose population signals truncation.
pub const TAIL_LEVELS: usize = 10;
pub const TAIL_TOL: f64 = 1e-8;

/// Amplitudes on a [`FockBasis`]. `normalized` records whether the vector
/// was scaled to unit norm at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    basis: FockBasis,
    amplitudes: DVector<C64>,
    normalized: bool,
}

impl StateVector {
    pub fn new(basis: FockBasis, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::BasisMismatch {
                expected: format!("{} amplitudes for {basis}", basis.dim()),
                found: format!("{} amplitudes", amplitudes.len()),
            });
        }
        Ok(Self {
            basis,
            amplitudes,
            normalized: false,
        })
    }

    /// `|n⟩` (motional basis) or `|n, s⟩`.
    pub fn basis_state(basis: FockBasis, n: usize, spin: Spin) -> Result<Self> {
        if n >= basis.cutoff() {
            return Err(invalid("n", format!("level {n} outside {basis}")));
        }
        let mut amps = DVector::zeros(basis.dim());
        amps[basis.index(n, spin)] = C64::new(1.0, 0.0);
        Ok(Self {
            basis,
            amplitudes: amps,
            normalized: true,
        })
    }

    /// Scales to unit norm; errors on the zero vector.
    pub fn normalize(mut self) -> Result<Self> {
        let norm = self.amplitudes.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(invalid("amplitudes", "cannot normalize a zero or non-finite vector"));
        }
        self.amplitudes /= C64::from(norm);
        self.normalized = true;
        Ok(self)
    }

    pub fn basis(&self) -> FockBasis {
        self.basis
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amplitudes
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn amplitude(&self, n: usize, spin: Spin) -> C64 {
        self.amplitudes[self.basis.index(n, spin)]
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.basis.require_same(&other.basis)?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// Motional populations with the spin traced out.
    pub fn motional_probabilities(&self) -> Vec<f64> {
        let s = self.basis.spin_dim();
        (0..self.basis.cutoff())
            .map(|n| (0..s).map(|k| self.amplitudes[n * s + k].norm_sqr()).sum())
            .collect()
    }

    /// `[P(down), P(up)]`; errors on a motional-only basis.
    pub fn spin_populations(&self) -> Result<[f64; 2]> {
        self.basis.require_spin()?;
        let mut pops = [0.0; 2];
        for (i, a) in self.amplitudes.iter().enumerate() {
            pops[i % 2] += a.norm_sqr();
        }
        Ok(pops)
    }

    /// Population in the top `levels` motional levels.
    pub fn tail_mass(&self, levels: usize) -> f64 {
        let probs = self.motional_probabilities();
        let start = probs.len().saturating_sub(levels);
        probs[start..].iter().sum()
    }

    /// Motional register of one spin component (the whole vector when there
    /// is no spin).
    pub fn component(&self, spin: Spin) -> DVector<C64> {
        DVector::from_fn(self.basis.cutoff(), |n, _| {
            self.amplitudes[self.basis.index(n, spin)]
        })
    }

    fn spin_labels(&self) -> &'static [Spin] {
        if self.basis.spin_dim() == 2 {
            &[Spin::Down, Spin::Up]
        } else {
            &[Spin::Down]
        }
    }
}

fn check_tail(v: &StateVector, what: &str) -> Result<()> {
    let tail = v.tail_mass(TAIL_LEVELS);
    if tail > TAIL_TOL {
        return Err(Error::Truncation {
            detail: format!(
                "{what}: population {tail:.3e} in the top {TAIL_LEVELS} levels of {}",
                v.basis
            ),
        });
    }
    Ok(())
}

fn coherent_amplitudes(gamma: C64, cutoff: usize) -> DVector<C64> {
    let mut amps = DVector::zeros(cutoff);
    let mut a = C64::from((-0.5 * gamma.norm_sqr()).exp());
    for n in 0..cutoff {
        amps[n] = a;
        a *= gamma / ((n + 1) as f64).sqrt();
    }
    amps
}

/// `|γ⟩ = e^{−|γ|²/2} Σ γⁿ/√n! |n⟩` on a motional basis, renormalized after
/// the truncation check.
pub fn coherent_state(gamma: C64, basis: FockBasis) -> Result<StateVector> {
    if basis.spin_dim() != 1 {
        return Err(Error::BasisMismatch {
            expected: "motional basis (spin_dim = 1)".into(),
            found: basis.to_string(),
        });
    }
    let v = StateVector::new(basis, coherent_amplitudes(gamma, basis.cutoff()))?;
    check_tail(&v, "coherent state")?;
    v.normalize()
}

/// Displaced Fock state `D(γ)|n⟩` on a motional basis.
pub fn displaced_fock_state(gamma: C64, n: usize, basis: FockBasis) -> Result<StateVector> {
    let fock = StateVector::basis_state(basis, n, Spin::Down)?;
    if basis.spin_dim() != 1 {
        return Err(Error::BasisMismatch {
            expected: "motional basis (spin_dim = 1)".into(),
            found: basis.to_string(),
        });
    }
    let v = StateVector::new(basis, displace_vector(gamma, fock.amplitudes()))?;
    check_tail(&v, "displaced Fock state")?;
    v.normalize()
}

/// Preparation recipe for the cat state: evolve for `t = 4π/ω_l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CatParams {
    pub eta: f64,
    pub omega_l: f64,
    pub t: f64,
}

impl CatParams {
    pub fn recipe(eta: f64, omega_l: f64) -> Result<Self> {
        if !eta.is_finite() || eta < 0.0 {
            return Err(invalid("eta", format!("must be finite and >= 0, got {eta}")));
        }
        if !(omega_l > 0.0) || !omega_l.is_finite() {
            return Err(invalid("omega_l", format!("must be finite and > 0, got {omega_l}")));
        }
        Ok(Self {
            eta,
            omega_l,
            t: 4.0 * std::f64::consts::PI / omega_l,
        })
    }
}

/// Normalized `|iη⟩ + |0⟩`, after checking that it coincides with
/// `D(iη/2)(|iη/2⟩ + |−iη/2⟩)` in the given basis.
pub fn cat_state(eta: f64, basis: FockBasis) -> Result<StateVector> {
    let overlap = cat_identity_overlap(eta, basis)?;
    if !(overlap >= 1.0 - 1e-9) {
        return Err(Error::Truncation {
            detail: format!("displaced even coherent state overlap {overlap} at eta={eta}"),
        });
    }
    cat_target(eta, basis)
}

fn cat_target(eta: f64, basis: FockBasis) -> Result<StateVector> {
    if !eta.is_finite() || eta < 0.0 {
        return Err(invalid("eta", format!("must be finite and >= 0, got {eta}")));
    }
    let far = coherent_state(C64::new(0.0, eta), basis)?;
    let vac = coherent_state(C64::new(0.0, 0.0), basis)?;
    StateVector::new(basis, far.amplitudes + vac.amplitudes)?.normalize()
}

/// `|⟨D(iη/2)(|iη/2⟩+|−iη/2⟩), |iη⟩+|0⟩⟩|` with both sides normalized.
pub fn cat_identity_overlap(eta: f64, basis: FockBasis) -> Result<f64> {
    let target = cat_target(eta, basis)?;
    let half = C64::new(0.0, eta / 2.0);
    let even = coherent_state(half, basis)?.amplitudes + coherent_state(-half, basis)?.amplitudes;
    let displaced = StateVector::new(basis, displace_vector(half, &even))?;
    check_tail(&displaced, "displaced even coherent state")?;
    let displaced = displaced.normalize()?;
    Ok(displaced.inner(&target)?.norm())
}

/// `|⟨u|v⟩|²` after normalizing both.
pub fn fidelity(u: &StateVector, v: &StateVector) -> Result<f64> {
    let overlap = u.inner(v)?;
    let scale = u.norm() * v.norm();
    if !(scale > 0.0) {
        return Err(invalid("state", "fidelity of a zero vector"));
    }
    Ok((overlap.norm() / scale).powi(2).min(1.0))
}

/// Motional parity `Σ(−1)ⁿ Pₙ`, spin traced out.
pub fn parity(v: &StateVector) -> f64 {
    let probs = v.motional_probabilities();
    let total: f64 = probs.iter().sum();
    let signed: f64 = probs
        .iter()
        .enumerate()
        .map(|(n, p)| if n % 2 == 0 { *p } else { -*p })
        .sum();
    if total > 0.0 {
        signed / total
    } else {
        0.0
    }
}

/// Wigner function `W(α) = (2/π) Σₙ (−1)ⁿ |⟨n|D†(α)|v⟩|²` at `α = x + ip`,
/// spin traced out. Indexed `[x][p]`.
///
/// Evaluated as `(2/π)⟨v|D(2α)Π|v⟩` with exact displacement elements, so
/// grid points far from the origin are not distorted by the truncation.
pub fn wigner_grid(v: &StateVector, xs: &[f64], ps: &[f64]) -> Result<Vec<Vec<f64>>> {
    if xs.iter().chain(ps).any(|x| !x.is_finite()) {
        return Err(invalid("grid", "coordinates must be finite"));
    }
    let norm2 = v.norm().powi(2);
    if !(norm2 > 0.0) {
        return Err(invalid("state", "Wigner function of a zero vector"));
    }
    // Levels above the last populated one contribute nothing.
    let components: Vec<DVector<C64>> = v.spin_labels().iter().map(|&s| v.component(s)).collect();
    let support = components
        .iter()
        .flat_map(|c| c.iter().rposition(|a| a.norm_sqr() > 0.0))
        .max()
        .map_or(1, |k| k + 1);
    let comps: Vec<(DVector<C64>, DVector<C64>)> = components
        .iter()
        .map(|c| {
            let c = c.rows(0, support).into_owned();
            let flipped = DVector::from_fn(support, |n, _| if n % 2 == 0 { c[n] } else { -c[n] });
            (c, flipped)
        })
        .collect();
    let prefactor = 2.0 / std::f64::consts::PI / norm2;
    Ok(xs
        .iter()
        .map(|&x| {
            ps.iter()
                .map(|&p| {
                    let d = displacement_elements(C64::new(2.0 * x, 2.0 * p), support);
                    let w: f64 = comps.iter().map(|(c, f)| c.dotc(&(&d * f)).re).sum();
                    prefactor * w
                })
                .collect()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn mot(c: usize) -> FockBasis {
        FockBasis::motional(c).unwrap()
    }

    #[test]
    fn vacuum_coherent() {
        let v = coherent_state(C64::new(0.0, 0.0), mot(20)).unwrap();
        assert!((v.amplitudes()[0] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(v.amplitudes().iter().skip(1).all(|a| a.norm() == 0.0));
    }

    #[test]
    fn coherent_amplitudes_match_closed_form() {
        let v = coherent_state(C64::new(0.0, 0.5), mot(40)).unwrap();
        assert!((v.amplitudes()[0] - C64::new(0.882497, 0.0)).norm() < 1e-6);
        assert!((v.amplitudes()[1] - C64::new(0.0, 0.441248)).norm() < 1e-6);
    }

    #[test]
    fn coherent_matches_displaced_vacuum() {
        let gamma = C64::new(0.7, -0.4);
        let a = coherent_state(gamma, mot(50)).unwrap();
        let b = displaced_fock_state(gamma, 0, mot(50)).unwrap();
        assert!((a.amplitudes() - b.amplitudes()).norm() < 1e-12);
    }

    #[test]
    fn coherent_overlap_formula() {
        let (g1, g2) = (C64::new(0.3, 0.8), C64::new(-0.5, 0.2));
        let basis = mot(60);
        let got = coherent_state(g1, basis)
            .unwrap()
            .inner(&coherent_state(g2, basis).unwrap())
            .unwrap();
        let want = (-(g1.norm_sqr() + g2.norm_sqr()) / 2.0 + g1.conj() * g2).exp();
        assert!((got - want).norm() < 1e-10);
    }

    #[test]
    fn truncation_is_reported() {
        let err = coherent_state(C64::new(4.0, 0.0), mot(12)).unwrap_err();
        assert!(matches!(err, Error::Truncation { .. }));
    }

    #[test]
    fn coherent_rejects_spin_basis() {
        assert!(coherent_state(C64::new(0.1, 0.0), FockBasis::with_spin(10).unwrap()).is_err());
    }

    #[test]
    fn cat_amplitudes() {
        let v = cat_state(0.5, mot(60)).unwrap();
        assert!((v.amplitudes()[0] - C64::new(0.970180, 0.0)).norm() < 1e-6);
        assert!((v.amplitudes()[1] - C64::new(0.0, 0.227405)).norm() < 1e-6);
    }

    #[test]
    fn cat_at_zero_eta_is_vacuum() {
        let v = cat_state(0.0, mot(20)).unwrap();
        assert!((v.amplitudes()[0].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cat_identity_holds() {
        for eta in [0.2, 0.8, 1.5] {
            let o = cat_identity_overlap(eta, mot(100)).unwrap();
            assert!(o > 1.0 - 1e-9, "eta={eta}: {o}");
        }
    }

    #[test]
    fn cat_recipe_time() {
        let p = CatParams::recipe(0.5, 2.0).unwrap();
        assert!((p.t * p.omega_l - 4.0 * PI).abs() < 1e-14);
        assert!(CatParams::recipe(0.5, 0.0).is_err());
    }

    #[test]
    fn fidelity_basics() {
        let basis = mot(10);
        let zero = StateVector::basis_state(basis, 0, Spin::Down).unwrap();
        let one = StateVector::basis_state(basis, 1, Spin::Down).unwrap();
        assert_eq!(fidelity(&zero, &zero).unwrap(), 1.0);
        assert_eq!(fidelity(&zero, &one).unwrap(), 0.0);
        let other = StateVector::basis_state(mot(11), 0, Spin::Down).unwrap();
        assert!(matches!(
            fidelity(&zero, &other),
            Err(Error::BasisMismatch { .. })
        ));
    }

    #[test]
    fn cat_coherent_fidelity() {
        let basis = mot(60);
        let f = fidelity(
            &cat_state(0.5, basis).unwrap(),
            &coherent_state(C64::new(0.0, 0.5), basis).unwrap(),
        )
        .unwrap();
        let e = (-0.125_f64).exp();
        assert!((f - (1.0 + e) / 2.0).abs() < 1e-10);
    }

    #[test]
    fn parity_values() {
        let basis = mot(30);
        assert_eq!(parity(&StateVector::basis_state(basis, 0, Spin::Down).unwrap()), 1.0);
        assert_eq!(parity(&StateVector::basis_state(basis, 1, Spin::Down).unwrap()), -1.0);
        let p = parity(&cat_state(0.5, basis).unwrap());
        assert!(p > 0.0 && p <= 1.0);
    }

    #[test]
    fn wigner_at_origin() {
        let basis = mot(30);
        let vac = StateVector::basis_state(basis, 0, Spin::Down).unwrap();
        let one = StateVector::basis_state(basis, 1, Spin::Down).unwrap();
        assert!((wigner_grid(&vac, &[0.0], &[0.0]).unwrap()[0][0] - 2.0 / PI).abs() < 1e-12);
        assert!((wigner_grid(&one, &[0.0], &[0.0]).unwrap()[0][0] + 2.0 / PI).abs() < 1e-12);
    }

    #[test]
    fn wigner_traces_spin() {
        let basis = FockBasis::with_spin(30).unwrap();
        let up = StateVector::basis_state(basis, 0, Spin::Up).unwrap();
        assert!((wigner_grid(&up, &[0.0], &[0.0]).unwrap()[0][0] - 2.0 / PI).abs() < 1e-12);
    }

    #[test]
    fn wigner_of_cat_goes_negative() {
        let v = cat_state(2.0, mot(60)).unwrap();
        let ps: Vec<f64> = (0..41).map(|i| -1.0 + 3.0 * i as f64 / 40.0).collect();
        let xs: Vec<f64> = (0..21).map(|i| -1.0 + 0.1 * i as f64).collect();
        let w = wigner_grid(&v, &xs, &ps).unwrap();
        let min = w.iter().flatten().fold(f64::INFINITY, |m, x| m.min(*x));
        assert!(min < -0.05, "{min}");
    }

    #[test]
    fn wigner_integrates_to_one() {
        let v = cat_state(0.8, mot(60)).unwrap();
        let h = 0.1;
        let grid: Vec<f64> = (0..=100).map(|i| -5.0 + h * i as f64).collect();
        let w = wigner_grid(&v, &grid, &grid).unwrap();
        let total: f64 = w.iter().flatten().sum::<f64>() * h * h;
        assert!((total - 1.0).abs() < 0.01, "{total}");
    }
}
