//! Truncated-basis diagonalization used as ground truth for every analytic
//! energy and eigenfunction produced by the series and RWA modules.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{build_h_transformed, FockBasis, ModelParams, OperatorMatrix};
use crate::series::{series_to_fock_unchecked, SeriesSolution};
use crate::C64;

/// Input is accepted as Hermitian up to this entrywise defect.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues closer than this are treated as one degenerate level.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// Ascending eigenvalues with optional orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Option<DMatrix<C64>>,
    pub cutoff: usize,
}

impl Spectrum {
    /// Lowest third of the spectrum, the part unaffected by truncation.
    pub fn interior(&self) -> &[f64] {
        let k = (self.eigenvalues.len() / 3).max(1).min(self.eigenvalues.len());
        &self.eigenvalues[..k]
    }
}

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    pub index: usize,
    pub vector: Option<DVector<C64>>,
    /// Distance from the target to the second-nearest eigenvalue.
    pub gap_to_next: f64,
}

/// Full spectrum of a Hermitian operator. Real symmetric input takes the
/// real solver path.
pub fn hermitian_eigensystem(h: &OperatorMatrix, want_vectors: bool) -> Result<Spectrum> {
    let defect = h.hermiticity_defect();
    if !(defect <= HERMITIAN_TOL) {
        return Err(Error::NotHermitian { defect });
    }
    let (values, vectors) = eigen_dense(h.entries(), want_vectors);
    Ok(Spectrum {
        eigenvalues: values,
        eigenvectors: vectors,
        cutoff: h.basis().cutoff(),
    })
}

fn eigen_dense(m: &DMatrix<C64>, want_vectors: bool) -> (Vec<f64>, Option<DMatrix<C64>>) {
    let n = m.nrows();
    let real = m.iter().all(|z| z.im == 0.0);
    let (values, vectors): (Vec<f64>, Option<DMatrix<C64>>) = if real {
        let re = DMatrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)].re + m[(j, i)].re));
        if want_vectors {
            let eig = SymmetricEigen::new(re);
            let vecs = eig.eigenvectors.map(C64::from);
            (eig.eigenvalues.iter().copied().collect(), Some(vecs))
        } else {
            let vals = re.symmetric_eigenvalues();
            (vals.iter().copied().collect(), None)
        }
    } else {
        let herm = (m + m.adjoint()) * C64::from(0.5);
        if want_vectors {
            let eig = SymmetricEigen::new(herm);
            (eig.eigenvalues.iter().copied().collect(), Some(eig.eigenvectors))
        } else {
            let vals = herm.symmetric_eigenvalues();
            (vals.iter().copied().collect(), None)
        }
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let vectors = vectors.map(|v| DMatrix::from_fn(n, n, |i, j| v[(i, order[j])]));
    (sorted, vectors)
}

/// Eigenvalue nearest to `target`. Exact ties resolve to the smaller
/// eigenvalue.
pub fn nearest_eigenpair(s: &Spectrum, target: f64) -> Result<EigenPair> {
    if s.eigenvalues.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    let mut best = 0;
    for (i, &v) in s.eigenvalues.iter().enumerate() {
        if (v - target).abs() < (s.eigenvalues[best] - target).abs() {
            best = i;
        }
    }
    let gap_to_next = s
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != best)
        .map(|(_, &v)| (v - target).abs())
        .fold(f64::INFINITY, f64::min);
    Ok(EigenPair {
        value: s.eigenvalues[best],
        index: best,
        vector: s
            .eigenvectors
            .as_ref()
            .map(|v| v.column(best).into_owned()),
        gap_to_next,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceEstimate {
    pub cutoff: usize,
    pub eigenvalue: f64,
    /// `|eigenvalue − target|`.
    pub gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub target_energy: f64,
    pub estimates: Vec<ConvergenceEstimate>,
    pub converged: bool,
    pub final_error: f64,
}

/// Tracks the eigenvalue of `H^I` nearest `target` across increasing
/// cutoffs. Converged iff the last two estimates differ by less than 1e−8.
pub fn cutoff_convergence(
    p: &ModelParams,
    target: f64,
    cutoffs: &[usize],
) -> Result<ConvergenceReport> {
    if cutoffs.len() < 2 {
        return Err(crate::error::invalid("cutoffs", "need at least two cutoffs"));
    }
    if cutoffs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(crate::error::invalid("cutoffs", "must be strictly increasing"));
    }
    let mut estimates = Vec::with_capacity(cutoffs.len());
    for &cutoff in cutoffs {
        let h = build_h_transformed(p, FockBasis::with_spin(cutoff)?)?;
        let spectrum = hermitian_eigensystem(&h, false)?;
        let pair = nearest_eigenpair(&spectrum, target)?;
        estimates.push(ConvergenceEstimate {
            cutoff,
            eigenvalue: pair.value,
            gap: (pair.value - target).abs(),
        });
    }
    let n = estimates.len();
    let drift = (estimates[n - 1].eigenvalue - estimates[n - 2].eigenvalue).abs();
    Ok(ConvergenceReport {
        target_energy: target,
        converged: drift < 1e-8,
        final_error: estimates[n - 1].gap,
        estimates,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// The basis is too small to judge; retry at the recommended cutoff.
    Inconclusive { recommended_cutoff: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    /// `‖H^I v − E v‖` for the normalized series vector.
    pub residual: f64,
    /// `|λ_nearest − E|`.
    pub eigen_gap: f64,
    /// Norm of the projection of the series vector onto the oracle
    /// eigenspace at `λ_nearest` (degenerate levels included).
    pub overlap: f64,
    pub nearest_eigenvalue: f64,
    pub verdict: Verdict,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Thresholds for [`validate_series_solution`].
pub const ENERGY_TOL: f64 = 1e-6;
pub const RESIDUAL_TOL: f64 = 1e-7;
pub const OVERLAP_TOL: f64 = 0.999;
const TAIL_LEVELS: usize = 10;
const TAIL_TOL: f64 = 1e-8;

/// Checks a series solution against diagonalization of `H^I` at its
/// parameters.
pub fn validate_series_solution(
    sol: &SeriesSolution,
    basis: FockBasis,
) -> Result<ValidationReport> {
    basis.require_spin()?;
    let v = series_to_fock_unchecked(sol, basis)?;
    let h = build_h_transformed(&sol.params, basis)?;
    let spectrum = hermitian_eigensystem(&h, true)?;
    let pair = nearest_eigenpair(&spectrum, sol.energy)?;

    let hv = h.entries() * &v;
    let residual = (&hv - &v * C64::from(sol.energy)).norm();
    let eigen_gap = (pair.value - sol.energy).abs();

    let vectors = spectrum.eigenvectors.as_ref().expect("requested vectors");
    let overlap = spectrum
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|&(_, &l)| (l - pair.value).abs() < DEGENERACY_TOL)
        .map(|(i, _)| vectors.column(i).dotc(&v).norm_sqr())
        .sum::<f64>()
        .sqrt();

    let tail: f64 = (basis.cutoff().saturating_sub(TAIL_LEVELS)..basis.cutoff())
        .flat_map(|n| [2 * n, 2 * n + 1])
        .map(|i| v[i].norm_sqr())
        .sum();

    let verdict = if tail > TAIL_TOL {
        Verdict::Inconclusive {
            recommended_cutoff: 2 * basis.cutoff(),
        }
    } else if eigen_gap < ENERGY_TOL && residual < RESIDUAL_TOL && overlap > OVERLAP_TOL {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(ValidationReport {
        residual,
        eigen_gap,
        overlap,
        nearest_eigenvalue: pair.value,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spectrum(values: &[f64]) -> Spectrum {
        Spectrum {
            eigenvalues: values.to_vec(),
            eigenvectors: None,
            cutoff: 0,
        }
    }

    fn real_op(rows: &[&[f64]]) -> OperatorMatrix {
        let n = rows.len();
        let basis = FockBasis::motional(n).unwrap();
        let m = DMatrix::from_fn(n, n, |i, j| C64::from(rows[i][j]));
        OperatorMatrix::new(basis, m).unwrap()
    }

    #[test]
    fn diagonal_matrix_sorted() {
        let s = hermitian_eigensystem(&real_op(&[&[2.0, 0.0], &[0.0, 1.0]]), true).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 2.0]);
    }

    #[test]
    fn off_diagonal_pair() {
        let e = 0.37;
        let s = hermitian_eigensystem(&real_op(&[&[0.0, e], &[e, 0.0]]), false).unwrap();
        assert!((s.eigenvalues[0] + e).abs() < 1e-15);
        assert!((s.eigenvalues[1] - e).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        let err = hermitian_eigensystem(&real_op(&[&[0.0, 1.0], &[0.0, 0.0]]), false).unwrap_err();
        assert!(matches!(err, Error::NotHermitian { defect } if (defect - 1.0).abs() < 1e-15));
    }

    #[test]
    fn nearest_with_gap() {
        let pair = nearest_eigenpair(&spectrum(&[0.3, 0.99, 2.0]), 1.0).unwrap();
        assert_eq!(pair.value, 0.99);
        assert!((pair.gap_to_next - 0.7).abs() < 1e-12);
    }

    #[test]
    fn nearest_tie_prefers_smaller() {
        let pair = nearest_eigenpair(&spectrum(&[0.5, 1.5]), 1.0).unwrap();
        assert_eq!(pair.value, 0.5);
        assert_eq!(pair.index, 0);
    }

    #[test]
    fn nearest_on_empty() {
        assert_eq!(
            nearest_eigenpair(&spectrum(&[]), 0.0).unwrap_err(),
            Error::EmptySpectrum
        );
    }

    #[test]
    fn convergence_needs_two_increasing_cutoffs() {
        let p = ModelParams::new(1.0, 0.1, 0.0).unwrap();
        assert!(cutoff_convergence(&p, 1.0, &[60]).is_err());
        assert!(cutoff_convergence(&p, 1.0, &[60, 40]).is_err());
    }

    #[test]
    fn convergence_trivial_at_zero_eta() {
        let p = ModelParams::new(2.0, 0.0, 0.0).unwrap();
        let r = cutoff_convergence(&p, 2.0, &[10, 12]).unwrap();
        assert!(r.converged);
        assert!(r.final_error < 1e-12);
    }
}
