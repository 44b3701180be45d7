//! Model parameters, the truncated Fock⊗spin basis and the two Hamiltonians.
//!
//! All energies are in units of the trap frequency. Basis states are ordered
//! with the spin index fastest: `index = spin_dim·n + s`, with `s = 0` for the
//! lower (down) level and `s = 1` for the upper (up) level. With this ordering
//! each motional level is a contiguous 2×2 spin tile.

use std::fmt;

use nalgebra::{DMatrix, Matrix2};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{expm, max_abs};
use crate::C64;

/// Default number of Fock levels for oracle diagonalizations.
pub const DEFAULT_CUTOFF: usize = 150;

/// Physical inputs: Rabi frequency Ω, Lamb-Dicke parameter η and laser
/// detuning Δ, all dimensionless.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub rabi: f64,
    pub lamb_dicke: f64,
    pub detuning: f64,
}

/// Couplings of the transformed Hamiltonian: `g = η/2`, `ε = −Δ/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    pub g: f64,
    pub eps: f64,
}

impl ModelParams {
    pub fn new(rabi: f64, lamb_dicke: f64, detuning: f64) -> Result<Self> {
        if !rabi.is_finite() || rabi < 0.0 {
            return Err(invalid("rabi", format!("must be finite and >= 0, got {rabi}")));
        }
        if !lamb_dicke.is_finite() || lamb_dicke < 0.0 {
            return Err(invalid(
                "lamb_dicke",
                format!("must be finite and >= 0, got {lamb_dicke}"),
            ));
        }
        if !detuning.is_finite() {
            return Err(invalid("detuning", format!("must be finite, got {detuning}")));
        }
        Ok(Self {
            rabi,
            lamb_dicke,
            detuning,
        })
    }

    /// Builds parameters from the transformed-frame detuning `ε = −Δ/2`.
    pub fn from_eps(rabi: f64, lamb_dicke: f64, eps: f64) -> Result<Self> {
        Self::new(rabi, lamb_dicke, -2.0 * eps)
    }

    pub fn derived(&self) -> DerivedParams {
        derive_params(self)
    }

    pub fn g(&self) -> f64 {
        self.lamb_dicke / 2.0
    }

    pub fn eps(&self) -> f64 {
        -self.detuning / 2.0
    }
}

pub fn derive_params(p: &ModelParams) -> DerivedParams {
    DerivedParams {
        g: p.lamb_dicke / 2.0,
        eps: -p.detuning / 2.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Spin {
    Down = 0,
    Up = 1,
}

/// Truncated motional basis `|0⟩..|cutoff−1⟩`, optionally tensored with the
/// two internal levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FockBasis {
    cutoff: usize,
    spin_dim: usize,
}

impl FockBasis {
    pub fn new(cutoff: usize, spin_dim: usize) -> Result<Self> {
        if cutoff < 2 {
            return Err(Error::InvalidBasis(format!(
                "cutoff must be at least 2, got {cutoff}"
            )));
        }
        if spin_dim != 1 && spin_dim != 2 {
            return Err(Error::InvalidBasis(format!(
                "spin dimension must be 1 or 2, got {spin_dim}"
            )));
        }
        Ok(Self { cutoff, spin_dim })
    }

    pub fn motional(cutoff: usize) -> Result<Self> {
        Self::new(cutoff, 1)
    }

    pub fn with_spin(cutoff: usize) -> Result<Self> {
        Self::new(cutoff, 2)
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn spin_dim(&self) -> usize {
        self.spin_dim
    }

    pub fn dim(&self) -> usize {
        self.cutoff * self.spin_dim
    }

    /// Index of `|n, s⟩`. For a motional-only basis the spin is ignored.
    pub fn index(&self, n: usize, spin: Spin) -> usize {
        if self.spin_dim == 1 {
            n
        } else {
            2 * n + spin as usize
        }
    }

    /// Number of eigenvalues treated as free of truncation artifacts.
    pub fn interior_len(&self) -> usize {
        (self.dim() / 3).max(1)
    }

    pub(crate) fn require_spin(&self) -> Result<()> {
        if self.spin_dim != 2 {
            return Err(Error::BasisMismatch {
                expected: "Fock⊗spin basis (spin_dim = 2)".into(),
                found: self.to_string(),
            });
        }
        Ok(())
    }

    pub(crate) fn require_same(&self, other: &FockBasis) -> Result<()> {
        if self != other {
            return Err(Error::BasisMismatch {
                expected: self.to_string(),
                found: other.to_string(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for FockBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FockBasis(cutoff={}, spin_dim={})", self.cutoff, self.spin_dim)
    }
}

/// Dense complex operator on a [`FockBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    basis: FockBasis,
    entries: DMatrix<C64>,
}

impl OperatorMatrix {
    pub fn new(basis: FockBasis, entries: DMatrix<C64>) -> Result<Self> {
        if entries.nrows() != basis.dim() || entries.ncols() != basis.dim() {
            return Err(Error::BasisMismatch {
                expected: format!("{0}x{0} matrix for {basis}", basis.dim()),
                found: format!("{}x{}", entries.nrows(), entries.ncols()),
            });
        }
        Ok(Self { basis, entries })
    }

    pub fn identity(basis: FockBasis) -> Self {
        let d = basis.dim();
        Self {
            basis,
            entries: DMatrix::identity(d, d),
        }
    }

    pub fn basis(&self) -> FockBasis {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<C64> {
        self.entries
    }

    pub fn adjoint(&self) -> Self {
        Self {
            basis: self.basis,
            entries: self.entries.adjoint(),
        }
    }

    pub fn matmul(&self, rhs: &OperatorMatrix) -> Result<Self> {
        self.basis.require_same(&rhs.basis)?;
        Ok(Self {
            basis: self.basis,
            entries: &self.entries * &rhs.entries,
        })
    }

    /// `max |H − H†|` entrywise.
    pub fn hermiticity_defect(&self) -> f64 {
        max_abs(&(&self.entries - self.entries.adjoint()))
    }

    pub fn max_imag(&self) -> f64 {
        self.entries.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// Top-left `k×k` block.
    pub fn leading_block(&self, k: usize) -> DMatrix<C64> {
        let k = k.min(self.dim());
        self.entries.view((0, 0), (k, k)).into_owned()
    }

    /// `max |(M†M − I)|` over the top-left `k×k` block.
    pub fn unitarity_defect(&self, k: usize) -> f64 {
        let mtm = self.entries.adjoint() * &self.entries;
        let k = k.min(self.dim());
        let block = mtm.view((0, 0), (k, k)).into_owned();
        max_abs(&(block - DMatrix::identity(k, k)))
    }
}

fn pauli(spin: [[f64; 2]; 2]) -> Matrix2<C64> {
    Matrix2::new(
        C64::from(spin[0][0]),
        C64::from(spin[0][1]),
        C64::from(spin[1][0]),
        C64::from(spin[1][1]),
    )
}

/// σ_z in the (down, up) index order.
pub fn sigma_z() -> Matrix2<C64> {
    pauli([[-1.0, 0.0], [0.0, 1.0]])
}

/// σ₊ = |up⟩⟨down|.
pub fn sigma_plus() -> Matrix2<C64> {
    pauli([[0.0, 0.0], [1.0, 0.0]])
}

/// σ₋ = |down⟩⟨up|.
pub fn sigma_minus() -> Matrix2<C64> {
    pauli([[0.0, 1.0], [0.0, 0.0]])
}

pub fn sigma_x() -> Matrix2<C64> {
    sigma_plus() + sigma_minus()
}

/// Embeds `motion ⊗ spin` in the interleaved ordering.
pub fn kron_motion_spin(motion: &DMatrix<C64>, spin: &Matrix2<C64>) -> DMatrix<C64> {
    let c = motion.nrows();
    DMatrix::from_fn(2 * c, 2 * c, |i, j| motion[(i / 2, j / 2)] * spin[(i % 2, j % 2)])
}

fn lift(basis: &FockBasis, motion: DMatrix<C64>) -> DMatrix<C64> {
    if basis.spin_dim() == 1 {
        motion
    } else {
        kron_motion_spin(&motion, &Matrix2::identity())
    }
}

/// Motional annihilation operator on `cutoff` levels.
pub(crate) fn annihilation(cutoff: usize) -> DMatrix<C64> {
    let mut a = DMatrix::<C64>::zeros(cutoff, cutoff);
    for n in 1..cutoff {
        a[(n - 1, n)] = C64::from((n as f64).sqrt());
    }
    a
}

/// Position operator `a + a†` on `cutoff` levels.
pub(crate) fn position(cutoff: usize) -> DMatrix<C64> {
    let a = annihilation(cutoff);
    &a + a.adjoint()
}

pub(crate) fn number(cutoff: usize) -> DMatrix<C64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_fn(cutoff, |n, _| C64::from(n as f64)))
}

/// The annihilation operator `a` (⊗ identity on spin, when present).
pub fn ladder_matrix(basis: FockBasis) -> OperatorMatrix {
    let a = annihilation(basis.cutoff());
    OperatorMatrix {
        basis,
        entries: lift(&basis, a),
    }
}

pub fn number_matrix(basis: FockBasis) -> OperatorMatrix {
    OperatorMatrix {
        basis,
        entries: lift(&basis, number(basis.cutoff())),
    }
}

/// Applies a spin matrix on a Fock⊗spin basis.
pub fn spin_matrix(basis: FockBasis, spin: &Matrix2<C64>) -> Result<OperatorMatrix> {
    basis.require_spin()?;
    let id = DMatrix::identity(basis.cutoff(), basis.cutoff());
    Ok(OperatorMatrix {
        basis,
        entries: kron_motion_spin(&id, spin),
    })
}

/// Motional displacement `D(γ) = exp(γa† − γ*a)` in the truncated basis.
///
/// The truncated generator is anti-Hermitian, so the result is exactly
/// unitary; agreement with the infinite-dimensional operator holds on the
/// leading block when `|γ|²` is small against the cutoff.
pub fn displacement_matrix(gamma: C64, basis: FockBasis) -> OperatorMatrix {
    let a = annihilation(basis.cutoff());
    let generator = a.adjoint() * gamma - a * gamma.conj();
    OperatorMatrix {
        basis,
        entries: lift(&basis, expm(&generator)),
    }
}

/// Lab-frame Hamiltonian
/// `H = (Δ/2)σ_z + a†a + (Ω/2)(σ₊e^{iηx̂} + σ₋e^{−iηx̂})`.
pub fn build_h_lab(p: &ModelParams, basis: FockBasis) -> Result<OperatorMatrix> {
    basis.require_spin()?;
    let c = basis.cutoff();
    let kick = expm(&(position(c) * C64::new(0.0, p.lamb_dicke)));
    let id = DMatrix::identity(c, c);
    let coupling = kron_motion_spin(&kick, &sigma_plus());
    let entries = kron_motion_spin(&id, &(sigma_z() * C64::from(p.detuning / 2.0)))
        + kron_motion_spin(&number(c), &Matrix2::identity())
        + (&coupling + coupling.adjoint()) * C64::from(p.rabi / 2.0);
    Ok(OperatorMatrix { basis, entries })
}

/// Transformed Hamiltonian
/// `H^I = (Ω/2)σ_z + a†a + g(a†+a)σ_x + εσ_x + g²`. Real symmetric.
pub fn build_h_transformed(p: &ModelParams, basis: FockBasis) -> Result<OperatorMatrix> {
    basis.require_spin()?;
    let c = basis.cutoff();
    let DerivedParams { g, eps } = derive_params(p);
    let id = DMatrix::identity(c, c);
    let entries = kron_motion_spin(&id, &(sigma_z() * C64::from(p.rabi / 2.0)))
        + kron_motion_spin(&number(c), &Matrix2::identity())
        + kron_motion_spin(&position(c), &(sigma_x() * C64::from(g)))
        + kron_motion_spin(&id, &(sigma_x() * C64::from(eps)))
        + DMatrix::identity(2 * c, 2 * c) * C64::from(g * g);
    Ok(OperatorMatrix { basis, entries })
}

/// The combined transform `UV` with `U = [[D, −D], [D†, D†]]` (rows and
/// columns ordered up, down), `D = exp(iηx̂/2)` and
/// `V = e^{−iπa†a/2}/√2`. `U/√2` is unitary, so `UV` is unitary and
/// `(UV)† H_lab (UV) = H^I`.
pub fn transform_uv(p: &ModelParams, basis: FockBasis) -> Result<OperatorMatrix> {
    basis.require_spin()?;
    let c = basis.cutoff();
    let d = expm(&(position(c) * C64::new(0.0, p.lamb_dicke / 2.0)));
    let d_dag = d.adjoint();
    // (−i)^m phase of column m.
    let phase = |m: usize| match m % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, -1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, 1.0),
    };
    let norm = std::f64::consts::FRAC_1_SQRT_2;
    let up = Spin::Up as usize;
    let entries = DMatrix::from_fn(2 * c, 2 * c, |i, j| {
        let (n, s) = (i / 2, i % 2);
        let (m, t) = (j / 2, j % 2);
        let block = match (s == up, t == up) {
            (true, true) => d[(n, m)],
            (true, false) => -d[(n, m)],
            (false, _) => d_dag[(n, m)],
        };
        block * phase(m) * norm
    });
    Ok(OperatorMatrix { basis, entries })
}
