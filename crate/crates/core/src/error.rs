use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("basis mismatch: expected {expected}, got {found}")]
    BasisMismatch { expected: String, found: String },

    /// The recurrences divide by g, so g = η/2 must be nonzero.
    #[error("series recurrence is singular at g = 0")]
    SingularRecurrence,

    #[error("restricted relation has no real solution (radicand {radicand:.6e})")]
    ConstraintInfeasible { radicand: f64 },

    #[error("constraint pole: {location} denominator is {value:.3e}")]
    Pole { location: &'static str, value: f64 },

    #[error("no terminated solution found after {iterations} iterations (best residual {residual:.3e})")]
    NoSolutionFound {
        iterations: usize,
        residual: f64,
        trace: Vec<f64>,
    },

    #[error("solution outside the physical domain: rabi = {rabi}")]
    OutOfDomain { rabi: f64 },

    #[error("degenerate special case: detuning and Rabi frequency both vanish")]
    DegenerateSpecialCase,

    #[error("matrix is not Hermitian (max |H - H†| = {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("truncation budget exceeded: {detail}")]
    Truncation { detail: String },

    #[error("spectrum is empty")]
    EmptySpectrum,
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
