use std::fmt;

/// A failure with the process exit code it maps to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_VALIDATION,
            message: message.into(),
        }
    }

    pub fn no_convergence(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_NO_CONVERGENCE,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<iontrap_core::Error> for CliError {
    fn from(e: iontrap_core::Error) -> Self {
        use iontrap_core::Error as E;
        match e {
            E::NoSolutionFound {
                iterations,
                residual,
                ref trace,
            } => {
                let trace: Vec<String> = trace.iter().map(|r| crate::format::fmt_g(*r)).collect();
                CliError::no_convergence(format!(
                    "no solution found after {iterations} iterations (best residual {}); residual trace: [{}]",
                    crate::format::fmt_g(residual),
                    trace.join(", ")
                ))
            }
            other => CliError::usage(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
