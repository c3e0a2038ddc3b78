//! Error type carrying the process exit code.
//!
//! The contract is two failure classes: anything caused by arguments,
//! configuration files, or unreadable/invalid inputs exits with code 2;
//! numerical failures (an iterative solver not converging) exit with
//! code 3. Success is 0.

use std::fmt;
use std::path::Path;

use certiq_core::Error as CoreError;

/// A command failure with a definite exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// Usage, configuration, or input-data problem (exit code 2).
    Config(String),
    /// Numerical or convergence failure (exit code 3).
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    /// Annotates an I/O error with the operation and path it came from.
    pub fn io(action: &str, path: &Path, err: std::io::Error) -> Self {
        CliError::Config(format!("cannot {action} {}: {err}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "error: {msg}"),
            CliError::Numeric(msg) => write!(f, "numerical error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        match err {
            CoreError::ConvergenceFailure(_) => CliError::Numeric(err.to_string()),
            _ => CliError::Config(err.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(err: serde_json::Error) -> Self {
        CliError::Config(format!("invalid JSON: {err}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
