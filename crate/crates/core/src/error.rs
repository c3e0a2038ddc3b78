//! Error type shared by all core modules.

use core::fmt;

/// Errors produced by simulation, data generation, statistics, and training.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A gate or readout referenced a qubit index outside the register.
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    /// A gate referenced a parameter slot outside the parameter vector.
    ParamOutOfRange { index: usize, len: usize },
    /// Two-qubit gate applied with identical control/target qubits.
    DuplicateQubits { qubit: usize },
    /// An input had an unexpected length or dimension.
    DimensionMismatch { expected: usize, actual: usize },
    /// A register size was below the supported minimum.
    TooFewQubits { n_qubits: usize, min: usize },
    /// A register size exceeded the configured memory guard.
    TooManyQubits { n_qubits: usize, max: usize },
    /// State amplitudes do not form a unit vector.
    NotNormalized,
    /// A numeric argument was outside its valid domain.
    InvalidArgument(&'static str),
    /// An iterative solver failed to reach its tolerance.
    ConvergenceFailure(&'static str),
    /// A point could not be assigned to any phase region.
    UnlabelledPoint,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::QubitOutOfRange { qubit, n_qubits } => {
                write!(f, "qubit index {qubit} out of range for {n_qubits} qubits")
            }
            Error::ParamOutOfRange { index, len } => {
                write!(
                    f,
                    "parameter index {index} out of range for {len} parameters"
                )
            }
            Error::DuplicateQubits { qubit } => {
                write!(
                    f,
                    "two-qubit gate requires distinct qubits, got {qubit} twice"
                )
            }
            Error::DimensionMismatch { expected, actual } => {
                write!(f, "dimension mismatch: expected {expected}, got {actual}")
            }
            Error::TooFewQubits { n_qubits, min } => {
                write!(f, "{n_qubits} qubits is below the minimum of {min}")
            }
            Error::TooManyQubits { n_qubits, max } => {
                write!(f, "{n_qubits} qubits exceeds the memory guard of {max}")
            }
            Error::NotNormalized => write!(f, "amplitudes do not have unit L2 norm"),
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::ConvergenceFailure(msg) => write!(f, "failed to converge: {msg}"),
            Error::UnlabelledPoint => write!(f, "point not contained in any phase region"),
        }
    }
}
