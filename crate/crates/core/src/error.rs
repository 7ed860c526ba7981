use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {0} is not a power of two >= 2")]
    Dimension(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("Weyl composition law violated (deviation {deviation:e})")]
    AlgebraViolation { deviation: f64 },
    #[error("{qubits} qubits exceeds the dense verification cap of {cap}")]
    VerificationScale { qubits: usize, cap: usize },
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("augmentation window needs at least 2 qubits, got {0}")]
    WindowTooSmall(usize),
    #[error("invalid augmentation window: {0}")]
    InvalidWindow(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("encoding failed: {0}")]
    Encoding(String),
    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("eigensolver did not converge")]
    NoConvergence,
    #[error("component count {k} out of range 1..={dim}")]
    ComponentsOutOfRange { k: usize, dim: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
