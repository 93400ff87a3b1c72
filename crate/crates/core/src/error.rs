use thiserror::Error;

/// Errors raised by the channel, state and protocol routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix has a negative eigenvalue {0:e}")]
    NegativeEigenvalue(f64),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid Pauli channel: {0}")]
    InvalidChannel(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("empty sample grid")]
    EmptyGrid,
}

pub type Result<T> = std::result::Result<T, Error>;
