use thiserror::Error;

/// Errors raised by the metrology toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("zero vector cannot be normalized")]
    ZeroNorm,

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("matrix is not unitary: {0}")]
    NotUnitary(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("quantity is undefined: {0}")]
    Undefined(String),

    #[error("search did not converge: {0}")]
    NoConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
