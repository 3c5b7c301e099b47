use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("numerically singular: {0}")]
    Singular(String),
    #[error("spectral convention violated: {0}")]
    SpectralConvention(String),
    #[error("truncation window violated: {0}")]
    Truncation(String),
    #[error("not converged: {0}")]
    Convergence(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
