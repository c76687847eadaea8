use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime (or exceeds the trial-division bound)")]
    NotPrime(u64),

    #[error("matrix is singular")]
    Singular,

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("boundary system is singular (det Omega = 0)")]
    SingularBoundary,

    #[error("window violation: {0}")]
    WindowViolation(String),

    #[error("sampler failed after {0} attempts")]
    SamplerExhausted(usize),

    #[error("enumeration bound exceeded: {0}")]
    BoundExceeded(String),

    /// Two independent computations of the same object disagreed.
    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_err(msg: impl Into<String>) -> Error {
    Error::Dimension(msg.into())
}
