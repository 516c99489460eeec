use thiserror::Error;

/// Errors raised by the geometry, special-function, quadrature and solver layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("singular evaluation: {0}")]
    Singular(String),

    #[error("series did not converge after {terms} terms (last relative term {last_term:e})")]
    NonConvergence { terms: usize, last_term: f64 },

    #[error("non-finite integrand value at node {index}")]
    NonFinite { index: usize },

    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}
