use thiserror::Error;

/// Errors raised by the numerical kernels and the model layers built on them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma function pole at {0}")]
    Pole(f64),
    #[error("{0} overflows the double range")]
    Overflow(String),
    #[error("contour placement failed: {0}")]
    ContourPlacement(String),
    #[error("no convergence in {what}: estimate {estimate:e}, discrepancy {discrepancy:e}")]
    NonConvergence {
        what: String,
        estimate: f64,
        discrepancy: f64,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degenerate shape ordering: {0}")]
    DegenerateOrder(String),
    #[error("method {method} unavailable: {reason}")]
    MethodUnavailable { method: String, reason: String },
    #[error("series would need {count} terms, above the limit of {limit}")]
    TermCountOverflow { count: u128, limit: u128 },
    #[error("insufficient asymptotic regime: {0}")]
    InsufficientRegime(String),
    #[error("degenerate variance in moment fit")]
    DegenerateVariance,
    #[error("quadrature failed: {0}")]
    Quadrature(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
