use thiserror::Error;

/// Errors raised by the library. The CLI maps these onto exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("polynomial is not divisible (remainder norm {remainder:e})")]
    NonDivisible { remainder: f64 },
    #[error("moment sequence is not positive definite at Hankel index {index}")]
    NotPositiveDefinite { index: usize },
    #[error("need {needed} moments, have {available}")]
    InsufficientMoments { needed: usize, available: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error("quadrature did not converge: {0}")]
    QuadratureNonConvergence(String),
    #[error("factorized expansion mismatch: {0}")]
    ExpansionMismatch(String),
    #[error("kernel basis is not an interpolating system for the given points")]
    NotInterpolating,
    #[error("expected {expected} interpolation points, got {got}")]
    WrongPointCount { expected: usize, got: usize },
    #[error("Chebyshev coefficient below the tail does not vanish: index {index}, value {value:e}")]
    TailViolation { index: usize, value: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    /// True for errors caused by malformed input rather than by the mathematics.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::InvalidOperator(_)
                | Error::Parse(_)
                | Error::WrongPointCount { .. }
                | Error::Unsupported(_)
                | Error::InsufficientMoments { .. }
                | Error::Precondition(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
