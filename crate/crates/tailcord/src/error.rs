use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors shared across the crate.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// Model parameters out of range or inconsistent with the family.
    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// Input outside the support of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Operation has no meaning for the given family.
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),

    /// Conditioning probability below the guard threshold.
    #[error("conditioning degenerate: {0}")]
    ConditioningDegenerate(String),

    /// Computation would lose all floating-point precision.
    #[error("precision loss: {0}")]
    PrecisionLoss(String),

    /// Paired sequences of unequal length.
    #[error("dimension mismatch: left {left}, right {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// Adaptive quadrature did not converge; carries the best estimate.
    #[error("quadrature did not converge: estimate {estimate}, error bound {error_bound}")]
    Quadrature { estimate: f64, error_bound: f64 },

    /// Empirical estimator could not be formed (e.g. empty conditioning set).
    #[error("estimation error: {0}")]
    Estimation(String),

    /// Inconsistent inputs to a validation routine.
    #[error("validation error: {0}")]
    Validation(String),
}
