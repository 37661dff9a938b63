//! Error types shared across the crate.

use crate::mdpd::FitResult;

/// Errors produced by estimation, testing, and simulation routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An input lies outside the mathematical domain of an operation
    /// (e.g. a non-positive observation passed to a log-normal density).
    #[error("domain error: {0}")]
    Domain(String),

    /// An argument violates a documented precondition that is not a
    /// domain restriction (sample sizes, fractions, resample counts).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The sample carries no usable spread (all observations equal).
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    /// The requested method does not apply for the given tuning value.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The optimizer exhausted its budget without meeting the gradient
    /// tolerance. Carries the best iterate found for diagnosis.
    #[error("optimizer did not converge: {message}")]
    NonConvergence {
        message: String,
        best: Box<FitResult>,
    },

    /// A numerical guard tripped (singular matrix, invalid intermediate).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A structural precondition does not hold (e.g. a parameter vector
    /// that must lie on the null constraint surface does not).
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
