//! Error type shared by all solver and tensor operations.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TenspecError {
    /// Dimension or order mismatch between operands.
    #[error("shape error: {0}")]
    Shape(String),

    /// Input violates a mathematical precondition (nonpositive vector,
    /// missing diagonal, hypothesis failure, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative method exhausted its budget. Carries the best bounds
    /// or residual reached so callers can decide whether to accept.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// The exact algorithm would exceed its hard size cap.
    #[error("capability limit: {0}")]
    Capability(String),

    /// Malformed input file or JSON payload.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, TenspecError>;
