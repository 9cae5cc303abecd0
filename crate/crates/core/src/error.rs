//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Mismatched array lengths or grids.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A coupling reduction degenerated (zero or wrong-sign scale factor).
    #[error("degenerate coupling reduction: {0}")]
    Degenerate(String),

    /// Iterative solver failed to converge.
    #[error("convergence failure: {0} (last residual {residual:.3e})", residual = .1)]
    Convergence(String, f64),

    /// A linear system or eigensolve could not be completed.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A constructed object failed its validation check.
    #[error("construction error: {0}")]
    Construction(String),

    /// The time integration produced non-finite values.
    #[error("blow-up detected at t = {0}")]
    BlowUp(f64),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }
}
