use crate::solvers::TraceRecord;

/// Library-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite {quantity} at iteration {k}")]
    Divergence {
        quantity: String,
        k: usize,
        /// Telemetry collected up to the failure, for post-mortem.
        trace: Vec<TraceRecord>,
    },

    #[error("solver did not converge: {0}")]
    NotConverged(String),

    #[error("problem generation failed: {0}")]
    Generation(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("bad file format: {0}")]
    BadFormat(String),
}

pub type Result<T> = std::result::Result<T, Error>;
