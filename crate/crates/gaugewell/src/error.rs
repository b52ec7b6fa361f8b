//! Error taxonomy for the crate.
//!
//! Validation-type errors (bad arguments, times outside a tabulated range,
//! malformed configuration) are distinguished from numerical failures
//! (non-converged root brackets, singular linear solves, degenerate
//! separations) so the CLI can map them to different exit codes.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A coordinate or time lies outside its admissible range.
    #[error("out of range: {0}")]
    Range(String),

    /// Bad run configuration (unknown keys, missing fields, inconsistent sizes).
    #[error("configuration error: {0}")]
    Config(String),

    /// An iterative numerical procedure failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A wavepacket left the trustworthy part of the grid window.
    #[error("horizon error: {0}")]
    Horizon(String),

    /// A classification or analysis routine could not reach a verdict.
    #[error("analysis error: {0}")]
    Analysis(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid_argument(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn range(msg: impl Into<String>) -> Self {
        Error::Range(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    /// Exit code the CLI should use for this error: 2 for validation
    /// problems, 3 for numerical ones.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) | Error::Range(_) | Error::Config(_) => 2,
            Error::Numerical(_) | Error::Horizon(_) | Error::Analysis(_) => 3,
            Error::Io(_) | Error::Json(_) => 2,
        }
    }
}
