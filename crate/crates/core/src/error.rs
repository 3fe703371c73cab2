//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument violated a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested operation is not supported by the transceiver hardware.
    #[error("capability error: {0}")]
    Capability(String),

    /// Scenario text could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Scenario parsed but violates regulatory constraints.
    #[error("scenario fails regulatory validation:\n{0}")]
    Validation(crate::regulatory::ValidationReport),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code for the CLI: validation failures are distinguished
    /// from parse and I/O problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) => 1,
            _ => 2,
        }
    }
}
