//! Harness-level errors and their mapping onto process exit codes.

use thiserror::Error;

/// Errors surfaced by the harness.
///
/// The variants correspond to the CLI exit-code contract: `Usage` exits
/// with 2, `Io` with 3, and `Internal` with 4.  Numeric failures inside a
/// sweep are *not* errors — they become records with flag status and the
/// process exits 0.
#[derive(Debug, Error)]
pub enum HarnessError {
    /// The invocation or configuration is invalid.
    #[error("{0}")]
    Usage(String),

    /// A file could not be read or written.
    #[error("{0}")]
    Io(String),

    /// An invariant of the harness or the underlying library was breached.
    #[error("{0}")]
    Internal(String),
}

impl HarnessError {
    /// The process exit code this error maps to.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Usage(_) => 2,
            HarnessError::Io(_) => 3,
            HarnessError::Internal(_) => 4,
        }
    }
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Io(e.to_string())
    }
}

impl From<unidym_core::Error> for HarnessError {
    fn from(e: unidym_core::Error) -> Self {
        HarnessError::Internal(format!("kernel failure: {e}"))
    }
}

/// Shorthand used across the harness.
pub type Result<T> = std::result::Result<T, HarnessError>;
