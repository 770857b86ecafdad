use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide error type.
///
/// Variants map onto the CLI exit codes: `Usage` exits 1, `Numeric` exits 3,
/// everything else (malformed data, bad files, domain violations) exits 2.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a mathematical precondition (range, norm, shape of a value).
    #[error("domain error: {0}")]
    Domain(String),

    /// A file is structurally malformed (bad container, wrong channel count, truncated payload).
    #[error("{path}: {detail}")]
    Format { path: PathBuf, detail: String },

    /// A text input failed to parse; carries the 1-based line number.
    #[error("{path}:{line}: {detail}")]
    Parse {
        path: PathBuf,
        line: usize,
        detail: String,
    },

    /// Inputs are well-formed but inconsistent with each other or with dataset guarantees.
    #[error("data error: {0}")]
    Data(String),

    /// Array shapes do not line up.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A computation produced NaN or diverged.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Bad command-line invocation.
    #[error("usage error: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code the CLI reports for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 1,
            Error::Numeric(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
