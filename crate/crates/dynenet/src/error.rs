//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A malformed input row; `line` is 1-based within the offending file.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Structural violation of an input contract (month gaps, missing
    /// metadata, unknown class labels, ...).
    #[error("schema error: {0}")]
    Schema(String),

    /// A caller passed a value outside its documented range.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Numerically unusable state: non-finite inputs, singular systems.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Too little usable data to fit; callers route this to the fallback
    /// path rather than treating it as a failure.
    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the CLI: 2 for bad inputs, 3 for numeric
    /// failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numeric(_) => 3,
            _ => 2,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self, Error::Degenerate(_))
    }
}
