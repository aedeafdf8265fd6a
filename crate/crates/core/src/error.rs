//! Crate-wide error type.

use std::path::PathBuf;

/// Errors produced by the pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A malformed row in an input file; `line` is 1-based and counts the
    /// header line.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// An input violated a schema invariant (non-monotone timestamps,
    /// off-grid annotations, duplicate slots, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// A caller passed an argument outside an operation's precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A non-finite sample reached feature extraction.
    #[error("non-finite sample at axis {axis}, index {index}")]
    NonFiniteSample { axis: usize, index: usize },

    /// A prediction was requested for a BPD the bank was never trained on.
    /// Callers decide the fallback; the bank never guesses silently.
    #[error("no classifier trained for BPD {0}")]
    MissingBpd(usize),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
