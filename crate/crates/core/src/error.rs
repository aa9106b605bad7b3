use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    /// Malformed input; `line` is 1-based.
    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("invalid space file: {0}")]
    SpaceFormat(String),

    #[error("space file version mismatch: expected {expected}, found {found}")]
    VersionMismatch { expected: String, found: String },

    #[error("record {sentence_id}: {message}")]
    Record { sentence_id: String, message: String },

    #[error("empty period stream: no records for period {0}")]
    EmptyPeriodStream(String),

    #[error("statistics: {0}")]
    Stats(String),

    #[error("config: {0}")]
    Config(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl AsRef<Path>, source: io::Error) -> Self {
        Error::Io {
            path: path.as_ref().to_path_buf(),
            source,
        }
    }

    pub(crate) fn parse(source_name: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            source_name: source_name.into(),
            line,
            message: message.into(),
        }
    }

    /// Short machine-readable category, used by the CLI's error line.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Parse { .. } => "parse",
            Error::Validation(_) => "validation",
            Error::Precondition(_) => "precondition",
            Error::DimMismatch { .. } => "dim_mismatch",
            Error::SpaceFormat(_) => "space_format",
            Error::VersionMismatch { .. } => "version_mismatch",
            Error::Record { .. } => "record",
            Error::EmptyPeriodStream(_) => "empty_period_stream",
            Error::Stats(_) => "stats",
            Error::Config(_) => "config",
            Error::Usage(_) => "usage",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}
