use std::path::PathBuf;

/// Errors raised anywhere in the decomposition toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("series is empty")]
    EmptySeries,
    #[error("non-finite value at index {0}")]
    NonFiniteValue(usize),
    #[error("index labels must be strictly increasing (position {0})")]
    NonMonotoneIndex(usize),
    #[error("index has length {index} but series has length {values}")]
    IndexLength { index: usize, values: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("focus set is empty")]
    EmptyFocus,
    #[error("regression window [{start}, {end}] holds fewer than two points")]
    DegenerateWindow { start: usize, end: isize },
    #[error("percentile of an empty error set")]
    EmptyErrors,

    #[error("window {window} exceeds series length {len}")]
    WindowTooLarge { window: usize, len: usize },
    #[error("polynomial degree {0} exceeds the maximum of 5")]
    DegreeTooHigh(usize),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("series too short: length {len} must exceed window {window}")]
    SeriesTooShort { len: usize, window: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("index gap or non-monotone index at line {0}")]
    IndexGap(usize),
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Format {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
