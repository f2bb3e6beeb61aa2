use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("sequence of length {0} is too short, at least 2 values are required")]
    TooShort(usize),

    #[error("values at positions {0} and {1} are tied")]
    TiedValues(usize, usize),

    #[error("value at position {0} is not finite")]
    NonFinite(usize),

    #[error("time series is empty")]
    EmptySeries,

    #[error("series length {0} exceeds the supported maximum of 2^31-1")]
    SeriesTooLong(usize),

    #[error("invalid pattern: {0}")]
    InvalidPattern(String),

    #[error("pattern bit string is empty")]
    EmptyPattern,

    #[error("window starting at {start} with length {len} exceeds series length {n}")]
    OutOfBounds { start: usize, len: usize, n: usize },

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("minimum support must be at least 1, got {0}")]
    InvalidMinsup(usize),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("input contains no data")]
    EmptyInput,

    #[error("line {0}: expected a label and at least one value")]
    RaggedInput(usize),

    #[error(
        "moving-average window {window} is invalid for a series of length {n}; it must be odd and between 1 and n"
    )]
    BadWindow { window: usize, n: usize },

    #[error("cannot form {k} clusters from {rows} rows")]
    BadK { k: usize, rows: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
