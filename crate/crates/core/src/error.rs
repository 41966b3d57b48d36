use thiserror::Error;

/// Errors surfaced by every module of the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("timestamps out of order at index {index}")]
    OutOfOrder { index: usize },

    #[error("series too short: need at least {needed} samples, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("no seasonal data for {bucket}")]
    EmptyBucket { bucket: String },

    #[error("all segments skipped at q={q}, s={scale}")]
    AllSegmentsSkipped { q: f64, scale: usize },

    #[error("did not converge after {iterations} iterations: {context}")]
    NonConvergence { iterations: usize, context: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! invalid {
    ($($arg:tt)*) => {
        return Err($crate::error::Error::InvalidArgument(format!($($arg)*)))
    };
}
pub(crate) use invalid;
