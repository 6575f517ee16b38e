use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("channel mismatch: expected {expected} channel(s), got {actual}")]
    ChannelMismatch { expected: usize, actual: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("scale mismatch: {0}")]
    ScaleMismatch(String),

    #[error("patch at ({row}, {col}) with side {side} exceeds {width}x{height} image")]
    OutOfBounds {
        row: usize,
        col: usize,
        side: usize,
        width: usize,
        height: usize,
    },

    #[error(
        "insufficient candidates: window holds {available} patch positions, {requested} requested"
    )]
    InsufficientCandidates { available: usize, requested: usize },

    #[error("output pixel (row {row}, col {col}) is not covered by any patch")]
    Coverage { row: usize, col: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("image too small: {0}")]
    ImageTooSmall(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    #[error("corrupt image file {path}: {reason}")]
    CorruptFile { path: PathBuf, reason: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for errors caused by file access or file contents.
    pub fn is_io(&self) -> bool {
        matches!(
            self,
            Error::UnsupportedFormat(_) | Error::CorruptFile { .. } | Error::Io { .. }
        )
    }

    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
