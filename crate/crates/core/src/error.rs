use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("insufficient input: {0}")]
    InsufficientInput(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("dimension mismatch: expected {expected}, got {actual} ({what})")]
    Dimension {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("room cannot achieve T60 = {t60} s (absorption coefficient {absorption} >= 1)")]
    UnreachableT60 { t60: f64, absorption: f64 },

    #[error("source and microphone coincide")]
    ZeroDistance,

    #[error("source signal is silent; SNR cannot be calibrated")]
    SilentSource,

    #[error("empty batch")]
    EmptyBatch,

    #[error("invalid config at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error(transparent)]
    Decode(#[from] crate::wire::DecodeError),

    #[error("wav error in {path}: {source}")]
    Wav {
        path: PathBuf,
        #[source]
        source: hound::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short stable identifier used in the CLI's machine-readable error summary.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InsufficientInput(_) => "insufficient_input",
            Error::Config(_) => "config",
            Error::Dimension { .. } => "dimension",
            Error::UnreachableT60 { .. } => "unreachable_t60",
            Error::ZeroDistance => "zero_distance",
            Error::SilentSource => "silent_source",
            Error::EmptyBatch => "empty_batch",
            Error::Schema { .. } => "schema",
            Error::Decode(_) => "decode",
            Error::Wav { .. } => "wav",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
            Error::Io(_) => "io",
        }
    }
}
