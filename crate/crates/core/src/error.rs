use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the library and the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid bitstring: {0}")]
    InvalidBitString(String),

    #[error("invalid noise spec `{0}`")]
    InvalidNoise(String),

    #[error("probability {name}={value} outside [0, 1]")]
    ProbabilityOutOfRange { name: &'static str, value: f64 },

    #[error("schedule `{schedule}` is undefined for n={n} (requires n >= 2)")]
    ScheduleDomain { schedule: String, n: usize },

    #[error("invalid schedule `{0}`")]
    InvalidSchedule(String),

    #[error("pmf support of {points} points exceeds the convolution guard of {limit}")]
    SupportTooLarge { points: usize, limit: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid run config: {0}")]
    InvalidRunConfig(String),

    #[error("invalid experiment config: {0}")]
    InvalidConfig(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
