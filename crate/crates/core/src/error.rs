use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the simulator.
///
/// Variants map to the error classes surfaced by the CLI, so keep the
/// `class()` names stable.
#[derive(Debug, Error)]
pub enum Error {
    #[error("missing dataset file {}", .0.display())]
    MissingFile(PathBuf),

    #[error("corrupt dataset {dataset}: {reason}")]
    CorruptDataset { dataset: String, reason: String },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("undefined statistic: {0}")]
    UndefinedStatistic(String),

    #[error("undefined embedding: {0}")]
    UndefinedEmbedding(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("client {0} has no training graphs")]
    EmptyClient(usize),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short machine-readable error class used for CLI diagnostics.
    pub fn class(&self) -> &'static str {
        match self {
            Error::MissingFile(_) => "IngestionError",
            Error::CorruptDataset { .. } => "CorruptDatasetError",
            Error::Argument(_) => "ArgumentError",
            Error::UndefinedStatistic(_) => "UndefinedStatisticError",
            Error::UndefinedEmbedding(_) => "UndefinedEmbeddingError",
            Error::Config(_) => "ConfigurationError",
            Error::EmptyClient(_) => "ClientSkip",
            Error::Io(_) => "IoError",
            Error::Csv(_) => "IoError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
