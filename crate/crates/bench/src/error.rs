use std::io;

use thiserror::Error;

pub type Result<T, E = BenchError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error(transparent)]
    Observer(#[from] splitobs::Error),
}

impl BenchError {
    /// Process exit status: 2 for configuration errors, 3 for I/O and
    /// malformed input, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) | BenchError::Observer(splitobs::Error::Config(_)) => 2,
            BenchError::Io(_) | BenchError::Csv(_) => 3,
            BenchError::InsufficientData(_) | BenchError::Observer(_) => 1,
        }
    }
}
