use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Model(#[from] hvmodel_core::Error),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("table mismatch at {cell}: expected {expected}, got {actual}")]
    TableMismatch { cell: String, expected: String, actual: String },
}

pub type Result<T, E = ExperimentError> = std::result::Result<T, E>;
