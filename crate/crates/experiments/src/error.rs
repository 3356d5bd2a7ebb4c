use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    /// Bad config value; the message starts with the field path.
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] ptcd_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("schema violation in {file}: {reason}")]
    Schema { file: String, reason: String },
}

impl RunError {
    pub fn config(field: &str, msg: impl std::fmt::Display) -> Self {
        RunError::Config(format!("{field}: {msg}"))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numerical(_) => 3,
            RunError::Io(_) | RunError::Schema { .. } => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, RunError>;
