//! Figure-level experiment runners behind the `ptcd` command.

pub mod config;
pub mod error;
pub mod output;
pub mod runners;
pub mod schema;

pub use config::{ExperimentConfig, ExperimentKind, Overrides, Settings};
pub use error::{Result, RunError};
