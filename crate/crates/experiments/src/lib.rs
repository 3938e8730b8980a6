//! Batch experiments for the QITE / MT-QITE emulator: TOML configs, seeded
//! initial-state batches, CSV and JSON results, and the `mtqite` CLI.

pub mod cli;
pub mod config;
pub mod runner;
pub mod setup;

use mtqite_core::QiteError;
use thiserror::Error;

pub use config::ExperimentConfig;
pub use runner::{run_experiment, write_outputs, ExperimentOutput, ResultRow, Summary};
pub use setup::{generate_initial_batch, prepare, Derived, Setup};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("runtime error: {0}")]
    Runtime(#[from] QiteError),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A batch member failed; `output` holds the runs that completed.
    #[error("{source}")]
    Partial {
        output: Box<ExperimentOutput>,
        source: Box<ExperimentError>,
    },
}

impl ExperimentError {
    /// 1 for configuration problems, 2 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_) => 1,
            ExperimentError::Partial { source, .. } => source.exit_code(),
            _ => 2,
        }
    }
}
