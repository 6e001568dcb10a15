//! File formats, experiment drivers and reports on top of `lpcat-core`.

pub mod config;
pub mod error;
pub mod format;
pub mod report;
pub mod run;
pub mod sample;
pub mod suite;

pub use config::ExperimentConfig;
pub use error::{CliError, CliResult};
