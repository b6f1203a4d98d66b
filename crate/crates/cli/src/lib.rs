//! Experiment runner for the helmscat workbench: declarative TOML configs in,
//! deterministic CSV and JSON reports out.

pub mod config;
pub mod error;
pub mod io;
pub mod run;

pub use config::{load, ExperimentConfig, ExperimentKind, LoadedConfig, BUNDLED};
pub use error::{CliError, Result};
pub use run::execute;
