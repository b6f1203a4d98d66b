//! Errors raised while loading configs, running experiments and writing reports.

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config {origin}: {message}")]
    Parse { origin: String, message: String },

    #[error("config field `{field}`: {message}")]
    Field { field: String, message: String },

    #[error("config not found: {0} (not a file and not a bundled config name)")]
    ConfigNotFound(String),

    #[error("config describes a `{found}` experiment but the subcommand is `{expected}`")]
    KindMismatch { expected: String, found: String },

    #[error("unsupported combination: {0}")]
    Unsupported(String),

    #[error("{context}: {source}")]
    Solver {
        context: String,
        #[source]
        source: helmscat_core::Error,
    },

    #[error("far-field file {path}: {message}")]
    FarFieldFormat { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("manifest serialization: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

pub(crate) fn field(name: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Field {
        field: name.into(),
        message: message.into(),
    }
}

/// Attaches a description of the failing step to core solver errors.
pub(crate) trait SolverContext<T> {
    fn context(self, what: impl FnOnce() -> String) -> Result<T>;
}

impl<T> SolverContext<T> for helmscat_core::Result<T> {
    fn context(self, what: impl FnOnce() -> String) -> Result<T> {
        self.map_err(|source| CliError::Solver { context: what(), source })
    }
}
