use std::path::PathBuf;

use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] fearnet::Error),
    #[error("config {path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error("{key} points to {path}, which does not exist")]
    MissingPath { key: &'static str, path: PathBuf },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid option: {0}")]
    Invalid(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Config { .. } => "config",
            CliError::MissingPath { .. } => "missing_path",
            CliError::Io { .. } => "io",
            CliError::Invalid(_) => "invalid_option",
        }
    }

    fn path(&self) -> Option<PathBuf> {
        match self {
            CliError::Config { path, .. } | CliError::MissingPath { path, .. } | CliError::Io { path, .. } => Some(path.clone()),
            CliError::Core(fearnet::Error::Io { path, .. })
            | CliError::Core(fearnet::Error::Csv { path, .. })
            | CliError::Core(fearnet::Error::EmptyInput(path)) => Some(path.clone()),
            _ => None,
        }
    }

    /// Configuration and usage problems exit with 2, everything else with 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::MissingPath { .. } | CliError::Invalid(_) => 2,
            _ => 1,
        }
    }

    /// One-line machine-readable record for stderr.
    pub fn to_json(&self) -> String {
        json!({
            "error": {
                "kind": self.kind(),
                "message": self.to_string(),
                "path": self.path().map(|p| p.display().to_string()),
            }
        })
        .to_string()
    }
}

pub type CliResult<T> = Result<T, CliError>;
