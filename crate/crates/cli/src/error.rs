use std::path::PathBuf;

use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Compute(#[from] fas_core::Error),
    #[error("cannot read config {path}: {msg}")]
    Config { path: PathBuf, msg: String },
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Serialize)]
struct ErrorLine<'a> {
    error: &'a str,
    message: String,
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Validation(_) => "validation",
            CliError::Compute(_) => "compute",
            CliError::Config { .. } => "config",
            CliError::Io { .. } => "io",
        }
    }

    /// One line of JSON, suitable for stderr.
    pub fn to_json_line(&self) -> String {
        let line = ErrorLine {
            error: self.kind(),
            message: self.to_string(),
        };
        serde_json::to_string(&line).expect("error line serializes")
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}
