//! Pipeline stages behind the `wsi` command.
//!
//! Every stage reads its inputs from a work directory, writes its artifacts
//! there, and records the effective configuration as `<stage>.config.json`.

pub mod config;
pub mod inspect;
pub mod stages;

use std::path::PathBuf;

/// Stage failures, mapped to process exit codes by [`CliError::exit_code`].
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    MissingArtifact { path: PathBuf, producer: &'static str },
    Runtime(wsi_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::MissingArtifact { .. } => 3,
            CliError::Runtime(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::MissingArtifact { path, producer } => {
                write!(f, "missing artifact {} (run `wsi {producer}` first)", path.display())
            }
            CliError::Runtime(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<wsi_core::Error> for CliError {
    fn from(e: wsi_core::Error) -> Self {
        CliError::Runtime(e)
    }
}
