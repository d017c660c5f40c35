//! Command-line pipeline over the `intertopo` library.
//!
//! Exit codes: 0 on success, 1 on an internal error, 2 on a usage or input
//! error. Output files are written only after every result is computed.

use std::fs;
use std::path::PathBuf;

use thiserror::Error;

pub mod commands;
pub mod config;
pub mod input;

pub use commands::Artifact;
pub use config::{Args, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Internal(_) => 1,
        }
    }
}

/// Loads the input, computes all artifacts, then writes them to `cfg.out`.
pub fn run(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let source = input::load(&cfg.input, cfg.format, cfg.groups.as_ref())?;
    let artifacts = commands::execute(cfg, &source)?;
    fs::create_dir_all(&cfg.out).map_err(|e| CliError::Internal(format!("cannot create {}: {e}", cfg.out.display())))?;
    artifacts
        .iter()
        .map(|a| {
            let path = cfg.out.join(&a.name);
            fs::write(&path, &a.contents).map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))?;
            Ok(path)
        })
        .collect()
}
