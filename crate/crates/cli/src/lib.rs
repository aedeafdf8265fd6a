//! Command-line front end for the BPD pipeline: dataset synthesis, feature
//! export, clustering, the factorial experiment, and SVG reports.
//!
//! Exit codes: 0 success, 2 configuration error (bad flags, bad config
//! file, invalid synthesis spec), 3 data error (missing or malformed data
//! and result files).

pub mod charts;
pub mod commands;
pub mod config;

use std::fmt;
use std::path::{Path, PathBuf};

pub use config::RunConfig;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
        }
    }

    pub(crate) fn data(err: impl fmt::Display) -> CliError {
        CliError::Data(err.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Data(msg) => write!(f, "data error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Loads the configuration file (or defaults) and applies flag overrides.
pub fn load_config(
    config_path: Option<&Path>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    jobs: Option<usize>,
) -> Result<RunConfig, CliError> {
    let mut config = match config_path {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(out) = out {
        config.out_dir = out;
    }
    if let Some(seed) = seed {
        config.master_seed = seed;
    }
    if let Some(jobs) = jobs {
        config.jobs = jobs;
    }
    Ok(config)
}
