//! Command implementations behind the `tropteich` binary.

pub mod commands;
pub mod formats;

use std::path::PathBuf;

use thiserror::Error;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] tropteich::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> CliError {
        CliError::Io { path: path.into(), source }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Structured,
    Dot,
}

/// Settings shared by the subcommands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    pub genus: usize,
    pub seed: u64,
    pub radius: usize,
    pub cache_dir: PathBuf,
    pub format: Format,
}

pub const DEFAULT_SEED: u64 = 20_240_601;

impl Config {
    pub fn new(genus: usize) -> Config {
        Config { genus, seed: DEFAULT_SEED, radius: 0, cache_dir: default_cache_dir(), format: Format::Structured }
    }
}

pub fn default_cache_dir() -> PathBuf {
    std::env::temp_dir().join("tropteich-cache")
}
