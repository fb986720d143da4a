use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl ConfigError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        ConfigError::Invalid(msg.into())
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot write {path}: {source}")]
    OutputUnwritable {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("plot {path}: {message}")]
    Plot { path: PathBuf, message: String },
    #[error("solver failed: {0}")]
    Solver(#[from] opo_core::Error),
    #[error("{failed} of {total} sweep points failed")]
    SweepPointsFailed { failed: usize, total: usize },
    #[error("{0} validation check(s) failed")]
    ValidationFailed(usize),
    #[error("cannot start worker pool: {0}")]
    WorkerPool(String),
}

impl CliError {
    /// 0 success, 1 configuration, 2 solver or output failure, 3 failed validation.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::ValidationFailed(_) => 3,
            _ => 2,
        }
    }

    pub fn output(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::OutputUnwritable { path: path.into(), source }
    }
}
