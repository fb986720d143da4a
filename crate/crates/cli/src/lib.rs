//! Configuration, sweep orchestration, CSV output and plots for the
//! `opo` command.

pub mod commands;
pub mod config;
pub mod error;
pub mod plots;
pub mod sweep;
pub mod table;

pub use config::{Overrides, RunConfig};
pub use error::{CliError, ConfigError};
