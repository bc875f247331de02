//! Config handling and subcommand bodies for the `tclfano` binary.

pub mod commands;
pub mod config;

pub use config::{Config, ConfigError};
