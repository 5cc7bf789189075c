//! Configuration, file formats, post-hoc checks, and command
//! implementations for the nonlocal transport simulator CLI.

pub mod checks;
pub mod commands;
pub mod config;
pub mod series;
pub mod snapshot;

pub use config::{ConfigError, InitialData, RunConfig};
