//! Command-line driver: configuration, orchestration and report files.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod suites;

pub use commands::{compare, dump_surface, run, validate, Status, Tolerance};
pub use error::{CliError, CliResult};
