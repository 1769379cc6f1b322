//! Command implementations for the `monodyn` binary.

pub mod commands;
pub mod report;
pub mod spec;

pub use commands::{CliError, Output, Overrides, Settings};
pub use spec::MapSpec;
