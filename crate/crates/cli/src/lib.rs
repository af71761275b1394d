//! Command-line front end: configuration, subcommands and report output.

pub mod commands;
pub mod config;
pub mod report;
