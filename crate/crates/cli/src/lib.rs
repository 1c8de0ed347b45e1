//! Library side of the `translab` binary: run configuration, commands and
//! error reporting.

pub mod commands;
pub mod config;
pub mod error;
