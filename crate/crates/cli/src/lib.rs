//! Command-line front end for the diminishing process toolkit: run
//! configuration, CSV emission and the subcommand bodies.

pub mod commands;
pub mod config;
mod error;
pub mod output;

pub use error::{CliError, Result};
