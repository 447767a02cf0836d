//! Command-line driver for the `tct-core` toolkit: instance utilities,
//! single runs, portfolio experiments and AHP ranking.

pub mod commands;
pub mod config;
pub mod error;
pub mod experiment;
pub mod instances;
pub mod report;

pub use error::{CliError, CliResult};
