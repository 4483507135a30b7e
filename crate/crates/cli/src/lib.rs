//! Experiment runner for the `eqsep` library.
//!
//! [`config`] turns flags and TOML files into a resolved [`config::RunConfig`],
//! [`experiments`] computes long-format result rows, and [`output`] writes and
//! reads run directories. [`tools`] backs the dataset and model subcommands.

pub mod config;
pub mod experiments;
pub mod output;
pub mod tools;
