//! Command-line front end, parallel drivers and file formats for the loop
//! cluster-state simulator in [`loopsim_core`].

pub mod cli;
pub mod config;
pub mod emit;
pub mod error;
pub mod parallel;
pub mod tally;

pub use error::{CliError, Result};
