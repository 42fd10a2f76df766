//! File formats, configuration, parallel evaluation and the command-line
//! front end for the `risae-core` simulator.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checkpoint;
pub mod commands;
pub mod config;
mod error;
pub mod gains;
pub mod output;
pub mod parallel;

pub use config::ExperimentConfig;
pub use error::{CliError, Result};
