//! Experiments, report formats and the `hvmodel` command-line front end for
//! the hidden-variable model in `hvmodel-core`.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod report;

pub use error::{ExperimentError, Result};
