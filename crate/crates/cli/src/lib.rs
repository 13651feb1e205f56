//! File formats, experiment orchestration and the `graphfold` command line
//! on top of [`graphfold_core`].

pub mod error;
pub mod format;
pub mod harness;

pub use error::{CliError, CliResult};
