//! Command-line front end for `dce-core`: option layering, CSV/JSON output,
//! parallel grid evaluation and the verification battery.

pub mod cli;
pub mod config;
pub mod error;
pub mod output;
pub mod parallel;
pub mod plot;
pub mod verify;

pub use error::{CliError, CliResult};
