//! Configuration, file formats and commands for the `freqlab` binary.

pub mod config;
pub mod error;
pub mod io;
pub mod run;

pub use config::ExperimentConfig;
pub use error::CliError;
pub use run::{run, Command, Invocation};
