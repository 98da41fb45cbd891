//! Configuration-driven front end for the `flatfront` kernel: builds base
//! fronts, runs λ-sweeps, runs the validation suite and exports meshes.

pub mod commands;
pub mod config;
pub mod error;
pub mod export;

pub use commands::{run, Command, Outcome, Overrides};
pub use config::{ExportFormat, ProjectionModel, RunConfig};
pub use error::CliError;
