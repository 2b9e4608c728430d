//! Library half of the `qlga` command-line tool: experiment configuration,
//! the scenario registry, and deterministic data emission.  The binary in
//! `main.rs` is a thin argument-parsing shell over these modules.

pub mod config;
pub mod error;
pub mod output;
pub mod runner;
pub mod scenarios;

pub use config::{ExperimentConfig, InitialKind, OutputKind, PotentialKind, SweepSpec};
pub use error::CliError;
pub use output::{Format, RunSink, Table};
pub use scenarios::{registry, Scenario};
