//! Config-driven experiment runner for the `hororadon` binary.

pub mod config;
pub mod run;

pub use config::{Command, ConfigError, ExperimentConfig, FunctionSpec};
pub use run::{run, Check, Failure, Outcome, Report, RunOptions, EXIT_CONFIG, EXIT_IO, EXIT_NUMERICAL, EXIT_OK};
