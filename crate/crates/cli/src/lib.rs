//! Batch experiment runner for the `micropolar` toolkit.

pub mod config;
pub mod experiments;
pub mod report;

pub use config::{parse_config, parse_config_with, ConfigError, Experiment, ExperimentConfig};
pub use experiments::{run_experiment, Check, Outcome, RunError};
