//! Experiment runner for `oqsim-core`: JSON configs, end-to-end pipelines,
//! CSV plot data, and the acceptance suite.

// Negated comparisons are how NaN is made to fail the guards.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod config;
pub mod output;
pub mod parallel;
pub mod runner;

pub use config::ExperimentConfig;
pub use runner::{run_experiment, run_experiment_with, ResultBundle, StageError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(String),
    #[error("malformed config: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("unknown output series {0:?}")]
    UnknownSeries(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OutputError {
    #[error("unknown output series {0:?}")]
    UnknownSeries(String),
    #[error("cannot write output: {0}")]
    Io(String),
}
