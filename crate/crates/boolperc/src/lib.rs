//! Experiment runner for the Boolean-model estimators in `boolperc-core`.
//!
//! A run reads one experiment configuration (TOML, or JSON by file
//! extension), executes it on a rayon worker pool and writes CSV, JSON and SVG
//! artifacts. Numeric outputs depend only on the configuration and the master
//! seed, never on the worker count.

// estimator signatures take the sampling parameters positionally; negated
// float comparisons are deliberate so that NaN falls into the rejecting branch
#![allow(clippy::too_many_arguments, clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod config;
pub mod experiments;
pub mod output;
pub mod runner;

pub use config::{ConfigError, ExperimentConfig, Kind};
pub use experiments::{run_experiment, RunError, RunOutput};
pub use runner::Parallel;
