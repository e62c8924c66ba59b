//! Experiment harness and command line for the renewal-reward ratio
//! controller in [`rrate_core`].
//!
//! The harness runs many seeded sample paths of a policy in parallel,
//! aggregates them deterministically in path order, checks the finite-horizon
//! convergence bounds, and writes plot-ready CSV files.

pub mod cli;
pub mod error;
pub mod experiment;
pub mod goldens;
pub mod output;
pub mod probe;
pub mod report;

pub use error::{HarnessError, Result};
pub use experiment::{run_experiment, Experiment, ExperimentConfig, PolicyKind, RunSummary};
