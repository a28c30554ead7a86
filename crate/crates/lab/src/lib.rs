//! Experiment harness for `pps-core`: parameter sweeps over problem
//! complexity, CSV reports, instance files, configuration and the `pps`
//! command-line tool.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiment;
pub mod format;
pub mod numfmt;
pub mod report;

pub use error::{LabError, Result};
pub use experiment::{
    aggregate, run_sweep, sweep_map, Cell, ProblemKind, RunRecord, SweepConfig, SweepSummary,
};
