//! Library surface of the `otto-ion` command-line driver: config parsing and
//! experiment orchestration, kept separate from the binary so tests can call
//! them directly.

pub mod config;
pub mod run;

pub use config::{load_config, parse_config, parse_grid, write_config, SweepKind, SweepSpec};
pub use run::{emit_plotdata, run_experiment, run_validation, ExperimentOutcome};
