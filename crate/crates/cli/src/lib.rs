//! Batch front-end for the evanescent-tunneling laboratory: TOML run
//! configs, experiment orchestration and CSV/JSON/SVG output.

pub mod config;
pub mod error;
pub mod output;
pub mod run;
pub mod suite;

pub use config::{parse_config, RunConfig};
pub use error::CliError;
pub use run::{render, run_experiment, Artifact, Experiment, Outcome};
