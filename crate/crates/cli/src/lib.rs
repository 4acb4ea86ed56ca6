//! Scenario runner for the chirality-qubit simulator: config parsing, figure
//! scenarios and their CSV/SVG/manifest outputs.

pub mod config;
pub mod output;
pub mod run;

pub use config::{resolve, ConfigError, Scenario, ScenarioConfig};
pub use run::{compute, run_scenario, RunError, RunOutput, RunReport};
