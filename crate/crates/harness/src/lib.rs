//! Experiment orchestration for the distance-rate laboratory: a JSON
//! configuration schema, scenario runners with deterministic file output,
//! log-log rate fitting, and the theorem-oracle check suite.

pub mod checks;
pub mod config;
pub mod output;
pub mod ratefit;
pub mod scenario;

pub use config::{ExperimentConfig, Scenario};
pub use scenario::{run, RunError, RunSummary};
