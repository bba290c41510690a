//! Scenario dispatch and the error-to-exit-code contract:
//! 0 success, 1 assertion failure, 2 config error, 3 budget exceeded
//! (including the Monte Carlo signal-to-noise guard), 4 quadrature failure.

mod certify;
mod check_lemmas;
mod esseen;
mod rate;
mod sphere_tails;

use std::path::PathBuf;
use thiserror::Error;

use cltlab_core::arithmetic::ArithmeticError;
use cltlab_core::charfun::CharfunError;
use cltlab_core::kolmogorov::KolmogorovError;
use cltlab_core::quad::QuadError;
use cltlab_core::sphere::SphereError;

use crate::config::{ConfigError, ExperimentConfig, Scenario};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("assertion failed: {0}")]
    Assertion(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("quadrature failure: {0}")]
    Quadrature(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("internal error: {0}")]
    Internal(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Assertion(_) => 1,
            RunError::Config(_) | RunError::Io(_) | RunError::Internal(_) => 2,
            RunError::Budget(_) => 3,
            RunError::Quadrature(_) => 4,
        }
    }
}

impl From<KolmogorovError> for RunError {
    fn from(e: KolmogorovError) -> Self {
        match e {
            KolmogorovError::BudgetExceeded { .. } => RunError::Budget(e.to_string()),
            other => RunError::Internal(other.to_string()),
        }
    }
}

impl From<CharfunError> for RunError {
    fn from(e: CharfunError) -> Self {
        match e {
            CharfunError::Quadrature(q) => RunError::Quadrature(q.to_string()),
            other => RunError::Internal(other.to_string()),
        }
    }
}

impl From<ArithmeticError> for RunError {
    fn from(e: ArithmeticError) -> Self {
        match e {
            ArithmeticError::Quadrature(q) => RunError::Quadrature(q.to_string()),
            other => RunError::Internal(other.to_string()),
        }
    }
}

impl From<SphereError> for RunError {
    fn from(e: SphereError) -> Self {
        match e {
            SphereError::Quadrature(q) => RunError::Quadrature(q.to_string()),
            other => RunError::Internal(other.to_string()),
        }
    }
}

impl From<QuadError> for RunError {
    fn from(e: QuadError) -> Self {
        RunError::Quadrature(e.to_string())
    }
}

/// What a scenario produced: the output files and the stdout report lines.
#[derive(Debug, Default)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub lines: Vec<String>,
}

/// Validate and run one experiment. Output files are byte-deterministic
/// functions of the configuration (seeds included), at any thread count.
pub fn run(config: &ExperimentConfig) -> Result<RunSummary, RunError> {
    config.validate()?;
    match config.scenario {
        Scenario::Rate => rate::run(config),
        Scenario::Certify => certify::run(config),
        Scenario::Esseen => esseen::run(config),
        Scenario::SphereTails => sphere_tails::run(config),
        Scenario::CheckLemmas => check_lemmas::run(config),
    }
}

/// Shared metadata block appended to every CSV.
fn standard_metadata(table: &mut crate::output::CsvTable, config: &ExperimentConfig) {
    table.meta("config_digest", config.digest());
    table.meta("version", env!("CARGO_PKG_VERSION"));
    table.meta("seed", config.seed.to_string());
}
