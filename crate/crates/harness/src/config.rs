//! Experiment configuration: a single versioned JSON document.
//!
//! Experiments must be archivable and diffable, so everything that affects
//! output lives here; the only accepted overrides are the CLI flags for
//! output directory, seed, thread count and atom budget.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use thiserror::Error;

use cltlab_core::arithmetic::{theta_zero, CoefficientVector};
use cltlab_core::laws::{self, DiscreteLaw};
use cltlab_core::sphere::sample_direction;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config does not parse: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported spec_version {0}, expected 1")]
    SpecVersion(u32),
    #[error("config invalid: {0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Rate,
    Certify,
    Esseen,
    SphereTails,
    CheckLemmas,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Rate => "rate",
            Scenario::Certify => "certify",
            Scenario::Esseen => "esseen",
            Scenario::SphereTails => "sphere-tails",
            Scenario::CheckLemmas => "check-lemmas",
        }
    }
}

/// Law selection: a named preset ("rademacher", "bernoulli(p)",
/// "threepoint(a,p)") or an explicit atom list. Laws are standardized on
/// load.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LawSpec {
    Preset(String),
    Atoms { atoms: Vec<(f64, f64)> },
}

impl LawSpec {
    pub fn resolve(&self) -> Result<DiscreteLaw, ConfigError> {
        let raw = match self {
            LawSpec::Atoms { atoms } => DiscreteLaw::new(atoms.clone())
                .map_err(|e| ConfigError::Invalid(format!("law atoms: {e}")))?,
            LawSpec::Preset(name) => parse_preset(name)?,
        };
        laws::standardize(&raw).map_err(|e| ConfigError::Invalid(format!("law: {e}")))
    }
}

fn parse_preset(name: &str) -> Result<DiscreteLaw, ConfigError> {
    let name = name.trim();
    if name.eq_ignore_ascii_case("rademacher") {
        return Ok(DiscreteLaw::rademacher());
    }
    let bad = || ConfigError::Invalid(format!("unknown law preset \"{name}\""));
    let (kind, rest) = name.split_once('(').ok_or_else(bad)?;
    let args = rest.strip_suffix(')').ok_or_else(bad)?;
    let values: Vec<f64> = args
        .split(',')
        .map(|a| a.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    match (kind.trim().to_ascii_lowercase().as_str(), values.as_slice()) {
        ("bernoulli", [p]) => {
            DiscreteLaw::bernoulli(*p).map_err(|e| ConfigError::Invalid(e.to_string()))
        }
        ("threepoint", [a, p]) => {
            DiscreteLaw::three_point(*a, *p).map_err(|e| ConfigError::Invalid(e.to_string()))
        }
        _ => Err(bad()),
    }
}

/// Coefficient-vector selection.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThetaSpec {
    Named(String),
    Random { random: u64 },
    Explicit { explicit: Vec<f64> },
}

impl ThetaSpec {
    pub fn is_uniform(&self) -> bool {
        matches!(self, ThetaSpec::Named(s) if s == "uniform")
    }

    pub fn is_theta0(&self) -> bool {
        matches!(self, ThetaSpec::Named(s) if s == "theta0")
    }

    pub fn resolve(&self, n: usize) -> Result<CoefficientVector, ConfigError> {
        match self {
            ThetaSpec::Named(s) if s == "uniform" => Ok(CoefficientVector::uniform(n)),
            ThetaSpec::Named(s) if s == "theta0" => {
                theta_zero(n).map_err(|e| ConfigError::Invalid(e.to_string()))
            }
            ThetaSpec::Named(s) => Err(ConfigError::Invalid(format!(
                "unknown theta spec \"{s}\" (expected \"uniform\" or \"theta0\")"
            ))),
            ThetaSpec::Random { random } => Ok(sample_direction(n, *random)),
            ThetaSpec::Explicit { explicit } => {
                if explicit.len() != n {
                    return Err(ConfigError::Invalid(format!(
                        "explicit theta has {} coordinates, n = {n}",
                        explicit.len()
                    )));
                }
                CoefficientVector::new(explicit.clone())
                    .map_err(|e| ConfigError::Invalid(e.to_string()))
            }
        }
    }
}

fn default_budget() -> u64 {
    1 << 26
}
fn default_seed() -> u64 {
    42
}
fn default_out() -> PathBuf {
    PathBuf::from("out")
}
fn default_grid_step() -> f64 {
    1e-4
}
fn default_r_tol() -> f64 {
    0.01
}
fn default_esseen_ts() -> Vec<f64> {
    vec![2.0, 4.0, 8.0, 16.0, 32.0]
}
fn default_be_constant() -> f64 {
    0.56
}
fn default_mc_samples() -> u64 {
    100_000
}
fn default_alpha() -> f64 {
    0.05
}
fn default_tail_samples() -> u64 {
    100_000
}
fn default_middle_c() -> f64 {
    1.0
}
fn default_tail_r2_min() -> f64 {
    0.9
}
fn default_quantile_n() -> usize {
    12
}
fn default_quantile_directions() -> u64 {
    200
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub spec_version: u32,
    pub scenario: Scenario,
    pub law: LawSpec,
    pub theta: ThetaSpec,
    pub ns: Vec<usize>,
    #[serde(default = "default_budget")]
    pub budget: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    /// Certifier grid step (snapped down to a power of two internally).
    #[serde(default = "default_grid_step")]
    pub grid_step: f64,
    /// Multiplicative tolerance of the bisection for the minimal level.
    #[serde(default = "default_r_tol")]
    pub r_tol: f64,
    /// Fixed condition level for the certify scenario; absent = search.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    /// Smoothing-bound windows; the reported bound is the minimum over the
    /// sweep.
    #[serde(default = "default_esseen_ts")]
    pub esseen_ts: Vec<f64>,
    /// Constant of the classical reference bound.
    #[serde(default = "default_be_constant")]
    pub be_constant: f64,
    #[serde(default = "default_mc_samples")]
    pub mc_samples: u64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_tail_samples")]
    pub tail_samples: u64,
    /// Middle-segment constant of the regime diagnostics.
    #[serde(default = "default_middle_c")]
    pub middle_c: f64,
    /// Rate-slope acceptance window; defaults depend on the theta spec.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope_max: Option<f64>,
    /// Expected certificate outcome ("certified" | "refuted"); absent = no
    /// assertion.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_outcome: Option<String>,
    /// Also export per-n CDF tables (t, F, Phi, gap) in the rate scenario.
    #[serde(default)]
    pub export_cdf: bool,
    #[serde(default = "default_tail_r2_min")]
    pub tail_r2_min: f64,
    /// Dimension for the distance-quantile report over random directions.
    #[serde(default = "default_quantile_n")]
    pub quantile_n: usize,
    /// Number of sampled directions in that report.
    #[serde(default = "default_quantile_directions")]
    pub quantile_directions: u64,
}

impl ExperimentConfig {
    /// Built-in defaults per scenario; used when no config file is given.
    pub fn default_for(scenario: Scenario) -> Self {
        let (law, theta, ns): (LawSpec, ThetaSpec, Vec<usize>) = match scenario {
            Scenario::Rate => (
                LawSpec::Preset("rademacher".into()),
                ThetaSpec::Named("theta0".into()),
                vec![8, 12, 16, 20, 24],
            ),
            Scenario::Certify => (
                LawSpec::Preset("rademacher".into()),
                ThetaSpec::Named("theta0".into()),
                vec![8, 16, 32, 64],
            ),
            Scenario::Esseen => (
                LawSpec::Preset("rademacher".into()),
                ThetaSpec::Named("uniform".into()),
                vec![2, 4, 8, 12],
            ),
            Scenario::SphereTails => (
                LawSpec::Preset("bernoulli(0.25)".into()),
                ThetaSpec::Named("uniform".into()),
                vec![32],
            ),
            Scenario::CheckLemmas => (
                LawSpec::Preset("rademacher".into()),
                ThetaSpec::Named("uniform".into()),
                vec![8],
            ),
        };
        Self {
            spec_version: 1,
            scenario,
            law,
            theta,
            ns,
            budget: default_budget(),
            seed: default_seed(),
            out: default_out(),
            grid_step: default_grid_step(),
            r_tol: default_r_tol(),
            r: None,
            esseen_ts: default_esseen_ts(),
            be_constant: default_be_constant(),
            mc_samples: default_mc_samples(),
            alpha: default_alpha(),
            tail_samples: default_tail_samples(),
            middle_c: default_middle_c(),
            slope_min: None,
            slope_max: None,
            expect_outcome: None,
            export_cdf: false,
            tail_r2_min: default_tail_r2_min(),
            quantile_n: default_quantile_n(),
            quantile_directions: default_quantile_directions(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let config: Self = serde_json::from_str(&text)?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.spec_version != 1 {
            return Err(ConfigError::SpecVersion(self.spec_version));
        }
        if self.ns.is_empty() {
            return Err(ConfigError::Invalid("n list is empty".into()));
        }
        if self.ns.contains(&0) {
            return Err(ConfigError::Invalid("n values must be positive".into()));
        }
        {
            let mut sorted = self.ns.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != self.ns.len() {
                return Err(ConfigError::Invalid("n values must be distinct".into()));
            }
        }
        if self.theta.is_theta0() && self.ns.iter().any(|&n| n % 4 != 0) {
            return Err(ConfigError::Invalid(
                "theta0 requires every n divisible by 4".into(),
            ));
        }
        if let ThetaSpec::Explicit { explicit } = &self.theta {
            if self.ns.len() != 1 || self.ns[0] != explicit.len() {
                return Err(ConfigError::Invalid(
                    "explicit theta requires ns = [len(theta)]".into(),
                ));
            }
        }
        if !(self.grid_step > 0.0 && self.grid_step <= 1e-2) {
            return Err(ConfigError::Invalid(format!(
                "grid_step {} outside (0, 1e-2]",
                self.grid_step
            )));
        }
        if self.r_tol < 1e-3 {
            return Err(ConfigError::Invalid(format!(
                "r_tol {} below 1e-3",
                self.r_tol
            )));
        }
        if let Some(r) = self.r {
            if r < 1.0 {
                return Err(ConfigError::Invalid(format!("r {r} below 1")));
            }
        }
        if !(0.0 < self.alpha && self.alpha < 1.0) {
            return Err(ConfigError::Invalid(format!(
                "alpha {} outside (0, 1)",
                self.alpha
            )));
        }
        if self.mc_samples < 1_000 {
            return Err(ConfigError::Invalid("mc_samples below 1000".into()));
        }
        if self.tail_samples < 10_000 {
            return Err(ConfigError::Invalid("tail_samples below 10^4".into()));
        }
        if self.quantile_n < 2 {
            return Err(ConfigError::Invalid("quantile_n below 2".into()));
        }
        if self.quantile_directions < 50 {
            return Err(ConfigError::Invalid("quantile_directions below 50".into()));
        }
        if self.esseen_ts.is_empty() || self.esseen_ts.iter().any(|&t| t <= 0.0) {
            return Err(ConfigError::Invalid(
                "esseen_ts must be nonempty and positive".into(),
            ));
        }
        if self.be_constant <= 0.0 {
            return Err(ConfigError::Invalid("be_constant must be positive".into()));
        }
        if let Some(e) = &self.expect_outcome {
            if e != "certified" && e != "refuted" {
                return Err(ConfigError::Invalid(format!(
                    "expect_outcome \"{e}\" (expected \"certified\" or \"refuted\")"
                )));
            }
        }
        // resolve law and each theta once so errors surface as config errors
        self.law.resolve()?;
        for &n in &self.ns {
            self.theta.resolve(n)?;
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON serialization; recorded in every
    /// output file. The output directory names a location, not an
    /// experiment, so it is excluded.
    pub fn digest(&self) -> String {
        let mut canonical = self.clone();
        canonical.out = PathBuf::new();
        let text = serde_json::to_string(&canonical).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(text.as_bytes());
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}
