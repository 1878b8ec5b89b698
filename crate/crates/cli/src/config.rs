//! Experiment configuration file (TOML) and its merge with command-line flags.
//!
//! Precedence for every overridable field: command-line flag, then environment
//! (`RANDMEAS_SEED` for the seed only), then the config file, then the built-in default.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const SEED_ENV: &str = "RANDMEAS_SEED";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// A single `N`, a list, or an inclusive range `{ from = 2, to = 12 }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Sizes {
    One(usize),
    Many(Vec<usize>),
    Range { from: usize, to: usize },
}

impl Sizes {
    pub fn to_vec(&self) -> Vec<usize> {
        match self {
            Sizes::One(n) => vec![*n],
            Sizes::Many(v) => v.clone(),
            Sizes::Range { from, to } => (*from..=*to).collect(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
    /// Adds wall-clock milliseconds to each row; off by default so output stays reproducible.
    pub timing: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSection {
    /// `ghz`, `product`, `haar`, or a circuit family (`uni`, `clifford`, `mg`, `iqp2`).
    pub family: Option<String>,
    pub n: Option<Sizes>,
    /// Gate count `T` for sampled circuits.
    pub depth: Option<usize>,
    /// Circuit file in the JSON circuit format; overrides `family` and `n`.
    pub circuit: Option<PathBuf>,
    /// Recorded dataset (JSON lines) to estimate from instead of simulating.
    pub dataset: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetSection {
    pub m: Option<u64>,
    pub k: Option<u64>,
    pub gamma: Option<f64>,
    /// Relative error target used by the planner when `m` and `k` are absent.
    pub target: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    pub eps1: f64,
    pub eps2: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanSection {
    pub targets: Option<Vec<f64>>,
    /// Haar states averaged per `N` for the haar family.
    pub haar_states: Option<usize>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathwayChoice {
    #[default]
    Auto,
    Pure,
    MixedBound,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateSection {
    pub pathway: Option<PathwayChoice>,
    /// Writes the dataset of the first repetition of the first `N`.
    pub dataset_out: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarianceSection {
    pub m: Option<Vec<u64>>,
    pub k: Option<Vec<u64>>,
    /// Any of `p2`, `cross`, `p2-avg`.
    pub estimators: Option<Vec<String>>,
    /// Protocol repetitions for the empirical comparison; 0 reports analytic values only.
    pub mc_repetitions: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSection {
    pub circuits_out: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateSection {
    pub pathway_states: Option<usize>,
    pub variance_repetitions: Option<usize>,
    pub variance_tolerance: Option<f64>,
    pub skip_variance: Option<bool>,
    /// Runs the unbiasedness suite against a deliberately biased estimator.
    pub negative_control: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Option<String>,
    pub seed: Option<u64>,
    pub repetitions: Option<usize>,
    pub workers: Option<usize>,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub state: StateSection,
    #[serde(default)]
    pub budget: BudgetSection,
    pub noise: Option<NoiseSection>,
    #[serde(default)]
    pub plan: PlanSection,
    #[serde(default)]
    pub estimate: EstimateSection,
    #[serde(default)]
    pub variance: VarianceSection,
    #[serde(default)]
    pub ensemble: EnsembleSection,
    #[serde(default)]
    pub validate: ValidateSection,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
    }
}

/// Flag, then environment, then config.
pub fn resolve_seed(flag: Option<u64>, env: Option<&str>, config: Option<u64>) -> Result<Option<u64>, ConfigError> {
    if flag.is_some() {
        return Ok(flag);
    }
    if let Some(raw) = env.filter(|v| !v.trim().is_empty()) {
        return raw
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| ConfigError(format!("{SEED_ENV}={raw:?} is not a u64")));
    }
    Ok(config)
}
