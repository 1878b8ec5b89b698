//! Output rows and their CSV/JSON writers.

use crate::config::Format;
use serde::{Deserialize, Serialize};
use std::io::Write;

pub const ROW_SCHEMA: &str = "rows-v1";
pub const SUITE_SCHEMA: &str = "validate-v1";

/// One result line. Columns are fixed; quantities that do not apply are left empty.
/// Stochastic rows carry `m`, `k` and `seed`; deterministic rows carry an `oracle` tag.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub schema: String,
    pub experiment: String,
    pub n: usize,
    pub family: String,
    pub quantity: String,
    pub m: Option<u64>,
    pub k: Option<u64>,
    pub seed: Option<u64>,
    pub rep: Option<usize>,
    pub estimate: Option<f64>,
    pub error_bar: Option<f64>,
    pub exact: Option<f64>,
    pub oracle: Option<String>,
    pub clamped: Option<bool>,
    pub pathway: Option<String>,
    pub gamma: Option<f64>,
    pub target: Option<f64>,
    pub cost: Option<f64>,
    pub ratio: Option<f64>,
    pub repetitions: Option<usize>,
    pub note: Option<String>,
    pub wall_ms: Option<f64>,
}

impl ResultRow {
    pub fn new(experiment: &str, n: usize, family: &str, quantity: &str) -> Self {
        Self {
            schema: ROW_SCHEMA.into(),
            experiment: experiment.into(),
            n,
            family: family.into(),
            quantity: quantity.into(),
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteRow {
    pub schema: String,
    pub suite: String,
    pub passed: bool,
    pub checks: usize,
    pub tolerance: String,
    pub max_deviation: f64,
    pub failures: usize,
    pub first_failure: Option<String>,
}

pub fn write_rows<T: Serialize, W: Write>(rows: &[T], format: Format, mut out: W) -> anyhow::Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for row in rows {
                w.serialize(row)?;
            }
            w.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, rows)?;
            writeln!(out)?;
        }
    }
    Ok(())
}
