//! Simulation of the randomized measurement protocol and its unbiased estimators.
//!
//! A dataset holds `M` records. Each record is one local setting `U = U_0 (x) ... (x) U_{N-1}`
//! and the histogram of `K` computational-basis outcomes measured on `U rho U^dag`.

mod design;
mod estimators;
mod io;

pub use design::{exact_clifford_r2, exact_pauli_r2, pauli_expectation};
pub use estimators::{
    cross_estimator, cross_estimator_counts, estimate_cross, estimate_p2, estimate_p2_all, estimate_p2_avg,
    estimate_purity, estimate_r2, p2_all_record_values, power_estimator, power_estimator_counts,
    purity_record_estimate, r2_record_estimate, EstimateTarget, MomentEstimate,
};
pub use io::{read_dataset, write_dataset, DATASET_FORMAT};

use crate::haar::sample_local_setting;
use crate::qcore::{outcome_distribution, BasisString, LocalSetting, State};
use crate::rng::{substream, SimRng};
use crate::{Error, Result};
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use std::collections::BTreeMap;

/// One randomized setting together with its `K`-shot outcome histogram.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementRecord {
    setting: LocalSetting,
    /// Counts keyed by the integer encoding of the outcome string; zero counts are omitted.
    counts: BTreeMap<usize, u64>,
    shots: u64,
}

impl MeasurementRecord {
    pub fn new(setting: LocalSetting, counts: BTreeMap<usize, u64>) -> Result<Self> {
        let dim = setting.local_dim().pow(setting.n_sites() as u32);
        if let Some((&idx, _)) = counts.iter().find(|(&idx, _)| idx >= dim) {
            return Err(Error::DimensionMismatch(format!(
                "outcome index {idx} for a register of dimension {dim}"
            )));
        }
        let counts: BTreeMap<usize, u64> = counts.into_iter().filter(|&(_, c)| c > 0).collect();
        let shots = counts.values().sum();
        if shots == 0 {
            return Err(Error::InvalidArgument("a record needs at least one shot".into()));
        }
        Ok(Self { setting, counts, shots })
    }

    pub fn setting(&self) -> &LocalSetting {
        &self.setting
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn counts(&self) -> &BTreeMap<usize, u64> {
        &self.counts
    }

    /// `Y(s)`, the number of shots that produced `s`.
    pub fn count(&self, s: &BasisString) -> u64 {
        self.count_index(s.encode())
    }

    pub fn count_index(&self, index: usize) -> u64 {
        self.counts.get(&index).copied().unwrap_or(0)
    }

    pub fn n_sites(&self) -> usize {
        self.setting.n_sites()
    }

    pub fn local_dim(&self) -> usize {
        self.setting.local_dim()
    }

    fn check_string(&self, s: &BasisString) -> Result<()> {
        if s.len() != self.n_sites() || s.local_dim() != self.local_dim() {
            return Err(Error::DimensionMismatch(format!(
                "string of length {} (d={}) for a record on {} sites (d={})",
                s.len(),
                s.local_dim(),
                self.n_sites(),
                self.local_dim()
            )));
        }
        Ok(())
    }
}

/// `M` records sharing `(N, d, K)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomizedDataset {
    n: usize,
    d: usize,
    shots: u64,
    seed: Option<u64>,
    records: Vec<MeasurementRecord>,
}

impl RandomizedDataset {
    pub fn new(n: usize, d: usize, seed: Option<u64>, records: Vec<MeasurementRecord>) -> Result<Self> {
        let shots = records
            .first()
            .map(|r| r.shots())
            .ok_or_else(|| Error::InvalidArgument("empty dataset".into()))?;
        for r in &records {
            if r.n_sites() != n || r.local_dim() != d {
                return Err(Error::DimensionMismatch(format!(
                    "record on {} sites (d={}) in a dataset for {n} sites (d={d})",
                    r.n_sites(),
                    r.local_dim()
                )));
            }
            if r.shots() != shots {
                return Err(Error::InvalidArgument(format!(
                    "records with {} and {shots} shots",
                    r.shots()
                )));
            }
        }
        Ok(Self {
            n,
            d,
            shots,
            seed,
            records,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n
    }

    pub fn local_dim(&self) -> usize {
        self.d
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn settings_count(&self) -> usize {
        self.records.len()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn records(&self) -> &[MeasurementRecord] {
        &self.records
    }
}

/// Draw a `K`-trial multinomial histogram from `probs` by a chain of conditional binomials.
pub fn sample_multinomial<R: Rng + ?Sized>(probs: &[f64], shots: u64, rng: &mut R) -> BTreeMap<usize, u64> {
    let mut out = BTreeMap::new();
    let mut left = shots;
    let mut mass: f64 = probs.iter().map(|p| p.max(0.0)).sum();
    for (i, &p) in probs.iter().enumerate() {
        if left == 0 {
            break;
        }
        let p = p.max(0.0);
        if p == 0.0 {
            continue;
        }
        let q = if mass > 0.0 { (p / mass).min(1.0) } else { 1.0 };
        let y = if q >= 1.0 {
            left
        } else {
            Binomial::new(left, q).expect("probability in [0, 1]").sample(rng)
        };
        if y > 0 {
            out.insert(i, y);
        }
        left -= y;
        mass -= p;
    }
    if left > 0 {
        // rounding left a remainder; assign it to the most likely outcome
        let best = probs
            .iter()
            .enumerate()
            .fold(0, |b, (i, &p)| if p > probs[b] { i } else { b });
        *out.entry(best).or_insert(0) += left;
    }
    out
}

fn measure(state: &State, setting: LocalSetting, shots: u64, rng: &mut SimRng) -> Result<MeasurementRecord> {
    let probs = outcome_distribution(state, &setting)?;
    let counts = sample_multinomial(&probs, shots, rng);
    MeasurementRecord::new(setting, counts)
}

fn check_budget(m: usize, k: u64) -> Result<()> {
    if m == 0 || k == 0 {
        return Err(Error::InvalidArgument(format!(
            "M = {m} and K = {k} must both be positive"
        )));
    }
    Ok(())
}

/// `M` i.i.d. Haar-random local settings with `K` shots each. Record `i` draws its setting
/// and its shots from substream `i` of `seed`.
pub fn run_protocol(state: &State, m: usize, k: u64, seed: u64) -> Result<RandomizedDataset> {
    check_budget(m, k)?;
    let (n, d) = (state.n_sites(), state.local_dim());
    let records = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i as u64);
            let setting = sample_local_setting(n, d, &mut rng);
            measure(state, setting, k, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    RandomizedDataset::new(n, d, Some(seed), records)
}

/// Same as [`run_protocol`] with caller-supplied settings, e.g. identity or Pauli bases.
pub fn run_protocol_with_settings(
    state: &State,
    settings: &[LocalSetting],
    k: u64,
    seed: u64,
) -> Result<RandomizedDataset> {
    check_budget(settings.len(), k)?;
    let records = settings
        .par_iter()
        .enumerate()
        .map(|(i, setting)| {
            let mut rng = substream(seed, i as u64);
            measure(state, setting.clone(), k, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    RandomizedDataset::new(state.n_sites(), state.local_dim(), Some(seed), records)
}
