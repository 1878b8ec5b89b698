use super::{MeasurementRecord, RandomizedDataset};
use crate::qcore::{BasisString, SubsetIndex};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Which quantity a [`MomentEstimate`] refers to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum EstimateTarget {
    /// `E_U[P_U^2(s)]` for one string.
    P2 {
        string: String,
    },
    /// `E_U[P_U^2(s)]` averaged over the observed strings.
    P2Averaged {
        observed: usize,
    },
    /// `E_U[P_U(s) P_U(s')]`.
    Cross {
        s: String,
        s_prime: String,
    },
    /// `R^(2)_A`.
    R2 {
        subset: Vec<usize>,
    },
    Purity,
}

/// Sample mean of per-record estimates with the empirical variance of that mean.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub value: f64,
    pub variance_estimate: f64,
    pub m: usize,
    pub k: u64,
    pub target: EstimateTarget,
}

impl MomentEstimate {
    fn from_samples(values: &[f64], k: u64, target: EstimateTarget) -> Result<Self> {
        let m = values.len();
        if m == 0 {
            return Err(Error::InvalidArgument("empty dataset".into()));
        }
        let mean = values.iter().sum::<f64>() / m as f64;
        let variance_estimate = if m > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / ((m - 1) * m) as f64
        } else {
            0.0
        };
        Ok(Self {
            value: mean,
            variance_estimate,
            m,
            k,
            target,
        })
    }

    pub fn std_error(&self) -> f64 {
        self.variance_estimate.sqrt()
    }
}

/// `prod_{j<k} (Y - j) / (K - j)`, unbiased for `P^k` when `Y ~ Bin(K, P)`.
pub fn power_estimator_counts(y: u64, shots: u64, order: usize) -> Result<f64> {
    if shots < order as u64 {
        return Err(Error::InsufficientShots { order, shots });
    }
    Ok((0..order as u64)
        .map(|j| (y as f64 - j as f64) / (shots - j) as f64)
        .product())
}

/// `Y Y' / (K (K - 1))`, unbiased for `P(s) P(s')` with `s != s'`.
pub fn cross_estimator_counts(y: u64, y_prime: u64, shots: u64) -> Result<f64> {
    if shots < 2 {
        return Err(Error::InsufficientShots { order: 2, shots });
    }
    Ok((y as f64 * y_prime as f64) / (shots as f64 * (shots - 1) as f64))
}

/// Unbiased estimator `P~^(k)(s)` of `P_U(s)^k` from one record, `k` in 1..=4.
pub fn power_estimator(record: &MeasurementRecord, s: &BasisString, order: usize) -> Result<f64> {
    if !(1..=4).contains(&order) {
        return Err(Error::Unsupported(format!("power estimator of order {order}")));
    }
    record.check_string(s)?;
    power_estimator_counts(record.count(s), record.shots(), order)
}

/// Unbiased estimator `P~^(1,1)(s, s')` of `P_U(s) P_U(s')` from one record.
pub fn cross_estimator(record: &MeasurementRecord, s: &BasisString, s_prime: &BasisString) -> Result<f64> {
    record.check_string(s)?;
    record.check_string(s_prime)?;
    if s == s_prime {
        return Err(Error::InvalidArgument(
            "cross estimator needs distinct strings; use the power estimator".into(),
        ));
    }
    cross_estimator_counts(record.count(s), record.count(s_prime), record.shots())
}

fn check_string(data: &RandomizedDataset, s: &BasisString) -> Result<()> {
    data.records().first().map(|r| r.check_string(s)).unwrap_or(Ok(()))
}

/// Mean of `P~^(2)(s)` over the records.
pub fn estimate_p2(data: &RandomizedDataset, s: &BasisString) -> Result<MomentEstimate> {
    check_string(data, s)?;
    let values = data
        .records()
        .iter()
        .map(|r| power_estimator_counts(r.count(s), r.shots(), 2))
        .collect::<Result<Vec<_>>>()?;
    MomentEstimate::from_samples(&values, data.shots(), EstimateTarget::P2 { string: s.to_string() })
}

/// Mean of `P~^(1,1)(s, s')` over the records.
pub fn estimate_cross(data: &RandomizedDataset, s: &BasisString, s_prime: &BasisString) -> Result<MomentEstimate> {
    let values = data
        .records()
        .iter()
        .map(|r| cross_estimator(r, s, s_prime))
        .collect::<Result<Vec<_>>>()?;
    MomentEstimate::from_samples(
        &values,
        data.shots(),
        EstimateTarget::Cross {
            s: s.to_string(),
            s_prime: s_prime.to_string(),
        },
    )
}

/// `P~^(2)` averaged over the records and over the set `I` of strings observed at least once
/// anywhere in the dataset. `|I|` is reported in the target.
pub fn estimate_p2_avg(data: &RandomizedDataset) -> Result<MomentEstimate> {
    let observed: BTreeSet<usize> = data.records().iter().flat_map(|r| r.counts().keys().copied()).collect();
    let size = observed.len().max(1) as f64;
    let values = data
        .records()
        .iter()
        .map(|r| {
            // strings outside I have Y = 0 and contribute nothing
            let sum = r
                .counts()
                .values()
                .map(|&y| power_estimator_counts(y, r.shots(), 2))
                .sum::<Result<f64>>()?;
            Ok(sum / size)
        })
        .collect::<Result<Vec<_>>>()?;
    MomentEstimate::from_samples(
        &values,
        data.shots(),
        EstimateTarget::P2Averaged {
            observed: observed.len(),
        },
    )
}

/// `P~^(2)` averaged over the records and over all `d^N` strings. Unbiased for any `K`;
/// strings never observed contribute zero.
pub fn estimate_p2_all(data: &RandomizedDataset) -> Result<MomentEstimate> {
    let strings = (data.local_dim() as f64).powi(data.n_sites() as i32);
    let values = p2_all_record_values(data)?;
    MomentEstimate::from_samples(
        &values,
        data.shots(),
        EstimateTarget::P2Averaged {
            observed: strings as usize,
        },
    )
}

/// Per-record `d^{-N} sum_s P~^(2)(s)`.
pub fn p2_all_record_values(data: &RandomizedDataset) -> Result<Vec<f64>> {
    let strings = (data.local_dim() as f64).powi(data.n_sites() as i32);
    data.records()
        .iter()
        .map(|r| {
            let sum = r
                .counts()
                .values()
                .map(|&y| power_estimator_counts(y, r.shots(), 2))
                .sum::<Result<f64>>()?;
            Ok(sum / strings)
        })
        .collect()
}

/// Purity estimate of one record:
/// `d^N sum_{s,s'} (-d)^{-D(s,s')} P~(s,s')`, with `P~^(2)` on the diagonal and `P~^(1,1)`
/// off it. Pairs involving unobserved strings vanish and are skipped.
pub fn purity_record_estimate(record: &MeasurementRecord) -> Result<f64> {
    let (n, d, k) = (record.n_sites(), record.local_dim(), record.shots());
    if k < 2 {
        return Err(Error::InsufficientShots { order: 2, shots: k });
    }
    let seen: Vec<(Vec<usize>, u64)> = record
        .counts()
        .iter()
        .map(|(&idx, &y)| {
            (
                BasisString::decode(idx, n, d)
                    .digits()
                    .iter()
                    .map(|&x| x as usize)
                    .collect(),
                y,
            )
        })
        .collect();
    let weights: Vec<f64> = (0..=n).map(|dist| (-(d as f64)).powi(-(dist as i32))).collect();
    let norm = (k * (k - 1)) as f64;
    let mut total = 0.0;
    for (i, (si, yi)) in seen.iter().enumerate() {
        total += (*yi as f64) * (*yi as f64 - 1.0) / norm;
        for (sj, yj) in &seen[i + 1..] {
            let dist = si.iter().zip(sj).filter(|(a, b)| a != b).count();
            total += 2.0 * weights[dist] * (*yi as f64) * (*yj as f64) / norm;
        }
    }
    Ok((d as f64).powi(n as i32) * total)
}

/// Mean of the per-record purity estimates; unbiased for `tr rho^2`.
pub fn estimate_purity(data: &RandomizedDataset) -> Result<MomentEstimate> {
    let values = data
        .records()
        .iter()
        .map(purity_record_estimate)
        .collect::<Result<Vec<_>>>()?;
    MomentEstimate::from_samples(&values, data.shots(), EstimateTarget::Purity)
}

/// `(S^2 - K) / (K (K - 1))` for one record, where `S` sums the parity `(-1)^{sum_{i in A} s_i}`
/// over the shots. Unbiased for the squared correlator `<Z^{(x)A}>_U^2`.
pub fn r2_record_estimate(record: &MeasurementRecord, a: &SubsetIndex) -> Result<f64> {
    if record.local_dim() != 2 {
        return Err(Error::Unsupported("correlation pathway for d != 2".into()));
    }
    let n = record.n_sites();
    a.check_range(n)?;
    let k = record.shots();
    if k < 2 {
        return Err(Error::InsufficientShots { order: 2, shots: k });
    }
    // site i is bit n-1-i of the encoding
    let mask: usize = a.members().iter().fold(0, |m, &i| m | 1 << (n - 1 - i));
    let signed: i64 = record
        .counts()
        .iter()
        .map(|(&idx, &y)| {
            if (idx & mask).count_ones().is_multiple_of(2) {
                y as i64
            } else {
                -(y as i64)
            }
        })
        .sum();
    let s = signed as f64;
    Ok((s * s - k as f64) / (k as f64 * (k - 1) as f64))
}

/// Mean of the per-record squared-correlator estimates; unbiased for `R^(2)_A`.
pub fn estimate_r2(data: &RandomizedDataset, a: &SubsetIndex) -> Result<MomentEstimate> {
    let values = data
        .records()
        .iter()
        .map(|r| r2_record_estimate(r, a))
        .collect::<Result<Vec<_>>>()?;
    MomentEstimate::from_samples(
        &values,
        data.shots(),
        EstimateTarget::R2 {
            subset: a.members().to_vec(),
        },
    )
}
