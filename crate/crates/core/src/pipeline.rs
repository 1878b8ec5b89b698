//! End-to-end estimation: randomized measurements on a state, moment estimation, and the
//! concurrence (pure pathway) or its lower bound (mixed pathway) with a Cantelli error bar.

use crate::concurrence::{p2_scale, ConcurrenceEstimate, Pathway};
use crate::protocol::{estimate_p2_all, p2_all_record_values, purity_record_estimate, run_protocol, RandomizedDataset};
use crate::qcore::State;
use crate::stats::{cantelli_delta, propagate_to_concurrence};
use crate::Result;

/// Half-width of the image of `[x - delta, x + delta]` under `scale * sqrt(max(0, .))`,
/// taking the wider side.
fn sqrt_interval_half_width(x: f64, delta: f64, scale: f64) -> f64 {
    let root = |v: f64| scale * v.max(0.0).sqrt();
    let centre = root(x);
    (root(x + delta) - centre).max(centre - root(x - delta))
}

/// Pure-state concurrence from the string-averaged `E[P^2]` estimate. The error bar is the
/// Cantelli half-width of `E[P^2]` (confidence `gamma`) propagated to `C`; when the estimate
/// is too close to the product value for linear propagation, the interval is mapped through
/// the square root instead.
pub fn concurrence_from_dataset(data: &RandomizedDataset, gamma: f64) -> Result<ConcurrenceEstimate> {
    let (n, d) = (data.n_sites(), data.local_dim());
    let est = estimate_p2_all(data)?;
    let delta = cantelli_delta(est.variance_estimate, gamma)?;
    let c = crate::concurrence::concurrence_from_p2(est.value, n, d);
    let error_bar = match propagate_to_concurrence(delta, est.value, n, d) {
        Ok(e) if 1.0 - p2_scale(n, d) * (est.value + delta) > 0.0 => e,
        _ => sqrt_interval_half_width(1.0 - p2_scale(n, d) * est.value, p2_scale(n, d) * delta, 2.0),
    };
    Ok(c.with_error_bar(error_bar))
}

/// Mixed-state lower bound from one dataset. Each record yields an unbiased estimate of the
/// squared bound, `2^{2-N}(1 - 2^N c p~2) + (4 - 2^{2-N}) purity~`; their mean is the estimate
/// and their empirical variance sets the Cantelli half-width, mapped through the square root.
pub fn mixed_bound_from_dataset(data: &RandomizedDataset, gamma: f64) -> Result<ConcurrenceEstimate> {
    let (n, d) = (data.n_sites(), data.local_dim());
    let p2 = p2_all_record_values(data)?;
    let coeff = 2f64.powi(2 - n as i32);
    let scale = p2_scale(n, d) * 2f64.powi(n as i32);
    let values = data
        .records()
        .iter()
        .zip(&p2)
        .map(|(r, &p)| Ok(coeff * (1.0 - scale * p) + (4.0 - coeff) * purity_record_estimate(r)?))
        .collect::<Result<Vec<f64>>>()?;
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / ((m - 1.0) * m)
    } else {
        0.0
    };
    let delta = cantelli_delta(var, gamma)?;
    Ok(ConcurrenceEstimate::from_squared(mean, Pathway::MixedBoundRandmeas)
        .with_error_bar(sqrt_interval_half_width(mean, delta, 1.0)))
}

/// Runs the protocol and assembles the pure-state concurrence.
pub fn estimate_pure_concurrence(
    state: &State,
    m: usize,
    k: u64,
    gamma: f64,
    seed: u64,
) -> Result<ConcurrenceEstimate> {
    concurrence_from_dataset(&run_protocol(state, m, k, seed)?, gamma)
}

/// Runs the protocol and assembles the mixed-state lower bound.
pub fn estimate_mixed_bound(state: &State, m: usize, k: u64, gamma: f64, seed: u64) -> Result<ConcurrenceEstimate> {
    mixed_bound_from_dataset(&run_protocol(state, m, k, seed)?, gamma)
}
