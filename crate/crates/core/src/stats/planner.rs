use super::{cantelli_delta, propagate_to_concurrence, variance_p2, FamilyRegistry, MomentBundle, MomentFamily};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Exponents of the planner grid `{10^1, ..., 10^16}` for both `M` and `K`.
pub const GRID_EXPONENTS: std::ops::RangeInclusive<u32> = 1..=16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementBudget {
    pub m: u64,
    pub k: u64,
    pub gamma: f64,
    pub target_rel_err: f64,
}

/// Planner output for one `N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanReport {
    pub n: usize,
    pub family: String,
    pub gamma: f64,
    pub target_rel_err: f64,
    pub m: u64,
    pub k: u64,
    pub predicted_delta_c: f64,
    pub c_ref: f64,
    /// `M K` as a float; exceeds `u64` at the top of the grid.
    pub cost: f64,
}

impl PlanReport {
    pub fn budget(&self) -> MeasurementBudget {
        MeasurementBudget {
            m: self.m,
            k: self.k,
            gamma: self.gamma,
            target_rel_err: self.target_rel_err,
        }
    }
}

/// `delta_C` for the single-string `E[P^2]` estimator at budget `(M, K)`.
pub fn predicted_delta_c(bundle: &MomentBundle, m: u64, k: u64, gamma: f64) -> Result<f64> {
    let var = variance_p2(bundle, m, k)?.variance;
    let delta = cantelli_delta(var, gamma)?;
    propagate_to_concurrence(delta, bundle.power_moment(2)?, bundle.n, bundle.d)
}

/// Cheapest grid pair with `delta_C <= target * C_ref`; among pairs of equal `M K` the one
/// with fewer settings wins.
pub fn plan_budget_for(family: &dyn MomentFamily, n: usize, target_rel_err: f64, gamma: f64) -> Result<PlanReport> {
    if target_rel_err.is_nan() || target_rel_err <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "target relative error {target_rel_err}"
        )));
    }
    let c_ref = family.reference_concurrence(n).filter(|c| *c > 0.0).ok_or_else(|| {
        Error::Unsupported(format!(
            "family '{}' has no nonzero reference concurrence",
            family.name()
        ))
    })?;
    let bundle = family.bundle(n)?;
    let tolerance = target_rel_err * c_ref;
    let (lo, hi) = (*GRID_EXPONENTS.start(), *GRID_EXPONENTS.end());
    for total in 2 * lo..=2 * hi {
        for em in lo..=hi {
            let ek = match total.checked_sub(em) {
                Some(ek) if (lo..=hi).contains(&ek) => ek,
                _ => continue,
            };
            let (m, k) = (10u64.pow(em), 10u64.pow(ek));
            let delta_c = predicted_delta_c(&bundle, m, k, gamma)?;
            if delta_c <= tolerance {
                return Ok(PlanReport {
                    n,
                    family: family.name().into(),
                    gamma,
                    target_rel_err,
                    m,
                    k,
                    predicted_delta_c: delta_c,
                    c_ref,
                    cost: m as f64 * k as f64,
                });
            }
        }
    }
    Err(Error::NoFeasibleBudget(format!(
        "family '{}', N = {n}, target {target_rel_err}, gamma {gamma}",
        family.name()
    )))
}

/// [`plan_budget_for`] with a family from the default registry.
pub fn plan_budget(family: &str, n: usize, target_rel_err: f64, gamma: f64) -> Result<PlanReport> {
    plan_budget_for(FamilyRegistry::default().get(family)?, n, target_rel_err, gamma)
}
