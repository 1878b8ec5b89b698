//! Closed-form variances of the moment estimators, Cantelli error bars, propagation to
//! the concurrence and the `(M, K)` budget planner.

mod bundle;
mod planner;

pub use bundle::{
    analytic_moment_bundle, FamilyRegistry, GhzFamily, HaarFamily, MomentBundle, MomentFamily, ProductFamily,
    Provenance, CROSS_ORDERS,
};
pub use planner::{plan_budget, plan_budget_for, predicted_delta_c, MeasurementBudget, PlanReport, GRID_EXPONENTS};

use crate::concurrence::p2_scale;
use crate::qcore::BasisString;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarianceFormula {
    /// Single-string `E[P^2]` estimator.
    P2,
    /// Cross estimator `P~^(1,1)`.
    Cross,
    /// String-averaged `E[P^2]` estimator, approximated as `Var_p2 / |I|`.
    P2Averaged,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceReport {
    pub variance: f64,
    pub m: u64,
    pub k: u64,
    pub formula: VarianceFormula,
    pub family: String,
    pub n: usize,
    /// `|I|` for the averaged estimator.
    pub support: Option<u64>,
    pub approximate: bool,
}

fn check_budget(m: u64, k: u64) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidArgument("M must be positive".into()));
    }
    if k < 4 {
        return Err(Error::InsufficientShots { order: 4, shots: k });
    }
    Ok(())
}

/// `[(K-2)(K-3) E[P^4] + 4(K-2) E[P^3] + 2 E[P^2]] / (M K (K-1)) - E[P^2]^2 / M`.
pub fn variance_p2(bundle: &MomentBundle, m: u64, k: u64) -> Result<VarianceReport> {
    check_budget(m, k)?;
    let (e2, e3, e4) = (
        bundle.power_moment(2)?,
        bundle.power_moment(3)?,
        bundle.power_moment(4)?,
    );
    let (mf, kf) = (m as f64, k as f64);
    let second = ((kf - 2.0) * (kf - 3.0) * e4 + 4.0 * (kf - 2.0) * e3 + 2.0 * e2) / (kf * (kf - 1.0));
    Ok(VarianceReport {
        variance: ((second - e2 * e2) / mf).max(0.0),
        m,
        k,
        formula: VarianceFormula::P2,
        family: bundle.family.clone(),
        n: bundle.n,
        support: None,
        approximate: false,
    })
}

/// `[(K-2)(K-3) E[P^2 P'^2] + (K-2)(E[P^2 P'] + E[P P'^2]) + E[P P']] / (M K (K-1)) - E[P P']^2 / M`.
pub fn variance_cross(
    bundle: &MomentBundle,
    s: &BasisString,
    s_prime: &BasisString,
    m: u64,
    k: u64,
) -> Result<VarianceReport> {
    check_budget(m, k)?;
    if s == s_prime {
        return Err(Error::InvalidArgument("cross variance needs distinct strings".into()));
    }
    let c = |t, q| bundle.cross_moment_for(t, q, s, s_prime);
    let (e11, e21, e12, e22) = (c(1, 1)?, c(2, 1)?, c(1, 2)?, c(2, 2)?);
    let (mf, kf) = (m as f64, k as f64);
    let second = ((kf - 2.0) * (kf - 3.0) * e22 + (kf - 2.0) * (e21 + e12) + e11) / (kf * (kf - 1.0));
    Ok(VarianceReport {
        variance: ((second - e11 * e11) / mf).max(0.0),
        m,
        k,
        formula: VarianceFormula::Cross,
        family: bundle.family.clone(),
        n: bundle.n,
        support: None,
        approximate: false,
    })
}

/// `Var_p2 / |I|` with `|I| = min(2^N, K)`, neglecting correlations between strings. Only
/// accepted for the Haar family, where those correlations are exponentially small.
pub fn variance_p2_avg(bundle: &MomentBundle, m: u64, k: u64) -> Result<VarianceReport> {
    if bundle.family != "haar" {
        return Err(Error::Unsupported(format!(
            "string-averaged variance approximation for the '{}' family (only 'haar')",
            bundle.family
        )));
    }
    let mut report = variance_p2(bundle, m, k)?;
    let strings = if bundle.n >= 63 { u64::MAX } else { 1u64 << bundle.n };
    let support = strings.min(k);
    report.variance /= support as f64;
    report.formula = VarianceFormula::P2Averaged;
    report.support = Some(support);
    report.approximate = true;
    Ok(report)
}

/// Two-sided Cantelli half-width `sqrt((1 + gamma) / (1 - gamma) Var)` holding with
/// probability at least `gamma`.
pub fn cantelli_delta(variance: f64, gamma: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::InvalidArgument(format!("confidence {gamma} outside [0, 1)")));
    }
    if variance.is_nan() || variance < 0.0 {
        return Err(Error::InvalidArgument(format!("variance {variance}")));
    }
    Ok(((1.0 + gamma) / (1.0 - gamma) * variance).sqrt())
}

/// `|dC/dp2| delta` for `C = 2 sqrt(1 - c p2)`, `c = d^N (d+1)^N / 2^N`.
pub fn propagate_to_concurrence(delta: f64, p2: f64, n: usize, d: usize) -> Result<f64> {
    let c = p2_scale(n, d);
    let radicand = 1.0 - c * p2;
    if radicand.is_nan() || radicand <= 0.0 {
        return Err(Error::NonPropagable(format!(
            "concurrence radicand {radicand:.3e} is not positive"
        )));
    }
    Ok(c / radicand.sqrt() * delta)
}
