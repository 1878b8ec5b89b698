//! Self-check suites: exhaustive estimator unbiasedness, agreement of the concurrence
//! pathways, analytic variances against Monte Carlo, and the mixed-state bound checks.

mod oracles;

pub use oracles::{
    bound_via_two_copy_operator, empirical_variances, multinomial_outcomes, two_copy_bound_operator, EmpiricalVariances,
};

use crate::concurrence::{
    concurrence_from_moments, concurrence_from_p2, concurrence_pure_direct, mixed_bound_direct, MomentMap,
};
use crate::haar::{exact_power_moment, haar_state};
use crate::protocol::{cross_estimator_counts, exact_clifford_r2, exact_pauli_r2, power_estimator_counts};
use crate::qcore::{BasisString, DensityMatrix, PureState, State, SubsetIndex};
use crate::rng::seeded;
use crate::stats::{variance_cross, variance_p2, GhzFamily, MomentFamily, ProductFamily};
use crate::Result;
use serde::{Deserialize, Serialize};

/// Outcome of one suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub passed: bool,
    pub checks: usize,
    pub failures: Vec<String>,
    pub tolerance: String,
    pub max_deviation: f64,
}

impl SuiteReport {
    fn new(name: &str, tolerance: String) -> Self {
        Self {
            name: name.into(),
            passed: true,
            checks: 0,
            failures: Vec::new(),
            tolerance,
            max_deviation: 0.0,
        }
    }

    /// Records one comparison; `deviation` is compared against `limit`.
    pub fn check(&mut self, deviation: f64, limit: f64, label: impl FnOnce() -> String) {
        self.checks += 1;
        let deviation = if deviation.is_nan() { f64::INFINITY } else { deviation };
        self.max_deviation = self.max_deviation.max(deviation);
        if deviation > limit {
            self.passed = false;
            self.failures
                .push(format!("{} (deviation {deviation:.3e} > {limit:.1e})", label()));
        }
    }

    fn error(&mut self, what: String) {
        self.checks += 1;
        self.passed = false;
        self.failures.push(what);
    }
}

/// Count-level estimators checked by [`unbiasedness_suite`]; swapping one out is how the
/// negative control is run.
#[derive(Clone, Copy)]
pub struct EstimatorSet {
    pub power: fn(u64, u64, usize) -> Result<f64>,
    pub cross: fn(u64, u64, u64) -> Result<f64>,
    /// Squared-correlator estimate from the signed parity sum `S` and `K`.
    pub squared_correlator: fn(i64, u64) -> f64,
}

fn squared_correlator(s: i64, k: u64) -> f64 {
    let (s, k) = (s as f64, k as f64);
    (s * s - k) / (k * (k - 1.0))
}

impl Default for EstimatorSet {
    fn default() -> Self {
        Self {
            power: power_estimator_counts,
            cross: cross_estimator_counts,
            squared_correlator,
        }
    }
}

pub const UNBIASED_TOL: f64 = 1e-12;

/// Probability vectors with rational entries on outcome spaces of size 2, 3 and 4.
fn test_distributions() -> Vec<Vec<f64>> {
    vec![
        vec![0.3, 0.7],
        vec![0.5, 0.5],
        vec![1.0, 0.0],
        vec![1.0 / 6.0, 1.0 / 3.0, 0.5],
        vec![1.0 / 3.0; 3],
        vec![0.1, 0.2, 0.3, 0.4],
        vec![0.25; 4],
        vec![0.5, 0.25, 0.125, 0.125],
        vec![0.0, 0.6, 0.4, 0.0],
    ]
}

/// Exact expectations over every multinomial outcome for `d^N <= 4` and `K <= 5`.
pub fn unbiasedness_suite(est: &EstimatorSet) -> SuiteReport {
    let mut report = SuiteReport::new("estimator-unbiasedness", format!("absolute {UNBIASED_TOL:.0e}"));
    for probs in test_distributions() {
        let dim = probs.len();
        for k in 1..=5u64 {
            let outcomes = multinomial_outcomes(&probs, k);
            let expect = |f: &dyn Fn(&[u64]) -> Result<f64>| -> Result<f64> {
                outcomes.iter().map(|(counts, w)| Ok(w * f(counts)?)).sum()
            };
            for s in 0..dim {
                for order in 2..=4usize {
                    if k < order as u64 {
                        continue;
                    }
                    match expect(&|y: &[u64]| (est.power)(y[s], k, order)) {
                        Ok(e) => report.check((e - probs[s].powi(order as i32)).abs(), UNBIASED_TOL, || {
                            format!("P~^({order}) at P = {probs:?}, s = {s}, K = {k}")
                        }),
                        Err(e) => report.error(format!("P~^({order}) at K = {k}: {e}")),
                    }
                }
                for t in (0..dim).filter(|&t| t != s && k >= 2) {
                    match expect(&|y: &[u64]| (est.cross)(y[s], y[t], k)) {
                        Ok(e) => report.check((e - probs[s] * probs[t]).abs(), UNBIASED_TOL, || {
                            format!("P~^(1,1) at P = {probs:?}, (s, s') = ({s}, {t}), K = {k}")
                        }),
                        Err(e) => report.error(format!("P~^(1,1) at K = {k}: {e}")),
                    }
                }
            }
            // qubit registers: parity correlators on every nonempty subset
            let n = match dim {
                2 => 1,
                4 => 2,
                _ => continue,
            };
            if k < 2 {
                continue;
            }
            for mask in 1usize..1 << n {
                let parity = |x: usize| {
                    if (x & mask).count_ones().is_multiple_of(2) {
                        1i64
                    } else {
                        -1
                    }
                };
                let mu: f64 = (0..dim).map(|x| probs[x] * parity(x) as f64).sum();
                let e: f64 = outcomes
                    .iter()
                    .map(|(y, w)| {
                        let s: i64 = (0..dim).map(|x| y[x] as i64 * parity(x)).sum();
                        w * (est.squared_correlator)(s, k)
                    })
                    .sum();
                report.check((e - mu * mu).abs(), UNBIASED_TOL, || {
                    format!("squared correlator, mask {mask:b}, P = {probs:?}, K = {k}")
                });
            }
        }
    }
    report
}

/// Concurrence from the direct definition, from the exact `E[P^2]`, and from the exact
/// `R^(2)` map on random pure states; Clifford-average against Pauli-tensor moments.
pub fn pathway_suite(seed: u64, states: usize) -> SuiteReport {
    let mut report = SuiteReport::new(
        "pathway-equality",
        "absolute 1e-9 (squared concurrence), 1e-10 (moments)".into(),
    );
    let mut rng = seeded(seed);
    for i in 0..states {
        let n = 1 + i % 5;
        let psi = State::Pure(haar_state(n, &mut rng));
        let outcome = (|| -> Result<(f64, f64, f64)> {
            let direct = concurrence_pure_direct(&psi)?.squared;
            let via_p2 = concurrence_from_p2(exact_power_moment(&psi, 2)?, n, 2).squared;
            let map: MomentMap = SubsetIndex::all(n)
                .map(|a| exact_pauli_r2(&psi, &a).map(|v| (a, v)))
                .collect::<Result<_>>()?;
            Ok((direct, via_p2, concurrence_from_moments(&map, n, 2)?.squared))
        })();
        match outcome {
            Ok((direct, via_p2, via_r2)) => {
                report.check((direct - via_p2).abs(), 1e-9, || {
                    format!("state {i} (N = {n}): direct vs E[P^2]")
                });
                report.check((direct - via_r2).abs(), 1e-9, || {
                    format!("state {i} (N = {n}): direct vs R2 map")
                });
            }
            Err(e) => report.error(format!("state {i}: {e}")),
        }
    }
    let mut subjects = vec![State::Pure(PureState::ghz(3)), State::Pure(haar_state(4, &mut rng))];
    for n in 1..=3 {
        subjects.push(State::Mixed(DensityMatrix::random(n, 2, 2, &mut rng)));
    }
    for (j, state) in subjects.iter().enumerate() {
        for a in SubsetIndex::all(state.n_sites()).filter(|a| !a.is_empty() && a.len() <= 3) {
            match (exact_pauli_r2(state, &a), exact_clifford_r2(state, &a)) {
                (Ok(p), Ok(c)) => report.check((p - c).abs(), 1e-10, || format!("subject {j}, A = {:?}", a.members())),
                (Err(e), _) | (_, Err(e)) => report.error(format!("subject {j}: {e}")),
            }
        }
    }
    report
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceSuiteConfig {
    pub seed: u64,
    pub repetitions: usize,
    pub rel_tolerance: f64,
    pub budgets: Vec<(usize, u64)>,
    pub max_n: usize,
}

impl Default for VarianceSuiteConfig {
    fn default() -> Self {
        Self {
            seed: 2024,
            repetitions: 1000,
            rel_tolerance: 0.2,
            budgets: vec![(10, 10), (10, 100)],
            max_n: 3,
        }
    }
}

/// One row of the variance comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceComparison {
    pub family: String,
    pub n: usize,
    pub m: usize,
    pub k: u64,
    pub estimator: String,
    pub analytic: f64,
    pub empirical: f64,
}

impl VarianceComparison {
    pub fn rel_error(&self) -> f64 {
        (self.empirical / self.analytic - 1.0).abs()
    }
}

/// Analytic against empirical variances of the `E[P^2(0...0)]` and
/// `E[P(0...0) P(1...1)]` estimators for product and GHZ states.
pub fn variance_comparisons(cfg: &VarianceSuiteConfig) -> Result<Vec<VarianceComparison>> {
    let mut rows = Vec::new();
    let mut rng = seeded(cfg.seed);
    for n in 1..=cfg.max_n {
        let mut cases: Vec<(&str, State, Box<dyn MomentFamily>)> = vec![(
            "product",
            State::Pure(PureState::random_product(n, 2, &mut rng)),
            Box::new(ProductFamily),
        )];
        if n >= 2 {
            cases.push(("ghz", State::Pure(PureState::ghz(n)), Box::new(GhzFamily)));
        }
        for (name, state, family) in cases {
            let bundle = family.bundle(n)?;
            let s = BasisString::zeros(n, 2);
            let s_prime = BasisString::new(vec![1; n], 2)?;
            for (case, &(m, k)) in cfg.budgets.iter().enumerate() {
                let seed = crate::rng::derive_seed(cfg.seed, (n * 1000 + case * 10 + (name == "ghz") as usize) as u64);
                let emp = empirical_variances(&state, m, k, cfg.repetitions, seed)?;
                let vp2 = variance_p2(&bundle, m as u64, k)?.variance;
                let vx = variance_cross(&bundle, &s, &s_prime, m as u64, k)?.variance;
                rows.push(VarianceComparison {
                    family: name.into(),
                    n,
                    m,
                    k,
                    estimator: "p2".into(),
                    analytic: vp2,
                    empirical: emp.p2,
                });
                rows.push(VarianceComparison {
                    family: name.into(),
                    n,
                    m,
                    k,
                    estimator: "cross".into(),
                    analytic: vx,
                    empirical: emp.cross,
                });
            }
        }
    }
    Ok(rows)
}

pub fn variance_suite(cfg: &VarianceSuiteConfig) -> SuiteReport {
    let mut report = SuiteReport::new(
        "variance-vs-monte-carlo",
        format!("relative {} over {} repetitions", cfg.rel_tolerance, cfg.repetitions),
    );
    match variance_comparisons(cfg) {
        Ok(rows) => {
            for r in rows {
                report.check(r.rel_error(), cfg.rel_tolerance, || {
                    format!(
                        "{} N = {} M = {} K = {} {}: analytic {:.4e}, empirical {:.4e}",
                        r.family, r.n, r.m, r.k, r.estimator, r.analytic, r.empirical
                    )
                });
            }
        }
        Err(e) => report.error(e.to_string()),
    }
    report
}

/// Tightness on pure states, agreement with the explicit two-copy operator, and
/// monotonicity under global depolarization of GHZ states.
pub fn bound_suite(seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("mixed-bound", "absolute 1e-9".into());
    let mut rng = seeded(seed);
    let run = |report: &mut SuiteReport, rng: &mut crate::rng::SimRng| -> Result<()> {
        for n in 1..=5 {
            for _ in 0..2 {
                let psi = State::Pure(haar_state(n, rng));
                let d = (mixed_bound_direct(&psi)?.squared - concurrence_pure_direct(&psi)?.squared).abs();
                report.check(d, 1e-9, || format!("tightness, N = {n}"));
            }
        }
        for n in 1..=4 {
            let v = two_copy_bound_operator(n);
            for state in [
                State::Mixed(DensityMatrix::random(n, 2, 3, rng)),
                State::Pure(haar_state(n, rng)),
            ] {
                let d = (bound_via_two_copy_operator(&state, &v) - mixed_bound_direct(&state)?.squared).abs();
                report.check(d, 1e-9, || format!("two-copy operator, N = {n}"));
            }
        }
        for n in 2..=5 {
            let ghz = PureState::ghz(n).to_density();
            let mut last = f64::INFINITY;
            for q in 0..=10 {
                let v = mixed_bound_direct(&State::Mixed(ghz.depolarized(q as f64 / 10.0)))?.value;
                report.check((v - last).max(0.0), 1e-12, || {
                    format!("monotonicity, GHZ N = {n}, q = {}", q as f64 / 10.0)
                });
                last = v;
            }
        }
        Ok(())
    };
    if let Err(e) = run(&mut report, &mut rng) {
        report.error(e.to_string());
    }
    report
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidateConfig {
    pub seed: u64,
    pub pathway_states: usize,
    pub variance: Option<VarianceSuiteConfig>,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            pathway_states: 20,
            variance: Some(VarianceSuiteConfig::default()),
        }
    }
}

/// All suites, in a fixed order.
pub fn run_all(cfg: &ValidateConfig, estimators: &EstimatorSet) -> Vec<SuiteReport> {
    let mut out = vec![
        unbiasedness_suite(estimators),
        pathway_suite(cfg.seed, cfg.pathway_states),
        bound_suite(cfg.seed),
    ];
    if let Some(v) = &cfg.variance {
        out.push(variance_suite(v));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suites_pass() {
        let cfg = ValidateConfig {
            variance: Some(VarianceSuiteConfig {
                repetitions: 400,
                rel_tolerance: 0.35,
                max_n: 2,
                ..Default::default()
            }),
            ..Default::default()
        };
        for report in run_all(&cfg, &EstimatorSet::default()) {
            assert!(report.passed, "{report:?}");
            assert!(report.checks > 0);
        }
    }

    fn biased_power(y: u64, k: u64, order: usize) -> Result<f64> {
        Ok((y as f64 / k as f64).powi(order as i32))
    }

    #[test]
    fn perturbed_estimator_fails_the_unbiasedness_suite() {
        let est = EstimatorSet {
            power: biased_power,
            ..Default::default()
        };
        let report = unbiasedness_suite(&est);
        assert!(!report.passed);
        assert!(report.failures.iter().any(|f| f.contains("P~^(2)")));
    }
}
