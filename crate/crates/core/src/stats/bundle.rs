use crate::haar::{exact_moment_pattern, haar_state, sample_local_setting, TwirlKernel};
use crate::qcore::{outcome_distribution, BasisString, State};
use crate::rng::{substream, SimRng};
use crate::{Error, Result};
use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Cross-moment orders `(t, k)` needed by the variance formulas.
pub const CROSS_ORDERS: [(usize, usize); 4] = [(1, 1), (2, 1), (1, 2), (2, 2)];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Provenance {
    /// Closed form or exact engine evaluation.
    Analytic,
    /// Average of exact per-state values over `states` sampled states.
    SampledExact { states: usize, seed: u64 },
    /// Average over `settings` sampled local settings with exact outcome probabilities.
    MonteCarlo { settings: usize, seed: u64 },
}

/// Haar-averaged population-probability moments of one state or family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentBundle {
    pub n: usize,
    pub d: usize,
    pub family: String,
    /// `E[P^t(s)]` for `t = 1..=4` at index `t - 1`.
    pub power: Vec<f64>,
    /// `E[P^t(s) P^k(s')]` keyed by `(t, k, D(s, s'))`, for families where only the Hamming
    /// distance matters.
    pub cross_by_distance: BTreeMap<(usize, usize, usize), f64>,
    /// `E[P^t(s) P^k(s')]` keyed by `(t, k, mask)` with bit `i` set when `s_i != s'_i`.
    pub cross_by_mask: BTreeMap<(usize, usize, u64), f64>,
    pub provenance: Provenance,
}

impl MomentBundle {
    pub fn power_moment(&self, t: usize) -> Result<f64> {
        self.power
            .get(t.wrapping_sub(1))
            .copied()
            .ok_or_else(|| Error::MissingMoment(format!("E[P^{t}]")))
    }

    /// `E[P^t(s) P^k(s')]` for the difference pattern `mask` (bit `i` = site `i` differs).
    pub fn cross_moment(&self, t: usize, k: usize, mask: u64) -> Result<f64> {
        if mask == 0 {
            return self.power_moment(t + k);
        }
        if let Some(v) = self.cross_by_mask.get(&(t, k, mask)) {
            return Ok(*v);
        }
        let dist = mask.count_ones() as usize;
        self.cross_by_distance
            .get(&(t, k, dist))
            .copied()
            .ok_or_else(|| Error::MissingMoment(format!("E[P^{t} P'^{k}] at difference pattern {mask:#b}")))
    }

    pub fn cross_moment_for(&self, t: usize, k: usize, s: &BasisString, s_prime: &BasisString) -> Result<f64> {
        if s.len() != self.n || s_prime.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "strings of length {} / {} for N = {}",
                s.len(),
                s_prime.len(),
                self.n
            )));
        }
        self.cross_moment(t, k, s.difference_mask(s_prime)?)
    }

    /// Exact bundle of one state from the moment engine, with cross moments for every
    /// difference pattern.
    pub fn from_state(state: &State) -> Result<Self> {
        let n = state.n_sites();
        let power = (1..=4)
            .map(|t| exact_moment_pattern(state, t, 0, 0))
            .collect::<Result<Vec<_>>>()?;
        let masks: Vec<u64> = (1..1u64 << n).collect();
        let mut cross_by_mask = BTreeMap::new();
        for &(t, k) in &CROSS_ORDERS {
            let values = masks
                .par_iter()
                .map(|&m| exact_moment_pattern(state, t, k, m))
                .collect::<Result<Vec<_>>>()?;
            for (&m, v) in masks.iter().zip(values) {
                cross_by_mask.insert((t, k, m), v);
            }
        }
        Ok(Self {
            n,
            d: state.local_dim(),
            family: "generic".into(),
            power,
            cross_by_distance: BTreeMap::new(),
            cross_by_mask,
            provenance: Provenance::Analytic,
        })
    }

    /// Moments estimated from `settings` Haar-random settings, using the exact outcome
    /// distribution of each setting. Works beyond the exact engine's envelope.
    pub fn monte_carlo(state: &State, settings: usize, seed: u64) -> Result<Self> {
        let (n, d) = (state.n_sites(), state.local_dim());
        if n > 63 {
            return Err(Error::InvalidArgument(format!("N = {n}")));
        }
        // s = 0...0 and s' differing on the first D sites
        let partners: Vec<usize> = (1..=n)
            .map(|dist| (d.pow(dist as u32) - 1) * d.pow((n - dist) as u32))
            .collect();
        let partial = (0..settings)
            .into_par_iter()
            .map(|i| {
                let mut rng = substream(seed, i as u64);
                let setting = sample_local_setting(n, d, &mut rng);
                let p = outcome_distribution(state, &setting)?;
                let mut row = vec![0.0; 4 + CROSS_ORDERS.len() * n];
                for (t, slot) in row.iter_mut().take(4).enumerate() {
                    *slot = p[0].powi(t as i32 + 1);
                }
                for (o, &(t, k)) in CROSS_ORDERS.iter().enumerate() {
                    for (j, &q) in partners.iter().enumerate() {
                        row[4 + o * n + j] = p[0].powi(t as i32) * p[q].powi(k as i32);
                    }
                }
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut sums = vec![0.0; 4 + CROSS_ORDERS.len() * n];
        for row in &partial {
            for (acc, v) in sums.iter_mut().zip(row) {
                *acc += v;
            }
        }
        let mean: Vec<f64> = sums.iter().map(|s| s / settings.max(1) as f64).collect();
        let mut cross_by_distance = BTreeMap::new();
        for (o, &(t, k)) in CROSS_ORDERS.iter().enumerate() {
            for dist in 1..=n {
                cross_by_distance.insert((t, k, dist), mean[4 + o * n + dist - 1]);
            }
        }
        Ok(Self {
            n,
            d,
            family: "generic".into(),
            power: mean[..4].to_vec(),
            cross_by_distance,
            cross_by_mask: BTreeMap::new(),
            provenance: Provenance::MonteCarlo { settings, seed },
        })
    }
}

/// A family of states with Haar-averaged moments available at any supported `N`.
pub trait MomentFamily: Send + Sync {
    fn name(&self) -> &'static str;
    fn bundle(&self, n: usize) -> Result<MomentBundle>;
    /// Concurrence used as the scale of the relative-error target, if the family has one.
    fn reference_concurrence(&self, n: usize) -> Option<f64>;
}

/// Per-site kernel entries `<b|K|a>` for `n` copies, indexed `[b][a]`.
fn kernel_table(kernel: &TwirlKernel) -> Vec<Vec<f64>> {
    let dim = kernel.operator.nrows();
    (0..dim)
        .map(|b| (0..dim).map(|a| kernel.element(b, a)).collect())
        .collect()
}

fn product_value(n: usize, dist: usize, eq: f64, neq: f64) -> f64 {
    eq.powi((n - dist) as i32) * neq.powi(dist as i32)
}

/// Pure product states (every local unitary orbit is the same, so the moments do not depend
/// on which product state).
pub struct ProductFamily;

impl MomentFamily for ProductFamily {
    fn name(&self) -> &'static str {
        "product"
    }

    fn bundle(&self, n: usize) -> Result<MomentBundle> {
        let power = (1..=4).map(|t| (t as f64 + 1.0).powi(-(n as i32))).collect();
        let mut cross_by_distance = BTreeMap::new();
        for &(t, k) in &CROSS_ORDERS {
            let eq = 1.0 / (t + k + 1) as f64;
            let neq = TwirlKernel::cross(t, k, 2)?.element(0, 0);
            for dist in 1..=n {
                cross_by_distance.insert((t, k, dist), product_value(n, dist, eq, neq));
            }
        }
        Ok(MomentBundle {
            n,
            d: 2,
            family: self.name().into(),
            power,
            cross_by_distance,
            cross_by_mask: BTreeMap::new(),
            provenance: Provenance::Analytic,
        })
    }

    fn reference_concurrence(&self, _n: usize) -> Option<f64> {
        None
    }
}

/// `|GHZ_N> = (|0...0> + |1...1>)/sqrt 2`. Every copy-index string is the same on all
/// sites, so `<GHZ^{(x)n}| (x)_i K_i |GHZ^{(x)n}> = 2^{-n} sum_{a,b} K_eq[b][a]^{N-D} K_neq[b][a]^D`.
pub struct GhzFamily;

impl GhzFamily {
    fn contract(eq: &[Vec<f64>], neq: Option<&[Vec<f64>]>, n: usize, dist: usize) -> f64 {
        let dim = eq.len();
        let mut total = 0.0;
        for b in 0..dim {
            for a in 0..dim {
                let x = eq[b][a].powi((n - dist) as i32);
                let y = neq.map(|m| m[b][a].powi(dist as i32)).unwrap_or(1.0);
                total += x * y;
            }
        }
        total / dim as f64
    }
}

impl MomentFamily for GhzFamily {
    fn name(&self) -> &'static str {
        "ghz"
    }

    fn bundle(&self, n: usize) -> Result<MomentBundle> {
        if n < 2 {
            return Err(Error::InvalidArgument("GHZ needs N >= 2".into()));
        }
        let mut eq_tables = BTreeMap::new();
        for copies in 1..=4 {
            eq_tables.insert(copies, kernel_table(&TwirlKernel::symmetric(copies, 2)?));
        }
        let power = (1..=4).map(|t| Self::contract(&eq_tables[&t], None, n, 0)).collect();
        let mut cross_by_distance = BTreeMap::new();
        for &(t, k) in &CROSS_ORDERS {
            let neq = kernel_table(&TwirlKernel::cross(t, k, 2)?);
            for dist in 1..=n {
                cross_by_distance.insert((t, k, dist), Self::contract(&eq_tables[&(t + k)], Some(&neq), n, dist));
            }
        }
        Ok(MomentBundle {
            n,
            d: 2,
            family: self.name().into(),
            power,
            cross_by_distance,
            cross_by_mask: BTreeMap::new(),
            provenance: Provenance::Analytic,
        })
    }

    fn reference_concurrence(&self, n: usize) -> Option<f64> {
        Some(crate::concurrence::analytic_refs(
            crate::concurrence::AnalyticRef::Ghz,
            n,
        ))
    }
}

/// Global Haar-random pure states, averaged over `states` samples with exact per-state
/// moments. Limited by the exact engine (about `N <= 5`).
pub struct HaarFamily {
    pub states: usize,
    pub seed: u64,
}

impl Default for HaarFamily {
    fn default() -> Self {
        Self {
            states: 100,
            seed: 0x4841_4152,
        }
    }
}

impl MomentFamily for HaarFamily {
    fn name(&self) -> &'static str {
        "haar"
    }

    fn bundle(&self, n: usize) -> Result<MomentBundle> {
        if self.states == 0 {
            return Err(Error::InvalidArgument("Haar bundle needs at least one state".into()));
        }
        let per_state = (0..self.states)
            .into_par_iter()
            .map(|i| {
                let mut rng = SimRng::seed_from_u64(crate::rng::derive_seed(self.seed, i as u64));
                let psi = State::Pure(haar_state(n, &mut rng));
                let mut row: Vec<f64> = (1..=4)
                    .map(|t| exact_moment_pattern(&psi, t, 0, 0))
                    .collect::<Result<_>>()?;
                for &(t, k) in &CROSS_ORDERS {
                    for dist in 1..=n {
                        // lowest `dist` sites differ; the state average depends on D only
                        row.push(exact_moment_pattern(&psi, t, k, (1u64 << dist) - 1)?);
                    }
                }
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()?;
        let width = per_state[0].len();
        let mean: Vec<f64> = (0..width)
            .map(|j| per_state.iter().map(|r| r[j]).sum::<f64>() / self.states as f64)
            .collect();
        let mut cross_by_distance = BTreeMap::new();
        for (o, &(t, k)) in CROSS_ORDERS.iter().enumerate() {
            for dist in 1..=n {
                cross_by_distance.insert((t, k, dist), mean[4 + o * n + dist - 1]);
            }
        }
        Ok(MomentBundle {
            n,
            d: 2,
            family: self.name().into(),
            power: mean[..4].to_vec(),
            cross_by_distance,
            cross_by_mask: BTreeMap::new(),
            provenance: Provenance::SampledExact {
                states: self.states,
                seed: self.seed,
            },
        })
    }

    fn reference_concurrence(&self, n: usize) -> Option<f64> {
        Some(crate::concurrence::analytic_refs(crate::concurrence::AnalyticRef::HaarMeanSq, n).sqrt())
    }
}

/// Moment families selectable by name.
pub struct FamilyRegistry {
    families: BTreeMap<&'static str, Box<dyn MomentFamily>>,
}

impl Default for FamilyRegistry {
    fn default() -> Self {
        let mut reg = Self {
            families: BTreeMap::new(),
        };
        reg.register(Box::new(ProductFamily));
        reg.register(Box::new(GhzFamily));
        reg.register(Box::new(HaarFamily::default()));
        reg
    }
}

impl FamilyRegistry {
    pub fn register(&mut self, family: Box<dyn MomentFamily>) {
        self.families.insert(family.name(), family);
    }

    pub fn get(&self, name: &str) -> Result<&dyn MomentFamily> {
        self.families
            .get(name)
            .map(|f| f.as_ref())
            .ok_or_else(|| Error::UnknownName {
                kind: "moment family",
                name: name.into(),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.families.keys().copied().collect()
    }
}

/// Bundle for a named family from the default registry.
pub fn analytic_moment_bundle(family: &str, n: usize) -> Result<MomentBundle> {
    FamilyRegistry::default().get(family)?.bundle(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::PureState;
    use crate::rng::seeded;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * b.abs().max(1e-300) + 1e-15
    }

    #[test]
    fn family_examples() {
        let p = analytic_moment_bundle("product", 5).unwrap();
        assert!(close(p.power_moment(2).unwrap(), 3f64.powi(-5)));
        assert!(close(
            analytic_moment_bundle("product", 2).unwrap().power_moment(4).unwrap(),
            0.04
        ));
        let g = analytic_moment_bundle("ghz", 3).unwrap();
        assert!(close(g.power_moment(2).unwrap(), 5.0 / 216.0));
        assert!(analytic_moment_bundle("nope", 3).is_err());
        assert_eq!(FamilyRegistry::default().names(), vec!["ghz", "haar", "product"]);
    }

    #[test]
    fn closed_forms_match_exact_engine() {
        let mut rng = seeded(1);
        for n in 1..=3 {
            let prod = State::Pure(PureState::random_product(n, 2, &mut rng));
            let exact = MomentBundle::from_state(&prod).unwrap();
            let closed = ProductFamily.bundle(n).unwrap();
            compare(&exact, &closed, n);
        }
        for n in 2..=4 {
            let ghz = State::Pure(PureState::ghz(n));
            let exact = MomentBundle::from_state(&ghz).unwrap();
            let closed = GhzFamily.bundle(n).unwrap();
            compare(&exact, &closed, n);
        }
    }

    fn compare(exact: &MomentBundle, closed: &MomentBundle, n: usize) {
        for t in 1..=4 {
            assert!(
                (exact.power_moment(t).unwrap() - closed.power_moment(t).unwrap()).abs() < 1e-12,
                "n={n} t={t}"
            );
        }
        for &(t, k) in &CROSS_ORDERS {
            for mask in 1..1u64 << n {
                let a = exact.cross_moment(t, k, mask).unwrap();
                let b = closed.cross_moment(t, k, mask).unwrap();
                assert!((a - b).abs() < 1e-12, "n={n} ({t},{k}) mask={mask:b}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn bundle_invariants() {
        for bundle in [
            analytic_moment_bundle("product", 4).unwrap(),
            analytic_moment_bundle("ghz", 6).unwrap(),
            HaarFamily { states: 5, seed: 1 }.bundle(3).unwrap(),
        ] {
            let n = bundle.n;
            assert!((bundle.power_moment(1).unwrap() - 2f64.powi(-(n as i32))).abs() < 1e-12);
            for t in 1..4 {
                let (a, b) = (bundle.power_moment(t).unwrap(), bundle.power_moment(t + 1).unwrap());
                assert!(b > 0.0 && b <= a && a <= 1.0);
            }
        }
    }

    #[test]
    fn haar_bundle_matches_dirichlet_average() {
        // E over Haar states of E_U[P^t] equals E[p^t] for one coordinate of a uniform
        // point on the simplex of dimension D = 2^N: t! (D-1)! / (D+t-1)!
        let n = 3;
        let bundle = HaarFamily { states: 200, seed: 3 }.bundle(n).unwrap();
        let dim = 8.0f64;
        for t in 2..=4 {
            let want: f64 = (1..=t).map(|j| j as f64 / (dim + j as f64 - 1.0)).product();
            let got = bundle.power_moment(t).unwrap();
            assert!((got / want - 1.0).abs() < 0.03, "t={t}: {got} vs {want}");
        }
    }

    #[test]
    fn monte_carlo_bundle_is_close_to_exact() {
        let ghz = State::Pure(PureState::ghz(2));
        let mc = MomentBundle::monte_carlo(&ghz, 40_000, 5).unwrap();
        let exact = GhzFamily.bundle(2).unwrap();
        for t in 2..=4 {
            let (a, b) = (mc.power_moment(t).unwrap(), exact.power_moment(t).unwrap());
            assert!((a / b - 1.0).abs() < 0.05, "t={t}");
        }
        let (a, b) = (
            mc.cross_moment(1, 1, 0b11).unwrap(),
            exact.cross_moment(1, 1, 0b11).unwrap(),
        );
        assert!((a / b - 1.0).abs() < 0.05);
    }
}
