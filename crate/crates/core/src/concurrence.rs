//! Multiparticle concurrence: direct definitions, randomized-measurement and moment
//! pathways, the mixed-state lower bound, sector lengths and analytic reference values.
//!
//! The pure-state concurrence is `C = 2 sqrt(1 - 2^{-N} sum_A tr rho_A^2)`. For mixed states
//! the lower bound `C^2 >= tr[rho (x) rho V_N]` evaluates to
//! `2^{2-N} (1 - sum_A tr rho_A^2) + (4 - 2^{2-N}) tr rho^2`.

use crate::qcore::{subset_purity_sum, State, SubsetIndex};
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pathway {
    Direct,
    FromP2,
    FromMoments,
    MixedBoundDirect,
    MixedBoundRandmeas,
    MixedBoundMoments,
}

/// A concurrence value (or lower bound) with its error bar. `squared` is the pre-clamp
/// value of `C^2`; a negative `squared` is reported as `value = 0` with `clamped = true`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcurrenceEstimate {
    pub value: f64,
    pub error_bar: f64,
    pub pathway: Pathway,
    pub clamped: bool,
    pub squared: f64,
}

impl ConcurrenceEstimate {
    pub fn from_squared(squared: f64, pathway: Pathway) -> Self {
        let clamped = squared < 0.0;
        Self {
            value: squared.max(0.0).sqrt(),
            error_bar: 0.0,
            pathway,
            clamped,
            squared,
        }
    }

    pub fn with_error_bar(mut self, error_bar: f64) -> Self {
        self.error_bar = error_bar;
        self
    }
}

/// Moments `R^(2)_A` keyed by subset.
pub type MomentMap = BTreeMap<SubsetIndex, f64>;

fn lookup(r2: &MomentMap, a: &SubsetIndex) -> Result<f64> {
    if a.is_empty() {
        return Ok(r2.get(a).copied().unwrap_or(1.0));
    }
    r2.get(a)
        .copied()
        .ok_or_else(|| Error::MissingMoment(format!("R2 for subset {:?}", a.members())))
}

fn check_sites(n: usize) -> Result<()> {
    if n == 0 || n > 30 {
        return Err(Error::InvalidArgument(format!("N = {n} sites")));
    }
    Ok(())
}

/// `sum_{A' subset A} (d^2-1)^{|A'|} R_{A'} / d^{|A|}`, i.e. `tr rho_A^2` from moments.
fn subset_purity_from_moments(r2: &MomentMap, a: &SubsetIndex, d: usize) -> Result<f64> {
    let members = a.members();
    let mut total = 0.0;
    for sub in 0u64..1 << members.len() {
        let chosen: Vec<usize> = (0..members.len())
            .filter(|&j| sub >> j & 1 == 1)
            .map(|j| members[j])
            .collect();
        let w = ((d * d - 1) as f64).powi(chosen.len() as i32);
        total += w * lookup(r2, &SubsetIndex::new(chosen)?)?;
    }
    Ok(total / (d as f64).powi(a.len() as i32))
}

/// `C(psi) = 2 sqrt(1 - 2^{-N} sum_A tr rho_A^2)` for a pure state.
pub fn concurrence_pure_direct(state: &State) -> Result<ConcurrenceEstimate> {
    if !state.is_pure() {
        return Err(Error::InvalidState("direct concurrence needs a pure state".into()));
    }
    let n = state.n_sites();
    let sum = subset_purity_sum(state)?;
    Ok(ConcurrenceEstimate::from_squared(
        4.0 * (1.0 - sum / 2f64.powi(n as i32)),
        Pathway::Direct,
    ))
}

/// `d^N (d+1)^N / 2^N`, the factor mapping `E[P^2]` to `2^{-N} sum_A tr rho_A^2`.
pub fn p2_scale(n: usize, d: usize) -> f64 {
    (d as f64 * (d as f64 + 1.0) / 2.0).powi(n as i32)
}

/// `C = 2 sqrt(1 - d^N (d+1)^N 2^{-N} E[P^2])`.
pub fn concurrence_from_p2(p2: f64, n: usize, d: usize) -> ConcurrenceEstimate {
    ConcurrenceEstimate::from_squared(4.0 * (1.0 - p2_scale(n, d) * p2), Pathway::FromP2)
}

/// Pure-state concurrence from the moments of all proper subsets:
/// `C = 2 sqrt((1 - 2^{-N}) - sum_{A proper} sum_{A' subset A} (d^2-1)^{|A'|} R_{A'} / (2^N d^{|A|}))`.
pub fn concurrence_from_moments(r2: &MomentMap, n: usize, d: usize) -> Result<ConcurrenceEstimate> {
    check_sites(n)?;
    let full = SubsetIndex::full(n);
    let mut sum = 0.0;
    for a in SubsetIndex::all(n).filter(|a| *a != full) {
        sum += subset_purity_from_moments(r2, &a, d)?;
    }
    let scale = 2f64.powi(-(n as i32));
    Ok(ConcurrenceEstimate::from_squared(
        4.0 * ((1.0 - scale) - scale * sum),
        Pathway::FromMoments,
    ))
}

/// `d^{-N} sum_A (d^2-1)^{|A|} R_A`.
pub fn purity_from_moments(r2: &MomentMap, n: usize, d: usize) -> Result<f64> {
    check_sites(n)?;
    subset_purity_from_moments(r2, &SubsetIndex::full(n), d)
}

fn bound_squared(n: usize, purity_sum: f64, purity: f64) -> f64 {
    let c = 2f64.powi(2 - n as i32);
    c * (1.0 - purity_sum) + (4.0 - c) * purity
}

/// Lower bound `sqrt(max(0, 2^{2-N}(1 - sum_A tr rho_A^2) + (4 - 2^{2-N}) tr rho^2))`.
pub fn mixed_bound_direct(state: &State) -> Result<ConcurrenceEstimate> {
    let n = state.n_sites();
    let squared = bound_squared(n, subset_purity_sum(state)?, state.purity());
    Ok(ConcurrenceEstimate::from_squared(squared, Pathway::MixedBoundDirect))
}

/// Lower bound from `E[P^2]` and the purity, both as estimated from randomized measurements.
pub fn mixed_bound_from_randmeas(p2: f64, purity: f64, n: usize, d: usize) -> ConcurrenceEstimate {
    let squared = bound_squared(n, p2_scale(n, d) * 2f64.powi(n as i32) * p2, purity);
    ConcurrenceEstimate::from_squared(squared, Pathway::MixedBoundRandmeas)
}

/// Lower bound from the full map of qubit moments `R^(2)_A`.
pub fn mixed_bound_from_moments(r2: &MomentMap, n: usize) -> Result<ConcurrenceEstimate> {
    check_sites(n)?;
    let mut purity_sum = 0.0;
    for a in SubsetIndex::all(n) {
        purity_sum += subset_purity_from_moments(r2, &a, 2)?;
    }
    let purity = purity_from_moments(r2, n, 2)?;
    Ok(ConcurrenceEstimate::from_squared(
        bound_squared(n, purity_sum, purity),
        Pathway::MixedBoundMoments,
    ))
}

/// Sector lengths `A_k = sum_{wt(P) = k} <P>^2` over Pauli strings (`d = 2`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorLengths {
    pub lengths: Vec<f64>,
}

impl SectorLengths {
    pub fn purity(&self) -> f64 {
        self.lengths.iter().sum::<f64>() / 2f64.powi(self.lengths.len() as i32 - 1)
    }
}

/// `<x| rho P |x>` summed over `x`, for the Pauli string with flip mask `f` and phase
/// mask `z` (`Y` sites are in both).
fn pauli_string_expectation(state: &State, flip: usize, phase: usize, n_y: u32) -> f64 {
    let i_pow = [
        C64::new(1.0, 0.0),
        C64::new(0.0, 1.0),
        C64::new(-1.0, 0.0),
        C64::new(0.0, -1.0),
    ][(n_y % 4) as usize];
    let sign = |x: usize| {
        if (x & phase).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    };
    let total: C64 = match state {
        State::Pure(p) => {
            let a = p.amplitudes();
            (0..a.len()).map(|x| a[x ^ flip].conj() * a[x] * sign(x)).sum()
        }
        State::Mixed(m) => (0..m.dim()).map(|x| m.get(x, x ^ flip) * sign(x)).sum(),
    };
    (total * i_pow).re
}

/// Sector lengths from all `4^N` Pauli-string expectations.
pub fn sector_lengths(state: &State) -> Result<SectorLengths> {
    if state.local_dim() != 2 {
        return Err(Error::Unsupported("sector lengths for d != 2".into()));
    }
    let n = state.n_sites();
    if n > 12 {
        return Err(Error::Infeasible(format!("4^{n} Pauli strings")));
    }
    let mut lengths = vec![0.0; n + 1];
    // label 0..4 per site: 1, X, Y, Z; site i is bit n-1-i
    for code in 0..4usize.pow(n as u32) {
        let (mut flip, mut phase, mut n_y, mut weight) = (0usize, 0usize, 0u32, 0usize);
        let mut rest = code;
        for site in 0..n {
            let bit = 1 << (n - 1 - site);
            match rest % 4 {
                1 => flip |= bit,
                2 => {
                    flip |= bit;
                    phase |= bit;
                    n_y += 1;
                }
                3 => phase |= bit,
                _ => {}
            }
            if rest % 4 != 0 {
                weight += 1;
            }
            rest /= 4;
        }
        lengths[weight] += pauli_string_expectation(state, flip, phase, n_y).powi(2);
    }
    Ok(SectorLengths { lengths })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnalyticRef {
    /// Concurrence of `|GHZ_N>`; tends to `sqrt 2`.
    Ghz,
    /// Haar average of `C^2` over `N`-qubit pure states; tends to 4.
    HaarMeanSq,
    /// Value attained if every reduction were maximally mixed; tends to 2.
    UpperBound,
}

impl std::str::FromStr for AnalyticRef {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ghz" => Ok(Self::Ghz),
            "haar-mean-sq" => Ok(Self::HaarMeanSq),
            "upper-bound" => Ok(Self::UpperBound),
            other => Err(Error::UnknownName {
                kind: "analytic reference",
                name: other.into(),
            }),
        }
    }
}

/// Exact rational form `(numerator, denominator)` of the squared reference value
/// (`HaarMeanSq` is already a square). Exact for `N <= 40`.
pub fn analytic_ref_squared_exact(kind: AnalyticRef, n: u32) -> (i128, i128) {
    let p2 = 1i128 << n;
    let p4 = 1i128 << (2 * n);
    let p3 = 3i128.pow(n);
    match kind {
        // 2^{2-N} (2^{N-1} - 1) = (2^{N+1} - 4) / 2^N
        AnalyticRef::Ghz => (2 * p2 - 4, p2),
        // 4 - 8 3^N / (2^N (1 + 2^N))
        AnalyticRef::HaarMeanSq => {
            let den = p2 * (1 + p2);
            (4 * den - 8 * p3, den)
        }
        // 4^{1-N} (1 + 4^N - 2^N - 3^N)
        AnalyticRef::UpperBound => (4 * (1 + p4 - p2 - p3), p4),
    }
}

/// Closed-form reference values for `d = 2`: concurrence for `Ghz` and `UpperBound`,
/// mean of `C^2` for `HaarMeanSq`.
pub fn analytic_refs(kind: AnalyticRef, n: usize) -> f64 {
    let nf = n as f64;
    match kind {
        AnalyticRef::Ghz => 2f64.powf(1.0 - nf / 2.0) * (2f64.powf(nf - 1.0) - 1.0).max(0.0).sqrt(),
        AnalyticRef::HaarMeanSq => 4.0 - 8.0 * 1.5f64.powf(nf) / (1.0 + 2f64.powf(nf)),
        AnalyticRef::UpperBound => {
            let inner = 4f64.powf(-nf) + 1.0 - 2f64.powf(-nf) - 0.75f64.powf(nf);
            2.0 * inner.max(0.0).sqrt()
        }
    }
}
