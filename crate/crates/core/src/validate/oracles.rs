use crate::haar::permutation_operator;
use crate::protocol::{estimate_cross, estimate_p2, run_protocol};
use crate::qcore::kernel::kron;
use crate::qcore::{BasisString, State};
use crate::rng::derive_seed;
use crate::{CMatrix, Result, C64};
use rayon::prelude::*;

/// Every histogram of `k` draws from `probs` with its multinomial probability.
pub fn multinomial_outcomes(probs: &[f64], k: u64) -> Vec<(Vec<u64>, f64)> {
    fn rec(probs: &[f64], left: u64, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if prefix.len() + 1 == probs.len() {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for y in 0..=left {
            prefix.push(y);
            rec(probs, left - y, prefix, out);
            prefix.pop();
        }
    }
    let mut all = Vec::new();
    rec(probs, k, &mut Vec::new(), &mut all);
    let fact = |x: u64| (1..=x).map(|v| v as f64).product::<f64>();
    all.into_iter()
        .map(|y| {
            let mut w = fact(k);
            for (&c, &p) in y.iter().zip(probs) {
                w *= p.powi(c as i32) / fact(c);
            }
            (y, w)
        })
        .collect()
}

/// `V_N = 4 [P_+ - (x)_i P_+^{(i)} - (1 - 2^{1-N}) P_-]` on two copies of `N` qubits,
/// copy-major (`N` qubits of copy one, then copy two).
pub fn two_copy_bound_operator(n: usize) -> CMatrix {
    let dim = 1usize << (2 * n);
    let mut global: Vec<usize> = (n..2 * n).collect();
    global.extend(0..n);
    let swap = permutation_operator(&global, 2);
    let id = CMatrix::identity(dim, dim);
    let half = C64::new(0.5, 0.0);
    let plus = (&id + &swap) * half;
    let minus = (&id - &swap) * half;
    let mut local = id.clone();
    for site in 0..n {
        let mut perm: Vec<usize> = (0..2 * n).collect();
        perm.swap(site, n + site);
        local *= (&id + permutation_operator(&perm, 2)) * half;
    }
    (plus - local - minus * C64::new(1.0 - 2f64.powi(1 - n as i32), 0.0)) * C64::new(4.0, 0.0)
}

/// `tr[rho (x) rho V]`.
pub fn bound_via_two_copy_operator(state: &State, v: &CMatrix) -> f64 {
    let rho = state.to_density().to_matrix();
    (kron(&rho, &rho) * v).trace().re
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EmpiricalVariances {
    /// Sample variance of the `E[P^2(0...0)]` estimate over repetitions.
    pub p2: f64,
    /// Sample variance of the `E[P(0...0) P(1...1)]` estimate over repetitions.
    pub cross: f64,
}

/// Repeats the protocol `reps` times (repetition `r` seeded from `derive_seed(seed, r)`) and
/// returns the sample variances of the two estimates.
pub fn empirical_variances(state: &State, m: usize, k: u64, reps: usize, seed: u64) -> Result<EmpiricalVariances> {
    let n = state.n_sites();
    let s = BasisString::zeros(n, 2);
    let s_prime = BasisString::new(vec![1; n], 2)?;
    let values = (0..reps)
        .into_par_iter()
        .map(|r| {
            let data = run_protocol(state, m, k, derive_seed(seed, r as u64))?;
            Ok((
                estimate_p2(&data, &s)?.value,
                estimate_cross(&data, &s, &s_prime)?.value,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let var = |f: &dyn Fn(&(f64, f64)) -> f64| {
        let mean = values.iter().map(f).sum::<f64>() / reps as f64;
        values.iter().map(|v| (f(v) - mean).powi(2)).sum::<f64>() / (reps as f64 - 1.0)
    };
    Ok(EmpiricalVariances {
        p2: var(&|v| v.0),
        cross: var(&|v| v.1),
    })
}
