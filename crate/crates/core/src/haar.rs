//! Haar sampling, twirls over the unitary group and the exact moment engine.
//!
//! The twirl `E_U[U^{(x)n} X U^{dag (x)n}]` is the orthogonal projection (Hilbert-Schmidt)
//! of `X` onto the span of the `n!` copy-permutation operators. For `d = 2` and `n >= 3`
//! these operators are linearly dependent, so the projection uses a pseudo-inverse of their
//! Gram matrix instead of tabulated Weingarten coefficients.
//!
//! Exact Haar moments of population probabilities are evaluated as
//! `E_U[P^t(s) P^k(s')] = tr[rho^{(x)(t+k)} (x)_i K_i]` with one twirl kernel per site,
//! `K_i = twirl(|s_i><s_i|^{(x)t} (x) |s'_i><s'_i|^{(x)k})`. The trace is contracted on the
//! `(t+k)`-fold copy of a purification of the state.

use crate::qcore::kernel::{apply_on_positions, kron};
use crate::qcore::{BasisString, DensityMatrix, LocalSetting, PureState, State};
use crate::{CMatrix, Error, Result, C64};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use std::collections::HashMap;

/// Largest number of copies supported by the twirl and the moment engine.
pub const MAX_ORDER: usize = 4;
/// The engine refuses inputs whose permutation expansion has more than this many terms.
pub const MAX_EXPANSION_TERMS: f64 = 1e8;
/// Largest multi-copy register (complex entries) the engine allocates.
pub const MAX_WORK_DIM: usize = 1 << 24;
const RANK_TOL: f64 = 1e-10;

/// Haar-random `d x d` unitary: complex Ginibre matrix, QR decomposition, and the
/// phases of `R`'s diagonal moved onto `Q` so that the result is exactly Haar distributed.
pub fn sample_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| {
        C64::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        )
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for c in 0..d {
        let diag = r[(c, c)];
        let phase = if diag.norm() > 0.0 {
            diag / diag.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        q.column_mut(c).iter_mut().for_each(|x| *x *= phase);
    }
    q
}

/// `n` independent Haar-random local unitaries.
pub fn sample_local_setting<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> LocalSetting {
    LocalSetting::new((0..n).map(|_| sample_unitary(d, rng)).collect()).expect("Haar samples are unitary")
}

/// Haar-random pure state of `n` qubits, i.e. `U|0...0>` with `U` Haar on `U(2^n)`.
pub fn haar_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PureState {
    haar_state_qudits(n, 2, rng)
}

/// The first column of a Haar unitary is a normalized complex Gaussian vector, which is
/// what is sampled here.
pub fn haar_state_qudits<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> PureState {
    let dim = d.pow(n as u32);
    let v: Vec<C64> = (0..dim)
        .map(|_| {
            C64::new(
                rng.sample::<f64, _>(StandardNormal),
                rng.sample::<f64, _>(StandardNormal),
            )
        })
        .collect();
    PureState::normalized(n, d, v).expect("gaussian vector is nonzero")
}

/// `t! (d-1)! / (t+d-1)!`, the inverse dimension of the symmetric subspace of
/// `(C^d)^{(x)t}`.
pub fn symmetric_inverse_dim(t: usize, d: usize) -> f64 {
    // binom(t+d-1, t)^{-1}
    let mut binom = 1.0f64;
    for j in 1..=t {
        binom *= (d - 1 + j) as f64 / j as f64;
    }
    1.0 / binom
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

/// Operator permuting `n` tensor copies of `C^d`: `|x_0 ... x_{n-1}> -> |y>` with
/// `y_{perm[c]} = x_c`.
pub fn permutation_operator(perm: &[usize], d: usize) -> CMatrix {
    let n = perm.len();
    let dim = d.pow(n as u32);
    let mut m = CMatrix::zeros(dim, dim);
    let mut digits = vec![0usize; n];
    let mut out_digits = vec![0usize; n];
    for x in 0..dim {
        let mut rest = x;
        for slot in digits.iter_mut().rev() {
            *slot = rest % d;
            rest /= d;
        }
        for c in 0..n {
            out_digits[perm[c]] = digits[c];
        }
        let y = out_digits.iter().fold(0, |acc, &v| acc * d + v);
        m[(y, x)] = C64::new(1.0, 0.0);
    }
    m
}

/// Projector onto the symmetric subspace of `n` copies, `(1/n!) sum_pi P_pi`.
pub fn symmetric_projector(n: usize, d: usize) -> CMatrix {
    let perms = permutations(n);
    let scale = 1.0 / perms.len() as f64;
    perms
        .iter()
        .fold(CMatrix::zeros(d.pow(n as u32), d.pow(n as u32)), |acc, p| {
            acc + permutation_operator(p, d) * C64::new(scale, 0.0)
        })
}

fn hs_inner(a: &CMatrix, b: &CMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// `E_U[U^{(x)n} X U^{dag (x)n}]` for an operator on `n <= 4` copies of `C^d`.
pub fn single_site_twirl(x: &CMatrix, d: usize, n: usize) -> Result<CMatrix> {
    if n > MAX_ORDER {
        return Err(Error::Unsupported(format!("twirl of order {n} (at most {MAX_ORDER})")));
    }
    let dim = d.pow(n as u32);
    if x.nrows() != dim || x.ncols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} operator for {n} copies of C^{d}",
            x.nrows(),
            x.ncols()
        )));
    }
    let ops: Vec<CMatrix> = permutations(n).iter().map(|p| permutation_operator(p, d)).collect();
    let m = ops.len();
    // Gram matrix of permutation operators is real: tr(P_a^T P_b) = d^{#cycles}
    let gram = DMatrix::<f64>::from_fn(m, m, |a, b| hs_inner(&ops[a], &ops[b]).re);
    let svd = gram.svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let pinv = svd
        .pseudo_inverse(RANK_TOL * smax.max(1.0))
        .map_err(|e| Error::InvalidArgument(format!("pseudo-inverse failed: {e}")))?;
    let overlaps: Vec<C64> = ops.iter().map(|p| hs_inner(p, x)).collect();
    let mut out = CMatrix::zeros(dim, dim);
    for a in 0..m {
        let coeff: C64 = (0..m).map(|b| overlaps[b] * pinv[(a, b)]).sum();
        if coeff.norm() > 0.0 {
            out += &ops[a] * coeff;
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KernelKind {
    /// `t + k` copies all projected on the same outcome: `D^{(n)} P_+`.
    SymmetricProjector,
    /// `t` copies on one outcome and `k` copies on a different outcome.
    Cross { t: usize, k: usize },
}

/// Single-site twirl kernel used by the moment engine.
#[derive(Clone, Debug)]
pub struct TwirlKernel {
    pub order: usize,
    pub d: usize,
    pub operator: CMatrix,
    pub kind: KernelKind,
}

impl TwirlKernel {
    pub fn symmetric(n: usize, d: usize) -> Result<Self> {
        let x = projector_string(&vec![0; n], d);
        Ok(Self {
            order: n,
            d,
            operator: single_site_twirl(&x, d, n)?,
            kind: KernelKind::SymmetricProjector,
        })
    }

    pub fn cross(t: usize, k: usize, d: usize) -> Result<Self> {
        let mut outcomes = vec![0; t];
        outcomes.extend(std::iter::repeat_n(1, k));
        let x = projector_string(&outcomes, d);
        Ok(Self {
            order: t + k,
            d,
            operator: single_site_twirl(&x, d, t + k)?,
            kind: KernelKind::Cross { t, k },
        })
    }

    /// `<b|K|a>` for copy-index strings `b`, `a` given as register indices.
    pub fn element(&self, row: usize, col: usize) -> f64 {
        self.operator[(row, col)].re
    }
}

/// `|o_0><o_0| (x) ... (x) |o_{n-1}><o_{n-1}|`.
fn projector_string(outcomes: &[usize], d: usize) -> CMatrix {
    outcomes.iter().fold(CMatrix::identity(1, 1), |acc, &o| {
        let mut p = CMatrix::zeros(d, d);
        p[(o, o)] = C64::new(1.0, 0.0);
        kron(&acc, &p)
    })
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|x| x as f64).product()
}

fn check_feasible(n_sites: usize, copies: usize, register: usize) -> Result<()> {
    let terms = factorial(copies).powi(n_sites as i32);
    if terms > MAX_EXPANSION_TERMS {
        return Err(Error::Infeasible(format!(
            "({copies}!)^{n_sites} = {terms:.3e} expansion terms exceeds {MAX_EXPANSION_TERMS:.0e}"
        )));
    }
    let work = (register as f64).powi(copies as i32);
    if work > MAX_WORK_DIM as f64 {
        return Err(Error::Infeasible(format!(
            "{copies}-copy register of dimension {work:.3e} exceeds {MAX_WORK_DIM}"
        )));
    }
    Ok(())
}

/// Purification of the state as amplitudes over `N` sites plus (for mixed states) one
/// environment position of dimension `rank`.
fn purification(state: &State) -> (Vec<C64>, Vec<usize>) {
    let (n, d) = (state.n_sites(), state.local_dim());
    match state {
        State::Pure(p) => (p.amplitudes().to_vec(), vec![d; n]),
        State::Mixed(m) => purify(m, n, d),
    }
}

fn purify(m: &DensityMatrix, n: usize, d: usize) -> (Vec<C64>, Vec<usize>) {
    let eig = m.to_matrix().symmetric_eigen();
    let keep: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|&j| eig.eigenvalues[j] > 1e-14)
        .collect();
    let r = keep.len().max(1);
    let dim = m.dim();
    let mut amps = vec![C64::new(0.0, 0.0); dim * r];
    for (slot, &j) in keep.iter().enumerate() {
        let w = eig.eigenvalues[j].sqrt();
        for x in 0..dim {
            amps[x * r + slot] = eig.eigenvectors[(x, j)] * w;
        }
    }
    let mut dims = vec![d; n];
    dims.push(r);
    (amps, dims)
}

/// Exact `E_U[P^t(s) P^k(s')]` where `differ` marks (bit `i` = site `i`) the sites with
/// `s_i != s'_i`. Only the pattern of differences matters.
pub fn exact_moment_pattern(state: &State, t: usize, k: usize, differ: u64) -> Result<f64> {
    let (n, d) = (state.n_sites(), state.local_dim());
    if t + k > MAX_ORDER {
        return Err(Error::Unsupported(format!(
            "moments of total order {} (at most {MAX_ORDER})",
            t + k
        )));
    }
    if t == 0 && k == 0 {
        return Ok(1.0);
    }
    if (t == 0 || k == 0) && differ != 0 {
        // one of the strings does not appear: the pattern is irrelevant
        return exact_moment_pattern(state, t + k, 0, 0);
    }
    let copies = t + k;
    if copies == 1 {
        return Ok((d as f64).powi(-(n as i32)));
    }
    let (psi, mut dims) = purification(state);
    let register: usize = dims.iter().product();
    check_feasible(n, copies, register)?;

    let eq = TwirlKernel::symmetric(copies, d)?;
    let neq = if differ != 0 {
        Some(TwirlKernel::cross(t, k, d)?)
    } else {
        None
    };

    // copy-major layout: position c * L + p is position p of copy c
    let per_copy = dims.len();
    let mut copy = vec![C64::new(1.0, 0.0)];
    for _ in 0..copies {
        copy = copy.iter().flat_map(|a| psi.iter().map(move |b| a * b)).collect();
    }
    let all_dims: Vec<usize> = (0..copies).flat_map(|_| dims.iter().copied()).collect();
    dims.clear();
    let mut image = copy.clone();
    for site in 0..n {
        let kernel = if differ >> site & 1 == 1 {
            neq.as_ref().expect("cross kernel")
        } else {
            &eq
        };
        let positions: Vec<usize> = (0..copies).map(|c| c * per_copy + site).collect();
        apply_on_positions(&mut image, &all_dims, &positions, &kernel.operator)?;
    }
    Ok(copy.iter().zip(&image).map(|(a, b)| a.conj() * b).sum::<C64>().re)
}

/// Exact `E_U[P_U^t(s)]` for `t <= 4`; independent of `s`.
pub fn exact_power_moment(state: &State, t: usize) -> Result<f64> {
    if t == 0 {
        return Err(Error::InvalidArgument("power moment of order 0".into()));
    }
    exact_moment_pattern(state, t, 0, 0)
}

/// Exact `E_U[P_U^t(s) P_U^k(s')]` for `t + k <= 4`.
pub fn exact_cross_moment(state: &State, s: &BasisString, s_prime: &BasisString, t: usize, k: usize) -> Result<f64> {
    let n = state.n_sites();
    if s.len() != n || s_prime.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "basis strings of length {} / {} for {n} sites",
            s.len(),
            s_prime.len()
        )));
    }
    exact_moment_pattern(state, t, k, s.difference_mask(s_prime)?)
}

fn canonical_key(m: &CMatrix) -> Vec<i64> {
    let pivot = m
        .iter()
        .find(|z| z.norm() > 1e-9)
        .copied()
        .unwrap_or(C64::new(1.0, 0.0));
    let phase = pivot / pivot.norm();
    m.iter()
        .flat_map(|z| {
            let w = z / phase;
            [(w.re * 1e8).round() as i64, (w.im * 1e8).round() as i64]
        })
        .collect()
}

/// The 24 single-qubit Clifford unitaries (modulo global phase), generated by `H` and
/// `S = diag(1, i)`. The identity comes first.
pub fn clifford_group_d2() -> Vec<CMatrix> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let h = CMatrix::from_row_slice(
        2,
        2,
        &[C64::new(r, 0.0), C64::new(r, 0.0), C64::new(r, 0.0), C64::new(-r, 0.0)],
    );
    let s = CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 1.0),
        ],
    );
    let mut seen: HashMap<Vec<i64>, usize> = HashMap::new();
    let mut group = vec![CMatrix::identity(2, 2)];
    seen.insert(canonical_key(&group[0]), 0);
    let mut frontier = 0;
    while frontier < group.len() {
        let g = group[frontier].clone();
        frontier += 1;
        for gen in [&h, &s] {
            let next = gen * &g;
            let key = canonical_key(&next);
            if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(key) {
                e.insert(group.len());
                group.push(next);
            }
        }
    }
    group
}

/// Whether two unitaries agree up to a global phase.
pub fn equal_up_to_phase(a: &CMatrix, b: &CMatrix) -> bool {
    canonical_key(a) == canonical_key(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{outcome_distribution, subset_purity_sum, UNITARY_TOL};
    use crate::rng::seeded;

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        a.iter().zip(b.iter()).all(|(x, y)| (x - y).norm() < tol)
    }

    #[test]
    fn sampled_unitaries_are_unitary_and_seeded() {
        let mut a = seeded(11);
        let mut b = seeded(11);
        for d in 2..5 {
            let u = sample_unitary(d, &mut a);
            assert!(crate::qcore::is_unitary(&u, UNITARY_TOL));
            assert_eq!(u, sample_unitary(d, &mut b));
        }
        assert_eq!(
            sample_local_setting(3, 2, &mut seeded(1)),
            sample_local_setting(3, 2, &mut seeded(1))
        );
    }

    #[test]
    fn haar_twirl_of_rank_one_projector_is_maximally_mixed() {
        let mut rng = seeded(20);
        let samples = 100_000;
        let mut acc = CMatrix::zeros(2, 2);
        let mut overlap = 0.0;
        for _ in 0..samples {
            let u = sample_unitary(2, &mut rng);
            let col = u.column(0);
            acc += col * col.adjoint();
            overlap += u[(0, 0)].norm_sqr();
        }
        acc /= C64::new(samples as f64, 0.0);
        assert!(close(&acc, &(CMatrix::identity(2, 2) * C64::new(0.5, 0.0)), 5e-3));
        assert!((overlap / samples as f64 - 0.5).abs() < 5e-3);
    }

    #[test]
    fn haar_state_reduced_purity_matches_induced_measure_mean() {
        let mut rng = seeded(21);
        let a = crate::qcore::SubsetIndex::new(vec![0]).unwrap();
        let mut total = 0.0;
        for _ in 0..1000 {
            let psi = State::Pure(haar_state(4, &mut rng));
            total += crate::qcore::reduced_purity(&psi, &a).unwrap();
        }
        // (d_A + d_B) / (d_A d_B + 1) = 10 / 17
        assert!((total / 1000.0 - 10.0 / 17.0).abs() < 0.01);
        let psi = haar_state(5, &mut seeded(3));
        let norm: f64 = psi.amplitudes().iter().map(|x| x.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
        assert_eq!(psi, haar_state(5, &mut seeded(3)));
    }

    #[test]
    fn twirl_examples() {
        // |00><00| → P_+/3
        let x = projector_string(&[0, 0], 2);
        let got = single_site_twirl(&x, 2, 2).unwrap();
        let want = symmetric_projector(2, 2) * C64::new(1.0 / 3.0, 0.0);
        assert!(close(&got, &want, 1e-12));
        // |01><01| → (2·1 − S)/6
        let x = projector_string(&[0, 1], 2);
        let got = single_site_twirl(&x, 2, 2).unwrap();
        let swap = permutation_operator(&[1, 0], 2);
        let want = (CMatrix::identity(4, 4) * C64::new(2.0, 0.0) - swap) * C64::new(1.0 / 6.0, 0.0);
        assert!(close(&got, &want, 1e-12));
        // identity is fixed
        let id = CMatrix::identity(8, 8);
        assert!(close(&single_site_twirl(&id, 2, 3).unwrap(), &id, 1e-12));
        assert!(single_site_twirl(&CMatrix::identity(32, 32), 2, 5).is_err());
    }

    #[test]
    fn symmetric_kernels_match_inverse_dimension_times_projector() {
        for d in 2..=3 {
            for n in 1..=4 {
                if d == 3 && n == 4 {
                    continue;
                }
                let p = symmetric_projector(n, d);
                assert!(close(&(&p * &p), &p, 1e-12));
                assert!(close(&p.adjoint(), &p, 1e-12));
                let tr: f64 = (0..p.nrows()).map(|i| p[(i, i)].re).sum();
                assert!((tr - 1.0 / symmetric_inverse_dim(n, d)).abs() < 1e-9);
                let k = TwirlKernel::symmetric(n, d).unwrap();
                assert!(close(
                    &k.operator,
                    &(p * C64::new(symmetric_inverse_dim(n, d), 0.0)),
                    1e-9
                ));
            }
        }
    }

    #[test]
    fn cross_kernels_are_twirl_fixed_points_with_unit_trace() {
        let mut rng = seeded(8);
        for (t, k) in [(1, 1), (2, 1), (1, 2), (2, 2), (3, 1), (1, 3)] {
            let kern = TwirlKernel::cross(t, k, 2).unwrap();
            let tr: C64 = (0..kern.operator.nrows()).map(|i| kern.operator[(i, i)]).sum();
            assert!((tr.re - 1.0).abs() < 1e-9 && tr.im.abs() < 1e-9);
            let v = sample_unitary(2, &mut rng);
            let vn = (1..t + k).fold(v.clone(), |acc, _| kron(&acc, &v));
            let commutator = &vn * &kern.operator - &kern.operator * &vn;
            assert!(commutator.iter().all(|z| z.norm() < 1e-9));
            let again = single_site_twirl(&kern.operator, 2, t + k).unwrap();
            assert!(close(&again, &kern.operator, 1e-9));
        }
    }

    #[test]
    fn power_moment_examples() {
        let mut rng = seeded(30);
        // product states: (t+1)^{-N}
        for n in 1..=3 {
            let p = State::Pure(PureState::random_product(n, 2, &mut rng));
            for t in 1..=4 {
                let want = (t as f64 + 1.0).powi(-(n as i32));
                assert!((exact_power_moment(&p, t).unwrap() - want).abs() < 1e-12, "n={n} t={t}");
            }
        }
        assert!((exact_power_moment(&p_ghz(3), 2).unwrap() - 5.0 / 216.0).abs() < 1e-12);
        assert!((exact_power_moment(&p_ghz(2), 2).unwrap() - 1.0 / 12.0).abs() < 1e-12);
        // maximally mixed qubit: P = 1/2 for every setting
        let mm = State::Mixed(DensityMatrix::maximally_mixed(1, 2));
        assert!((exact_power_moment(&mm, 2).unwrap() - 0.25).abs() < 1e-12);
        assert!((exact_power_moment(&mm, 4).unwrap() - 0.0625).abs() < 1e-12);
    }

    fn p_ghz(n: usize) -> State {
        State::Pure(PureState::ghz(n))
    }

    #[test]
    fn second_moment_equals_scaled_subset_purity_sum() {
        let mut rng = seeded(31);
        for n in 1..=4 {
            let rho = State::Mixed(DensityMatrix::random(n, 2, 2, &mut rng));
            let want = (1.0f64 / 6.0).powi(n as i32) * subset_purity_sum(&rho).unwrap();
            assert!((exact_power_moment(&rho, 2).unwrap() - want).abs() < 1e-9);
            let psi = State::Pure(haar_state(n + 1, &mut rng));
            let want = (1.0f64 / 6.0).powi(n as i32 + 1) * subset_purity_sum(&psi).unwrap();
            assert!((exact_power_moment(&psi, 2).unwrap() - want).abs() < 1e-9);
        }
    }

    #[test]
    fn cross_moment_examples() {
        let psi = State::Pure(haar_state(1, &mut seeded(2)));
        let zero = BasisString::parse("0", 2).unwrap();
        let one = BasisString::parse("1", 2).unwrap();
        let diff = exact_cross_moment(&psi, &zero, &one, 1, 1).unwrap();
        let same = exact_cross_moment(&psi, &zero, &zero, 1, 1).unwrap();
        assert!((diff - 1.0 / 6.0).abs() < 1e-12);
        assert!((same - 1.0 / 3.0).abs() < 1e-12);
        // purity recombination: 2 [E(P0^2) + E(P1^2) - (E(P0P1) + E(P1P0))/2] = 1
        assert!((2.0 * (2.0 * same - diff) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cross_moment_symmetry_and_infeasibility() {
        let mut rng = seeded(4);
        let rho = State::Mixed(DensityMatrix::random(2, 2, 3, &mut rng));
        let s = BasisString::parse("01", 2).unwrap();
        let sp = BasisString::parse("11", 2).unwrap();
        let a = exact_cross_moment(&rho, &s, &sp, 2, 1).unwrap();
        let b = exact_cross_moment(&rho, &sp, &s, 1, 2).unwrap();
        assert!((a - b).abs() < 1e-12);
        let big = State::Pure(PureState::zero(6, 2));
        assert!(matches!(exact_power_moment(&big, 4), Err(Error::Infeasible(_))));
        assert!(exact_moment_pattern(&big, 3, 2, 0).is_err());
    }

    #[test]
    fn exact_moments_match_monte_carlo() {
        let mut rng = seeded(40);
        let states = [
            State::Pure(PureState::ghz(2)),
            State::Mixed(DensityMatrix::random(2, 2, 2, &mut rng)),
            State::Pure(haar_state(3, &mut rng)),
        ];
        let samples = 100_000;
        for state in &states {
            let n = state.n_sites();
            let mut sums = [0.0f64; 3];
            let mut sq = [0.0f64; 3];
            for _ in 0..samples {
                let setting = sample_local_setting(n, 2, &mut rng);
                let p = outcome_distribution(state, &setting).unwrap()[0];
                for t in 0..3 {
                    let v = p.powi(t as i32 + 1);
                    sums[t] += v;
                    sq[t] += v * v;
                }
            }
            for t in 0..3 {
                let mean = sums[t] / samples as f64;
                let se = ((sq[t] / samples as f64 - mean * mean) / samples as f64).sqrt();
                let exact = exact_power_moment(state, t + 1).unwrap();
                assert!(
                    (mean - exact).abs() < 4.0 * se,
                    "t={} mean={mean} exact={exact} se={se}",
                    t + 1
                );
            }
        }
    }

    #[test]
    fn clifford_group_properties() {
        let group = clifford_group_d2();
        assert_eq!(group.len(), 24);
        assert!(equal_up_to_phase(&group[0], &CMatrix::identity(2, 2)));
        for a in &group {
            assert!(crate::qcore::is_unitary(a, 1e-12));
            for b in &group {
                let prod = a * b;
                assert!(group.iter().any(|g| equal_up_to_phase(g, &prod)));
            }
        }
        // Pauli set maps onto itself up to sign
        let paulis = pauli_matrices();
        for g in &group {
            for p in &paulis {
                let img = g * p * g.adjoint();
                let hit = paulis
                    .iter()
                    .any(|q| close(&img, q, 1e-12) || close(&img, &(-q), 1e-12));
                assert!(hit);
            }
        }
        // second-moment design average of |0><0|^{(x)2}
        let x = projector_string(&[0, 0], 2);
        let mut avg = CMatrix::zeros(4, 4);
        for g in &group {
            let gg = kron(g, g);
            avg += &gg * &x * gg.adjoint();
        }
        avg /= C64::new(24.0, 0.0);
        assert!(close(
            &avg,
            &(symmetric_projector(2, 2) * C64::new(1.0 / 3.0, 0.0)),
            1e-12
        ));
    }

    fn pauli_matrices() -> Vec<CMatrix> {
        let (o, l, i) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 1.0));
        vec![
            CMatrix::from_row_slice(2, 2, &[o, l, l, o]),
            CMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
            CMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
        ]
    }
}
