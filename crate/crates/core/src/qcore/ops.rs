use super::kernel::apply_on_positions;
use super::{DensityMatrix, PureState, State, SubsetIndex, UNITARY_TOL};
use crate::{CMatrix, Error, Result, C64};

/// Per-site unitaries `(U_0, ..., U_{N-1})` of one randomized measurement setting.
///
/// The setting rotates the state, `rho -> U rho U^dag`, before readout in the
/// computational basis.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalSetting {
    unitaries: Vec<CMatrix>,
}

impl LocalSetting {
    /// Validating constructor: every matrix is square with the same dimension and unitary
    /// within `1e-10`.
    pub fn new(unitaries: Vec<CMatrix>) -> Result<Self> {
        let d = unitaries.first().map(|u| u.nrows()).unwrap_or(0);
        for u in &unitaries {
            if u.nrows() != d || u.ncols() != d {
                return Err(Error::DimensionMismatch(
                    "local unitaries must share one square shape".into(),
                ));
            }
            let dev = unitary_deviation(u);
            if dev > UNITARY_TOL {
                return Err(Error::NotUnitary(dev));
            }
        }
        Ok(Self { unitaries })
    }

    pub fn identity(n: usize, d: usize) -> Self {
        Self {
            unitaries: vec![CMatrix::identity(d, d); n],
        }
    }

    pub fn n_sites(&self) -> usize {
        self.unitaries.len()
    }

    pub fn local_dim(&self) -> usize {
        self.unitaries.first().map(|u| u.nrows()).unwrap_or(0)
    }

    pub fn unitaries(&self) -> &[CMatrix] {
        &self.unitaries
    }
}

pub(crate) fn unitary_deviation(u: &CMatrix) -> f64 {
    let prod = u.adjoint() * u;
    let n = prod.nrows();
    (0..n)
        .flat_map(|r| (0..n).map(move |c| (r, c)))
        .map(|(r, c)| (prod[(r, c)] - if r == c { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }).norm())
        .fold(0.0, f64::max)
}

pub fn is_unitary(u: &CMatrix, tol: f64) -> bool {
    u.is_square() && unitary_deviation(u) <= tol
}

fn check_targets(targets: &[usize], n: usize) -> Result<()> {
    for (i, &t) in targets.iter().enumerate() {
        if t >= n {
            return Err(Error::SiteOutOfRange { site: t, n });
        }
        if targets[..i].contains(&t) {
            return Err(Error::InvalidArgument(format!("target {t} repeated")));
        }
    }
    Ok(())
}

/// Applies a unitary on `targets` (first target = most significant index of the gate).
/// Pure states map to `G psi`, density matrices to `G rho G^dag`.
pub fn apply_gate(state: &State, gate: &CMatrix, targets: &[usize]) -> Result<State> {
    let (n, d) = (state.n_sites(), state.local_dim());
    check_targets(targets, n)?;
    let want = d.pow(targets.len() as u32);
    if gate.nrows() != want || gate.ncols() != want {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} gate on {} sites of dimension {d}",
            gate.nrows(),
            gate.ncols(),
            targets.len()
        )));
    }
    let dev = unitary_deviation(gate);
    if dev > UNITARY_TOL {
        return Err(Error::NotUnitary(dev));
    }
    let mut out = state.clone();
    match &mut out {
        State::Pure(p) => apply_unitary_pure(p, gate, targets)?,
        State::Mixed(m) => apply_unitary_mixed(m, gate, targets)?,
    }
    Ok(out)
}

pub(crate) fn apply_unitary_pure(p: &mut PureState, gate: &CMatrix, targets: &[usize]) -> Result<()> {
    let dims = vec![p.local_dim(); p.n_sites()];
    apply_on_positions(p.amplitudes_mut(), &dims, targets, gate)
}

pub(crate) fn apply_unitary_mixed(m: &mut DensityMatrix, gate: &CMatrix, targets: &[usize]) -> Result<()> {
    let n = m.n_sites();
    let dims = vec![m.local_dim(); 2 * n];
    apply_on_positions(m.data_mut(), &dims, targets, gate)?;
    let col_targets: Vec<usize> = targets.iter().map(|t| t + n).collect();
    apply_on_positions(m.data_mut(), &dims, &col_targets, &gate.map(|z| z.conj()))
}

/// Splits every basis index into its digits on `a` and on the complement. Returns
/// `(index_on_a, index_on_complement)` for each full index.
fn split_indices(n: usize, d: usize, a: &SubsetIndex) -> Vec<(usize, usize)> {
    let dim = d.pow(n as u32);
    let in_a: Vec<bool> = (0..n).map(|i| a.members().contains(&i)).collect();
    (0..dim)
        .map(|idx| {
            let (mut ia, mut ib) = (0usize, 0usize);
            let mut rest = idx;
            let mut digits = vec![0usize; n];
            for slot in digits.iter_mut().rev() {
                *slot = rest % d;
                rest /= d;
            }
            for (site, &x) in digits.iter().enumerate() {
                if in_a[site] {
                    ia = ia * d + x;
                } else {
                    ib = ib * d + x;
                }
            }
            (ia, ib)
        })
        .collect()
}

/// `tr_{A^c} rho` as a `d^{|A|} x d^{|A|}` matrix; the first member of `a` is the most
/// significant index.
pub fn reduced_density_matrix(state: &State, a: &SubsetIndex) -> Result<CMatrix> {
    let (n, d) = (state.n_sites(), state.local_dim());
    a.check_range(n)?;
    let da = d.pow(a.len() as u32);
    let split = split_indices(n, d, a);
    let mut out = CMatrix::zeros(da, da);
    match state {
        State::Pure(p) => {
            let amps = p.amplitudes();
            let db = d.pow((n - a.len()) as u32);
            let mut m = CMatrix::zeros(da, db);
            for (idx, &(ia, ib)) in split.iter().enumerate() {
                m[(ia, ib)] = amps[idx];
            }
            out = &m * m.adjoint();
        }
        State::Mixed(rho) => {
            let dim = rho.dim();
            // group indices by their complement part
            let db = d.pow((n - a.len()) as u32);
            let mut by_b: Vec<Vec<(usize, usize)>> = vec![Vec::with_capacity(da); db];
            for (idx, &(ia, ib)) in split.iter().enumerate() {
                by_b[ib].push((idx, ia));
            }
            let data = rho.data();
            for group in &by_b {
                for &(r, ra) in group {
                    for &(c, ca) in group {
                        out[(ra, ca)] += data[r * dim + c];
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `tr[(tr_{A^c} rho)^2]`. The empty subset gives 1.
pub fn reduced_purity(state: &State, a: &SubsetIndex) -> Result<f64> {
    let n = state.n_sites();
    a.check_range(n)?;
    if a.is_empty() {
        return Ok(1.0);
    }
    match state {
        State::Pure(p) => {
            // tr (M M^dag)^2 = tr (M^dag M)^2; use the smaller Gram matrix
            let d = p.local_dim();
            let (da, db) = (d.pow(a.len() as u32), d.pow((n - a.len()) as u32));
            let split = split_indices(n, d, a);
            let mut m = CMatrix::zeros(da, db);
            for (idx, &(ia, ib)) in split.iter().enumerate() {
                m[(ia, ib)] = p.amplitudes()[idx];
            }
            let gram = if da <= db { &m * m.adjoint() } else { m.adjoint() * &m };
            Ok(gram.iter().map(|z| z.norm_sqr()).sum())
        }
        State::Mixed(_) => {
            let red = reduced_density_matrix(state, a)?;
            Ok(red.iter().map(|z| z.norm_sqr()).sum())
        }
    }
}

/// Sum of `tr(rho_A^2)` over all `2^N` subsets, including the empty set and the full set.
pub fn subset_purity_sum(state: &State) -> Result<f64> {
    let n = state.n_sites();
    if n > 24 {
        return Err(Error::Infeasible(format!("2^{n} subsets")));
    }
    SubsetIndex::all(n).map(|a| reduced_purity(state, &a)).sum()
}

/// `P_U(s) = <s| U rho U^dag |s>` for every basis index `s`.
pub fn outcome_distribution(state: &State, setting: &LocalSetting) -> Result<Vec<f64>> {
    let (n, d) = (state.n_sites(), state.local_dim());
    if setting.n_sites() != n || (n > 0 && setting.local_dim() != d) {
        return Err(Error::DimensionMismatch(format!(
            "setting for {} sites of dimension {} applied to {n} sites of dimension {d}",
            setting.n_sites(),
            setting.local_dim()
        )));
    }
    match state {
        State::Pure(p) => {
            let mut rotated = p.clone();
            for (site, u) in setting.unitaries().iter().enumerate() {
                apply_unitary_pure(&mut rotated, u, &[site])?;
            }
            Ok(rotated.amplitudes().iter().map(|a| a.norm_sqr()).collect())
        }
        State::Mixed(m) => {
            let mut rotated = m.clone();
            for (site, u) in setting.unitaries().iter().enumerate() {
                apply_unitary_mixed(&mut rotated, u, &[site])?;
            }
            let dim = rotated.dim();
            Ok((0..dim).map(|i| rotated.get(i, i).re.max(0.0)).collect())
        }
    }
}
