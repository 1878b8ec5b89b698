use crate::haar::clifford_group_d2;
use crate::qcore::kernel::kron;
use crate::qcore::{reduced_density_matrix, State, SubsetIndex};
use crate::{CMatrix, Error, Result, C64};

const MAX_CLIFFORD_SITES: usize = 4;

pub(crate) fn pauli(index: usize) -> CMatrix {
    let (o, l, i) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 1.0));
    match index {
        0 => CMatrix::identity(2, 2),
        1 => CMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        2 => CMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        _ => CMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
    }
}

fn expectation(rho: &CMatrix, op: &CMatrix) -> f64 {
    // tr(rho op) = sum_{ij} rho_ij op_ji
    let n = rho.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += rho[(i, j)] * op[(j, i)];
        }
    }
    acc.re
}

fn check_qubits(state: &State, a: &SubsetIndex) -> Result<()> {
    if state.local_dim() != 2 {
        return Err(Error::Unsupported("Pauli pathway for d != 2".into()));
    }
    a.check_range(state.n_sites())
}

/// `tr(rho sigma_{p_0} (x) ... )` on the sites of `a`; `labels[j]` in 0..4 selects
/// `1, X, Y, Z` for the `j`-th member.
pub fn pauli_expectation(state: &State, a: &SubsetIndex, labels: &[usize]) -> Result<f64> {
    check_qubits(state, a)?;
    if labels.len() != a.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} Pauli labels for {} sites",
            labels.len(),
            a.len()
        )));
    }
    let rho = reduced_density_matrix(state, a)?;
    let op = labels
        .iter()
        .fold(CMatrix::identity(1, 1), |acc, &l| kron(&acc, &pauli(l)));
    Ok(expectation(&rho, &op))
}

/// `3^{-|A|} sum_{i in {x,y,z}^{|A|}} <sigma_i>^2`: the correlation-tensor form of `R^(2)_A`.
pub fn exact_pauli_r2(state: &State, a: &SubsetIndex) -> Result<f64> {
    check_qubits(state, a)?;
    if a.is_empty() {
        return Ok(1.0);
    }
    let rho = reduced_density_matrix(state, a)?;
    let k = a.len();
    let mut total = 0.0;
    for code in 0..3usize.pow(k as u32) {
        let mut rest = code;
        let mut op = CMatrix::identity(1, 1);
        for _ in 0..k {
            op = kron(&op, &pauli(1 + rest % 3));
            rest /= 3;
        }
        total += expectation(&rho, &op).powi(2);
    }
    Ok(total / 3f64.powi(k as i32))
}

/// `R^(2)_A` as the average over all `24^{|A|}` local Clifford settings of the squared
/// `Z`-parity correlator in the rotated frame. Limited to `|A| <= 4`.
pub fn exact_clifford_r2(state: &State, a: &SubsetIndex) -> Result<f64> {
    check_qubits(state, a)?;
    let k = a.len();
    if k > MAX_CLIFFORD_SITES {
        return Err(Error::Infeasible(format!(
            "24^{k} Clifford settings (at most |A| = {MAX_CLIFFORD_SITES})"
        )));
    }
    if k == 0 {
        return Ok(1.0);
    }
    let rho = reduced_density_matrix(state, a)?;
    let z = pauli(3);
    // U^dag Z U for every Clifford U
    let rotated: Vec<CMatrix> = clifford_group_d2().iter().map(|u| u.adjoint() * &z * u).collect();
    let count = rotated.len().pow(k as u32);
    let mut total = 0.0;
    for code in 0..count {
        let mut rest = code;
        let mut op = CMatrix::identity(1, 1);
        for _ in 0..k {
            op = kron(&op, &rotated[rest % rotated.len()]);
            rest /= rotated.len();
        }
        total += expectation(&rho, &op).powi(2);
    }
    Ok(total / count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::haar_state;
    use crate::qcore::{DensityMatrix, PureState};
    use crate::rng::seeded;

    fn subset(m: &[usize]) -> SubsetIndex {
        SubsetIndex::new(m.to_vec()).unwrap()
    }

    #[test]
    fn pauli_r2_examples() {
        let ghz = State::Pure(PureState::ghz(2));
        assert!(exact_pauli_r2(&ghz, &subset(&[0])).unwrap().abs() < 1e-12);
        assert!((exact_pauli_r2(&ghz, &subset(&[0, 1])).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        let zz = State::Pure(PureState::zero(2, 2));
        assert!((exact_pauli_r2(&zz, &subset(&[0, 1])).unwrap() - 1.0 / 9.0).abs() < 1e-12);
        let psi = State::Pure(haar_state(1, &mut seeded(2)));
        assert!((exact_pauli_r2(&psi, &subset(&[0])).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn clifford_average_matches_pauli_tensor() {
        let mut rng = seeded(12);
        let rho = State::Mixed(DensityMatrix::random(3, 2, 2, &mut rng));
        for a in SubsetIndex::all(3) {
            let p = exact_pauli_r2(&rho, &a).unwrap();
            let c = exact_clifford_r2(&rho, &a).unwrap();
            assert!((p - c).abs() < 1e-10, "{a:?}: {p} vs {c}");
        }
        let mm = State::Mixed(DensityMatrix::maximally_mixed(2, 2));
        assert!(exact_clifford_r2(&mm, &subset(&[0, 1])).unwrap().abs() < 1e-12);
        let ghz = State::Pure(PureState::ghz(2));
        assert!((exact_clifford_r2(&ghz, &subset(&[0, 1])).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        let big = State::Pure(PureState::zero(5, 2));
        assert!(exact_clifford_r2(&big, &SubsetIndex::full(5)).is_err());
    }

    #[test]
    fn subset_recombination_gives_purity() {
        let mut rng = seeded(13);
        for n in 1..=3 {
            let rho = State::Mixed(DensityMatrix::random(n, 2, 3, &mut rng));
            let sum: f64 = SubsetIndex::all(n)
                .map(|a| 3f64.powi(a.len() as i32) * exact_pauli_r2(&rho, &a).unwrap())
                .sum();
            assert!((sum / 2f64.powi(n as i32) - rho.purity()).abs() < 1e-9);
        }
    }

    #[test]
    fn pauli_expectation_of_ghz() {
        let ghz = State::Pure(PureState::ghz(2));
        assert!((pauli_expectation(&ghz, &subset(&[0, 1]), &[1, 1]).unwrap() - 1.0).abs() < 1e-12);
        assert!((pauli_expectation(&ghz, &subset(&[0, 1]), &[2, 2]).unwrap() + 1.0).abs() < 1e-12);
        assert!(pauli_expectation(&ghz, &subset(&[0]), &[1, 1]).is_err());
    }
}
