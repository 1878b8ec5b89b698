use crate::qcore::DensityMatrix;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Depolarizing probabilities after single-qubit (`eps1`) and two-qubit (`eps2`) gates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub eps1: f64,
    pub eps2: f64,
}

impl NoiseModel {
    pub fn new(eps1: f64, eps2: f64) -> Result<Self> {
        let m = Self { eps1, eps2 };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("eps1", self.eps1), ("eps2", self.eps2)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidArgument(format!("{name} = {v} outside [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.eps1 == 0.0 && self.eps2 == 0.0
    }
}

/// `rho -> (1 - eps) rho + eps tr_q(rho) (x) 1/2` on qubit `q`, in place.
pub fn depolarize_qubit(rho: &mut DensityMatrix, q: usize, eps: f64) {
    if eps == 0.0 {
        return;
    }
    let (n, dim) = (rho.n_sites(), rho.dim());
    let bit = 1usize << (n - 1 - q);
    let keep = 1.0 - eps;
    let data = rho.data_mut();
    for r in (0..dim).filter(|r| r & bit == 0) {
        for c in (0..dim).filter(|c| c & bit == 0) {
            let (r1, c1) = (r | bit, c | bit);
            let a = data[r * dim + c];
            let b = data[r1 * dim + c1];
            let mixed = (a + b) * (eps / 2.0);
            data[r * dim + c] = a * keep + mixed;
            data[r1 * dim + c1] = b * keep + mixed;
            data[r * dim + c1] *= keep;
            data[r1 * dim + c] *= keep;
        }
    }
}

/// `1 - (1 - eps1)^{n1} (1 - eps2)^{n2}`.
pub fn accumulated_error(n1: u64, n2: u64, eps1: f64, eps2: f64) -> f64 {
    1.0 - (1.0 - eps1).powf(n1 as f64) * (1.0 - eps2).powf(n2 as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{ghz_circuit, simulate, GateName};
    use crate::qcore::{apply_gate, PureState, State};
    use crate::{CMatrix, C64};

    fn pauli_kraus(rho: &DensityMatrix, q: usize, eps: f64) -> DensityMatrix {
        let (o, l, i) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 1.0));
        let paulis = [
            CMatrix::from_row_slice(2, 2, &[o, l, l, o]),
            CMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
            CMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
        ];
        let state = State::Mixed(rho.clone());
        let mut acc: Vec<C64> = rho.data().iter().map(|x| x * (1.0 - 0.75 * eps)).collect();
        for p in &paulis {
            let term = apply_gate(&state, p, &[q]).unwrap().to_density();
            for (a, b) in acc.iter_mut().zip(term.data()) {
                *a += b * (eps / 4.0);
            }
        }
        DensityMatrix::new(rho.n_sites(), 2, acc).unwrap()
    }

    fn max_diff(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
        a.data()
            .iter()
            .zip(b.data())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn matches_pauli_kraus_form() {
        let mut rng = crate::rng::seeded(1);
        let rho = DensityMatrix::random(3, 2, 3, &mut rng);
        for q in 0..3 {
            for eps in [0.0, 0.3, 1.0] {
                let mut a = rho.clone();
                depolarize_qubit(&mut a, q, eps);
                assert!(max_diff(&a, &pauli_kraus(&rho, q, eps)) < 1e-14);
            }
        }
    }

    #[test]
    fn noisy_ghz3_matches_channel_composition() {
        let circuit = ghz_circuit(3).unwrap();
        let model = NoiseModel::new(1e-4, 1e-3).unwrap();
        let out = simulate(&circuit, Some(&model)).unwrap().to_density();
        let mut oracle = PureState::zero(3, 2).to_density();
        for g in &circuit.gates {
            oracle = apply_gate(&State::Mixed(oracle), &g.matrix(), &g.targets)
                .unwrap()
                .to_density();
            let eps = if g.name == GateName::H { model.eps1 } else { model.eps2 };
            for &q in &g.targets {
                oracle = pauli_kraus(&oracle, q, eps);
            }
        }
        assert!(max_diff(&out, &oracle) < 1e-12);
        let purity = out.purity();
        assert!(purity < 1.0 && purity > 0.999f64.powi(2) * 0.9999 * 0.9);
    }

    #[test]
    fn purity_decreases_with_two_qubit_noise() {
        let circuit = ghz_circuit(3).unwrap();
        let purities: Vec<f64> = [0.0, 1e-3, 1e-2]
            .iter()
            .map(|&e2| {
                simulate(&circuit, Some(&NoiseModel::new(1e-4, e2).unwrap()))
                    .unwrap()
                    .purity()
            })
            .collect();
        assert!(purities.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn accumulated_error_examples() {
        assert!((accumulated_error(1, 8, 1e-4, 1e-3) - (1.0 - 0.9999 * 0.999f64.powi(8))).abs() < 1e-15);
        assert!((accumulated_error(1, 8, 1e-4, 1e-3) - 8.1e-3).abs() < 1e-4);
        assert_eq!(accumulated_error(10, 10, 0.0, 0.0), 0.0);
        let e = accumulated_error(333, 167, 1e-4, 1e-3);
        assert!((e - 0.181_584_578_313_6).abs() < 1e-12 && e < 0.2);
        assert!(NoiseModel::new(1.1, 0.0).is_err());
    }
}
