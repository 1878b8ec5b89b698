//! Gate library, random circuit families, GHZ preparation and local depolarizing noise.
//!
//! Gates act on qubits (`d = 2`). Noisy simulation applies, after every gate, an
//! independent single-qubit depolarizing channel to each qubit the gate acted on.

mod families;
mod noise;

pub use families::{CircuitFamily, CircuitRegistry, CliffordFamily, IqpFamily, MatchgateFamily, UniversalFamily};
pub use noise::{accumulated_error, depolarize_qubit, NoiseModel};

use crate::qcore::{DensityMatrix, PureState, State};
use crate::{CMatrix, Error, Result, C64};
use serde::{Deserialize, Serialize};

/// Largest register simulated as a density matrix.
pub const MAX_NOISY_QUBITS: usize = 10;
const DET_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateName {
    H,
    T,
    S,
    CX,
    /// Matchgate: block `A` on `{|00>, |11>}`, block `B` on `{|01>, |10>}`, `det A = det B`.
    MG,
    /// Diagonal two-qubit gate `diag(e^{i phi_1}, ..., e^{i phi_4})`.
    D2,
}

impl GateName {
    pub fn arity(self) -> usize {
        match self {
            GateName::H | GateName::T | GateName::S => 1,
            GateName::CX | GateName::MG | GateName::D2 => 2,
        }
    }
}

/// One gate of a circuit. `blocks` holds the matchgate blocks `A` then `B` as row-major
/// `(re, im)` pairs; `phases` the four D2 phases.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateOp {
    pub name: GateName,
    pub targets: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub phases: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub blocks: Vec<f64>,
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn block(values: &[f64]) -> CMatrix {
    CMatrix::from_row_iterator(2, 2, values.chunks(2).map(|p| c(p[0], p[1])))
}

fn flatten(m: &CMatrix) -> Vec<f64> {
    (0..4)
        .flat_map(|i| [m[(i / 2, i % 2)].re, m[(i / 2, i % 2)].im])
        .collect()
}

fn det2(m: &CMatrix) -> C64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

impl GateOp {
    pub fn single(name: GateName, target: usize) -> Self {
        Self {
            name,
            targets: vec![target],
            phases: Vec::new(),
            blocks: Vec::new(),
        }
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Self {
            name: GateName::CX,
            targets: vec![control, target],
            phases: Vec::new(),
            blocks: Vec::new(),
        }
    }

    pub fn d2(a: usize, b: usize, phases: [f64; 4]) -> Self {
        Self {
            name: GateName::D2,
            targets: vec![a, b],
            phases: phases.to_vec(),
            blocks: Vec::new(),
        }
    }

    pub fn matchgate(a: usize, b: usize, block_a: &CMatrix, block_b: &CMatrix) -> Self {
        let mut blocks = flatten(block_a);
        blocks.extend(flatten(block_b));
        Self {
            name: GateName::MG,
            targets: vec![a, b],
            phases: Vec::new(),
            blocks,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.targets.len() != self.name.arity() {
            return Err(Error::InvalidArgument(format!(
                "{:?} takes {} targets",
                self.name,
                self.name.arity()
            )));
        }
        for (i, &t) in self.targets.iter().enumerate() {
            if t >= n {
                return Err(Error::SiteOutOfRange { site: t, n });
            }
            if self.targets[..i].contains(&t) {
                return Err(Error::InvalidArgument(format!(
                    "{:?} with repeated target {t}",
                    self.name
                )));
            }
        }
        match self.name {
            GateName::D2 => {
                if self.phases.len() != 4 || self.phases.iter().any(|p| !(0.0..std::f64::consts::TAU).contains(p)) {
                    return Err(Error::InvalidArgument("D2 needs four phases in [0, 2 pi)".into()));
                }
            }
            GateName::MG => {
                if self.blocks.len() != 16 {
                    return Err(Error::InvalidArgument("MG needs two 2x2 complex blocks".into()));
                }
                let (a, b) = (block(&self.blocks[..8]), block(&self.blocks[8..]));
                if (det2(&a) - det2(&b)).norm() > DET_TOL {
                    return Err(Error::InvalidArgument("MG blocks have different determinants".into()));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Unitary on the targets, first target most significant.
    pub fn matrix(&self) -> CMatrix {
        let (o, l) = (c(0.0, 0.0), c(1.0, 0.0));
        let r = std::f64::consts::FRAC_1_SQRT_2;
        match self.name {
            GateName::H => CMatrix::from_row_slice(2, 2, &[c(r, 0.0), c(r, 0.0), c(r, 0.0), c(-r, 0.0)]),
            GateName::T => CMatrix::from_row_slice(2, 2, &[l, o, o, C64::from_polar(1.0, std::f64::consts::FRAC_PI_4)]),
            GateName::S => CMatrix::from_row_slice(2, 2, &[l, o, o, c(0.0, 1.0)]),
            GateName::CX => CMatrix::from_row_slice(4, 4, &[l, o, o, o, o, l, o, o, o, o, o, l, o, o, l, o]),
            GateName::D2 => {
                let mut m = CMatrix::zeros(4, 4);
                for (i, &p) in self.phases.iter().enumerate() {
                    m[(i, i)] = C64::from_polar(1.0, p);
                }
                m
            }
            GateName::MG => {
                let (a, b) = (block(&self.blocks[..8]), block(&self.blocks[8..]));
                let mut m = CMatrix::zeros(4, 4);
                let (even, odd) = ([0, 3], [1, 2]);
                for i in 0..2 {
                    for j in 0..2 {
                        m[(even[i], even[j])] = a[(i, j)];
                        m[(odd[i], odd[j])] = b[(i, j)];
                    }
                }
                m
            }
        }
    }
}

/// A gate list on `n` qubits with its family tag and sampling seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitSpec {
    pub n: usize,
    pub family: String,
    pub seed: Option<u64>,
    pub gates: Vec<GateOp>,
}

impl CircuitSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("circuit on zero qubits".into()));
        }
        for g in &self.gates {
            g.validate(self.n)?;
        }
        if self.family == "iqp2" {
            let pairs = self.n * (self.n - 1) / 2;
            if self.gates.len() != pairs || self.gates.iter().any(|g| g.name != GateName::D2) {
                return Err(Error::InvalidArgument(format!(
                    "iqp2 circuit needs exactly {pairs} D2 gates"
                )));
            }
        }
        Ok(())
    }

    /// Total gate count `T`.
    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// `(single-qubit, two-qubit)` gate counts.
    pub fn gate_counts(&self) -> (usize, usize) {
        let two = self.gates.iter().filter(|g| g.name.arity() == 2).count();
        (self.gates.len() - two, two)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }
}

/// `H` on qubit 0 followed by a `CX` chain `(0, 1), (1, 2), ...`.
pub fn ghz_circuit(n: usize) -> Result<CircuitSpec> {
    if n < 2 {
        return Err(Error::InvalidArgument("GHZ circuit needs N >= 2".into()));
    }
    let mut gates = vec![GateOp::single(GateName::H, 0)];
    gates.extend((1..n).map(|i| GateOp::cx(i - 1, i)));
    Ok(CircuitSpec {
        n,
        family: "ghz".into(),
        seed: None,
        gates,
    })
}

fn hadamard_layer(state: &mut State, n: usize) -> Result<()> {
    let h = GateOp::single(GateName::H, 0).matrix();
    for q in 0..n {
        apply_in_place(state, &h, &[q])?;
    }
    Ok(())
}

fn apply_in_place(state: &mut State, gate: &CMatrix, targets: &[usize]) -> Result<()> {
    match state {
        State::Pure(p) => crate::qcore::apply_unitary_pure(p, gate, targets),
        State::Mixed(m) => crate::qcore::apply_unitary_mixed(m, gate, targets),
    }
}

/// Runs the circuit from `|0...0>`. Without noise the result is pure; with noise it is a
/// density matrix. `iqp2` circuits are wrapped in noiseless Hadamard layers, which prepares
/// `|+...+>` and reads out in the `X` basis.
pub fn simulate(circuit: &CircuitSpec, noise: Option<&NoiseModel>) -> Result<State> {
    circuit.validate()?;
    let n = circuit.n;
    let noise = noise.filter(|m| !m.is_noiseless());
    let mut state = match noise {
        None => State::Pure(PureState::zero(n, 2)),
        Some(model) => {
            model.validate()?;
            if n > MAX_NOISY_QUBITS {
                return Err(Error::Infeasible(format!(
                    "noisy simulation of {n} qubits (at most {MAX_NOISY_QUBITS})"
                )));
            }
            State::Mixed(PureState::zero(n, 2).to_density())
        }
    };
    let iqp = circuit.family == "iqp2";
    if iqp {
        hadamard_layer(&mut state, n)?;
    }
    for g in &circuit.gates {
        apply_in_place(&mut state, &g.matrix(), &g.targets)?;
        if let (Some(model), State::Mixed(rho)) = (noise, &mut state) {
            let eps = if g.name.arity() == 1 { model.eps1 } else { model.eps2 };
            for &q in &g.targets {
                depolarize_qubit(rho, q, eps);
            }
        }
    }
    if iqp {
        hadamard_layer(&mut state, n)?;
    }
    if let State::Mixed(rho) = &mut state {
        rho.renormalize();
    }
    Ok(state)
}

/// Noiseless output as a density matrix, for comparison with noisy runs.
pub fn simulate_density(circuit: &CircuitSpec, noise: &NoiseModel) -> Result<DensityMatrix> {
    Ok(simulate(circuit, Some(noise))?.to_density())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{apply_gate, PureState};

    #[test]
    fn ghz_circuit_prepares_ghz() {
        let c = ghz_circuit(2).unwrap();
        assert_eq!(c.gates, vec![GateOp::single(GateName::H, 0), GateOp::cx(0, 1)]);
        assert_eq!(ghz_circuit(4).unwrap().len(), 4);
        for n in 2..=8 {
            let out = simulate(&ghz_circuit(n).unwrap(), None).unwrap();
            let State::Pure(psi) = out else { panic!("pure") };
            assert!((psi.fidelity(&PureState::ghz(n)).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(ghz_circuit(1).is_err());
    }

    #[test]
    fn zero_noise_keeps_the_state_pure() {
        let out = simulate(&ghz_circuit(2).unwrap(), Some(&NoiseModel::new(0.0, 0.0).unwrap())).unwrap();
        assert!(out.is_pure());
    }

    #[test]
    fn full_depolarization_after_hadamard() {
        let c = CircuitSpec {
            n: 1,
            family: "custom".into(),
            seed: None,
            gates: vec![GateOp::single(GateName::H, 0)],
        };
        let out = simulate(&c, Some(&NoiseModel::new(1.0, 0.0).unwrap()))
            .unwrap()
            .to_density();
        let mm = DensityMatrix::maximally_mixed(1, 2);
        assert!(out.data().iter().zip(mm.data()).all(|(a, b)| (a - b).norm() < 1e-15));
    }

    #[test]
    fn gate_matrices_are_unitary_and_validated() {
        for g in [GateName::H, GateName::T, GateName::S] {
            assert!(crate::qcore::is_unitary(&GateOp::single(g, 0).matrix(), 1e-12));
        }
        assert!(crate::qcore::is_unitary(&GateOp::cx(0, 1).matrix(), 1e-12));
        let d2 = GateOp::d2(0, 1, [0.1, 1.0, 2.0, 6.0]);
        assert!(d2.validate(2).is_ok());
        assert!(GateOp::d2(0, 1, [0.1, 1.0, 2.0, 7.0]).validate(2).is_err());
        assert!(GateOp::cx(0, 0).validate(2).is_err());
        assert!(GateOp::cx(0, 2).validate(2).is_err());
        let a = CMatrix::identity(2, 2);
        let b = GateOp::single(GateName::S, 0).matrix();
        assert!(GateOp::matchgate(0, 1, &a, &b).validate(2).is_err());
    }

    #[test]
    fn cx_convention_matches_qcore() {
        let plus = apply_gate(
            &State::Pure(PureState::zero(2, 2)),
            &GateOp::single(GateName::H, 0).matrix(),
            &[0],
        )
        .unwrap();
        let bell = apply_gate(&plus, &GateOp::cx(0, 1).matrix(), &[0, 1]).unwrap();
        let State::Pure(psi) = bell else { panic!() };
        assert!((psi.fidelity(&PureState::ghz(2)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let mut c = ghz_circuit(3).unwrap();
        c.gates.push(GateOp::d2(
            0,
            2,
            [0.1, 0.2, 0.30000000000000004, std::f64::consts::TAU - 1e-9],
        ));
        c.family = "custom".into();
        c.seed = Some(7);
        let text = c.to_json().unwrap();
        assert!(
            text.starts_with("{\"n\":3,\"family\":\"custom\",\"seed\":7,\"gates\":[{\"name\":\"H\",\"targets\":[0]}")
        );
        assert_eq!(CircuitSpec::from_json(&text).unwrap(), c);
    }
}
