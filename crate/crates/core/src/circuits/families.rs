use super::{CircuitSpec, GateName, GateOp};
use crate::haar::sample_unitary;
use crate::rng::SimRng;
use crate::{Error, Result};
use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::BTreeMap;

/// A named ensemble of random circuits.
pub trait CircuitFamily: Send + Sync {
    fn name(&self) -> &'static str;
    /// Draws one circuit with `t` gates (families with a fixed length ignore `t`).
    fn sample(&self, n: usize, t: usize, rng: &mut SimRng) -> Result<CircuitSpec>;
}

fn random_pair(n: usize, rng: &mut SimRng) -> (usize, usize) {
    let a = rng.random_range(0..n);
    let mut b = rng.random_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    (a, b)
}

fn sample_from_set(name: &str, set: &[GateName], n: usize, t: usize, rng: &mut SimRng) -> Result<CircuitSpec> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("{name} circuits need N >= 2")));
    }
    let gates = (0..t)
        .map(|_| match set[rng.random_range(0..set.len())] {
            GateName::CX => {
                let (a, b) = random_pair(n, rng);
                GateOp::cx(a, b)
            }
            g => GateOp::single(g, rng.random_range(0..n)),
        })
        .collect();
    Ok(CircuitSpec {
        n,
        family: name.into(),
        seed: None,
        gates,
    })
}

/// Uniform choice from `{H, T, CX}` with uniformly random targets.
pub struct UniversalFamily;

impl CircuitFamily for UniversalFamily {
    fn name(&self) -> &'static str {
        "uni"
    }

    fn sample(&self, n: usize, t: usize, rng: &mut SimRng) -> Result<CircuitSpec> {
        sample_from_set(self.name(), &[GateName::H, GateName::T, GateName::CX], n, t, rng)
    }
}

/// Uniform choice from `{H, S, CX}` with uniformly random targets.
pub struct CliffordFamily;

impl CircuitFamily for CliffordFamily {
    fn name(&self) -> &'static str {
        "clifford"
    }

    fn sample(&self, n: usize, t: usize, rng: &mut SimRng) -> Result<CircuitSpec> {
        sample_from_set(self.name(), &[GateName::H, GateName::S, GateName::CX], n, t, rng)
    }
}

/// Random matchgates on uniformly chosen nearest-neighbour pairs `(i, i+1)`. Block `A` is
/// Haar on `U(2)`; block `B` is Haar on `SU(2)` times `sqrt(det A)`.
pub struct MatchgateFamily;

impl CircuitFamily for MatchgateFamily {
    fn name(&self) -> &'static str {
        "mg"
    }

    fn sample(&self, n: usize, t: usize, rng: &mut SimRng) -> Result<CircuitSpec> {
        if n < 2 {
            return Err(Error::InvalidArgument("mg circuits need N >= 2".into()));
        }
        let gates = (0..t)
            .map(|_| {
                let i = rng.random_range(0..n - 1);
                let a = sample_unitary(2, rng);
                let b = sample_unitary(2, rng);
                let det = |m: &crate::CMatrix| m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
                let b_special = &b / det(&b).sqrt();
                let b_matched = b_special * det(&a).sqrt();
                GateOp::matchgate(i, i + 1, &a, &b_matched)
            })
            .collect();
        Ok(CircuitSpec {
            n,
            family: self.name().into(),
            seed: None,
            gates,
        })
    }
}

/// One `D2` gate with four uniform phases on every unordered pair, in shuffled order.
pub struct IqpFamily;

impl CircuitFamily for IqpFamily {
    fn name(&self) -> &'static str {
        "iqp2"
    }

    fn sample(&self, n: usize, _t: usize, rng: &mut SimRng) -> Result<CircuitSpec> {
        if n < 2 {
            return Err(Error::InvalidArgument("iqp2 circuits need N >= 2".into()));
        }
        let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        pairs.shuffle(rng);
        let gates = pairs
            .into_iter()
            .map(|(a, b)| {
                let mut phases = [0.0; 4];
                phases
                    .iter_mut()
                    .for_each(|p| *p = rng.random_range(0.0..std::f64::consts::TAU));
                GateOp::d2(a, b, phases)
            })
            .collect();
        Ok(CircuitSpec {
            n,
            family: self.name().into(),
            seed: None,
            gates,
        })
    }
}

/// Circuit families selectable by name.
pub struct CircuitRegistry {
    families: BTreeMap<&'static str, Box<dyn CircuitFamily>>,
}

impl Default for CircuitRegistry {
    fn default() -> Self {
        let mut reg = Self {
            families: BTreeMap::new(),
        };
        reg.register(Box::new(UniversalFamily));
        reg.register(Box::new(CliffordFamily));
        reg.register(Box::new(MatchgateFamily));
        reg.register(Box::new(IqpFamily));
        reg
    }
}

impl CircuitRegistry {
    pub fn register(&mut self, family: Box<dyn CircuitFamily>) {
        self.families.insert(family.name(), family);
    }

    pub fn get(&self, name: &str) -> Result<&dyn CircuitFamily> {
        self.families
            .get(name)
            .map(|f| f.as_ref())
            .ok_or_else(|| Error::UnknownName {
                kind: "circuit family",
                name: name.into(),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.families.keys().copied().collect()
    }

    /// Samples a circuit from `family` with its own seed, recorded in the circuit.
    pub fn sample_seeded(&self, family: &str, n: usize, t: usize, seed: u64) -> Result<CircuitSpec> {
        let mut rng = crate::rng::seeded(seed);
        let mut spec = self.get(family)?.sample(n, t, &mut rng)?;
        spec.seed = Some(seed);
        Ok(spec)
    }
}
