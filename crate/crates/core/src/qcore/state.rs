use super::{dim_of, BasisString, EIGEN_TOL, NORM_TOL};
use crate::{CMatrix, Error, Result, C64};
use rand::Rng;
use rand_distr::StandardNormal;

/// Pure state of `n` qudits stored as `d^n` amplitudes, indexed by [`BasisString::encode`].
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n: usize,
    d: usize,
    amps: Vec<C64>,
}

impl PureState {
    /// Validating constructor; the squared norm must be 1 within `1e-12`.
    pub fn new(n: usize, d: usize, amps: Vec<C64>) -> Result<Self> {
        let dim = dim_of(n, d)?;
        if amps.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for dimension {dim}",
                amps.len()
            )));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("squared norm {norm} differs from 1")));
        }
        Ok(Self { n, d, amps })
    }

    /// Rescales the amplitudes to unit norm.
    pub fn normalized(n: usize, d: usize, mut amps: Vec<C64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("zero or non-finite vector".into()));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Self::new(n, d, amps)
    }

    pub fn basis(s: &BasisString) -> Self {
        let (n, d) = (s.len(), s.local_dim());
        let mut amps = vec![C64::new(0.0, 0.0); d.pow(n as u32)];
        amps[s.encode()] = C64::new(1.0, 0.0);
        Self { n, d, amps }
    }

    pub fn zero(n: usize, d: usize) -> Self {
        Self::basis(&BasisString::zeros(n, d))
    }

    /// `(|0...0> + |1...1>)/sqrt(2)` on `n` qubits.
    pub fn ghz(n: usize) -> Self {
        let dim = 1usize << n;
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        let h = std::f64::consts::FRAC_1_SQRT_2;
        amps[0] = C64::new(h, 0.0);
        amps[dim - 1] += C64::new(h, 0.0);
        if n == 0 {
            amps[0] = C64::new(1.0, 0.0);
        }
        Self { n, d: 2, amps }
    }

    /// Tensor product of single-qudit states; each factor is normalized.
    pub fn product(factors: &[Vec<C64>]) -> Result<Self> {
        let d = factors.first().map(|f| f.len()).unwrap_or(2);
        let mut amps = vec![C64::new(1.0, 0.0)];
        for f in factors {
            if f.len() != d {
                return Err(Error::DimensionMismatch(
                    "product factors of different dimension".into(),
                ));
            }
            let norm = f.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            amps = amps.iter().flat_map(|a| f.iter().map(move |b| a * b / norm)).collect();
        }
        Self::new(factors.len(), d, amps)
    }

    /// Random product of Haar-random single-qudit states.
    pub fn random_product<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Self {
        let factors: Vec<Vec<C64>> = (0..n).map(|_| gaussian_vector(d, rng)).collect();
        Self::product(&factors).expect("gaussian factors are nonzero")
    }

    pub fn n_sites(&self) -> usize {
        self.n
    }

    pub fn local_dim(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.amps.len() != other.amps.len() {
            return Err(Error::DimensionMismatch(
                "inner product of states of different dimension".into(),
            ));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn to_density(&self) -> DensityMatrix {
        let dim = self.dim();
        let mut data = vec![C64::new(0.0, 0.0); dim * dim];
        for (r, a) in self.amps.iter().enumerate() {
            for (c, b) in self.amps.iter().enumerate() {
                data[r * dim + c] = a * b.conj();
            }
        }
        DensityMatrix {
            n: self.n,
            d: self.d,
            data,
        }
    }
}

pub(crate) fn gaussian_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<C64> {
    (0..dim)
        .map(|_| {
            C64::new(
                rng.sample::<f64, _>(StandardNormal),
                rng.sample::<f64, _>(StandardNormal),
            )
        })
        .collect()
}

/// Density operator of `n` qudits, stored row-major as a `d^n x d^n` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    d: usize,
    data: Vec<C64>,
}

impl DensityMatrix {
    /// Validating constructor: Hermitian and unit trace within `1e-12`, eigenvalues at
    /// least `-1e-10`.
    pub fn new(n: usize, d: usize, data: Vec<C64>) -> Result<Self> {
        let dim = dim_of(n, d)?;
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {dim}x{dim} matrix",
                data.len()
            )));
        }
        let rho = Self { n, d, data };
        rho.validate()?;
        Ok(rho)
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.dim();
        let mut herm = 0.0f64;
        for r in 0..dim {
            for c in 0..dim {
                herm = herm.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        if herm > NORM_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:.3e})")));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min < -EIGEN_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }

    pub fn maximally_mixed(n: usize, d: usize) -> Self {
        let dim = d.pow(n as u32);
        let mut data = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = C64::new(1.0 / dim as f64, 0.0);
        }
        Self { n, d, data }
    }

    /// `(1 - q) rho + q 1/D`: global depolarization with strength `q` in `[0, 1]`.
    pub fn depolarized(&self, q: f64) -> Self {
        let dim = self.dim();
        let mut out = self.clone();
        out.data.iter_mut().for_each(|x| *x *= 1.0 - q);
        for i in 0..dim {
            out.data[i * dim + i] += q / dim as f64;
        }
        out
    }

    /// Random mixed state `G G^dag / tr(G G^dag)` with `G` a complex Gaussian
    /// `dim x rank` matrix (the induced measure).
    pub fn random<R: Rng + ?Sized>(n: usize, d: usize, rank: usize, rng: &mut R) -> Self {
        let dim = d.pow(n as u32);
        let g = CMatrix::from_vec(dim, rank, gaussian_vector(dim * rank, rng));
        let rho = &g * g.adjoint();
        let tr: f64 = (0..dim).map(|i| rho[(i, i)].re).sum();
        let data = (0..dim * dim).map(|k| rho[(k / dim, k % dim)] / tr).collect();
        Self { n, d, data }
    }

    pub fn n_sites(&self) -> usize {
        self.n
    }

    pub fn local_dim(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.d.pow(self.n as u32)
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.dim() + c]
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn trace(&self) -> C64 {
        let dim = self.dim();
        (0..dim).map(|i| self.data[i * dim + i]).sum()
    }

    /// `tr(rho^2)`, computed as the squared Frobenius norm.
    pub fn purity(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum()
    }

    pub fn to_matrix(&self) -> CMatrix {
        let dim = self.dim();
        CMatrix::from_fn(dim, dim, |r, c| self.get(r, c))
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.to_matrix().symmetric_eigenvalues().iter().copied().collect()
    }

    /// `<psi| rho |psi>`.
    pub fn fidelity_with(&self, psi: &PureState) -> Result<f64> {
        let dim = self.dim();
        if psi.dim() != dim {
            return Err(Error::DimensionMismatch(
                "fidelity of states of different dimension".into(),
            ));
        }
        let a = psi.amplitudes();
        let mut acc = C64::new(0.0, 0.0);
        for r in 0..dim {
            for c in 0..dim {
                acc += a[r].conj() * self.data[r * dim + c] * a[c];
            }
        }
        Ok(acc.re)
    }

    /// Divides by the trace when it has drifted by more than `1e-12`. Returns whether the
    /// state was rescaled.
    pub fn renormalize(&mut self) -> bool {
        let tr = self.trace().re;
        if (tr - 1.0).abs() > NORM_TOL {
            log::warn!("density matrix trace drifted to {tr:.15}; renormalizing");
            self.data.iter_mut().for_each(|x| *x /= tr);
            true
        } else {
            false
        }
    }
}

/// Either kind of state. Most operations accept both.
#[derive(Clone, Debug, PartialEq)]
pub enum State {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl State {
    pub fn n_sites(&self) -> usize {
        match self {
            State::Pure(p) => p.n_sites(),
            State::Mixed(m) => m.n_sites(),
        }
    }

    pub fn local_dim(&self) -> usize {
        match self {
            State::Pure(p) => p.local_dim(),
            State::Mixed(m) => m.local_dim(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            State::Pure(p) => p.dim(),
            State::Mixed(m) => m.dim(),
        }
    }

    pub fn is_pure(&self) -> bool {
        matches!(self, State::Pure(_))
    }

    pub fn purity(&self) -> f64 {
        match self {
            State::Pure(_) => 1.0,
            State::Mixed(m) => m.purity(),
        }
    }

    pub fn to_density(&self) -> DensityMatrix {
        match self {
            State::Pure(p) => p.to_density(),
            State::Mixed(m) => m.clone(),
        }
    }
}

impl From<PureState> for State {
    fn from(p: PureState) -> Self {
        State::Pure(p)
    }
}

impl From<DensityMatrix> for State {
    fn from(m: DensityMatrix) -> Self {
        State::Mixed(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn constructors_validate() {
        assert!(PureState::new(1, 2, vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).is_err());
        assert!(PureState::new(1, 2, vec![C64::new(1.0, 0.0)]).is_err());
        let bad = vec![
            C64::new(0.5, 0.0),
            C64::new(0.0, 0.1),
            C64::new(0.0, 0.0),
            C64::new(0.5, 0.0),
        ];
        assert!(DensityMatrix::new(1, 2, bad).is_err());
        let neg = vec![
            C64::new(1.5, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(-0.5, 0.0),
        ];
        assert!(DensityMatrix::new(1, 2, neg).is_err());
    }

    #[test]
    fn ghz_and_mixtures() {
        let g = PureState::ghz(3);
        assert!((g.amplitudes()[0].re - g.amplitudes()[7].re).abs() < 1e-15);
        let rho = g.to_density().depolarized(0.5);
        rho.validate().unwrap();
        let mut rng = seeded(3);
        let r = DensityMatrix::random(2, 2, 4, &mut rng);
        r.validate().unwrap();
        assert!(r.purity() < 1.0);
    }

    #[test]
    fn depolarized_ghz2_purity() {
        // 0.5 |GHZ><GHZ| + 0.5 1/4: purity 0.25 + 2*0.25*0.25 + 0.25*0.25 = 0.4375
        let rho = PureState::ghz(2).to_density().depolarized(0.5);
        assert!((rho.purity() - 0.4375).abs() < 1e-12);
    }
}
