//! Dense state representations of `N` qudits and the linear-algebra kernels shared by the
//! rest of the crate.

mod basis;
pub mod kernel;
mod ops;
mod state;

pub use basis::{hamming, BasisString, SubsetIndex};
pub use ops::{
    apply_gate, is_unitary, outcome_distribution, reduced_density_matrix, reduced_purity, subset_purity_sum,
    LocalSetting,
};
pub(crate) use ops::{apply_unitary_mixed, apply_unitary_pure};
pub use state::{DensityMatrix, PureState, State};

/// Tolerance used when checking that matrices are unitary.
pub const UNITARY_TOL: f64 = 1e-10;
/// Tolerance on norms and traces of states.
pub const NORM_TOL: f64 = 1e-12;
/// Smallest eigenvalue accepted for a density matrix.
pub const EIGEN_TOL: f64 = 1e-10;

/// `d^n` with overflow reported as an error.
pub(crate) fn dim_of(n: usize, d: usize) -> crate::Result<usize> {
    u32::try_from(n)
        .ok()
        .and_then(|n| d.checked_pow(n))
        .ok_or_else(|| crate::Error::InvalidArgument(format!("dimension {d}^{n} overflows")))
}
