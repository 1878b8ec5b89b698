//! Multiparticle concurrence from randomized measurements.
//!
//! The crate is organised bottom-up:
//!
//! * [`qcore`] dense pure/mixed states of `N` qudits and the kernels acting on them,
//! * [`haar`] Haar sampling, symmetric-group twirls and the exact moment engine,
//! * [`protocol`] simulated randomized-measurement datasets and unbiased estimators,
//! * [`concurrence`] concurrence quantifiers, the mixed-state bound and reference values,
//! * [`stats`] closed-form variances, confidence intervals and the budget planner,
//! * [`circuits`] random circuit families with depolarizing noise,
//! * [`pipeline`] end-to-end concurrence estimates with error bars,
//! * [`validate`] self-check suites used by the command line runner.
//!
//! Site indices are zero-based throughout. Basis strings are encoded with site 0 as the
//! most significant digit, see [`qcore::BasisString`].

pub mod circuits;
pub mod concurrence;
mod error;
pub mod haar;
pub mod pipeline;
pub mod protocol;
pub mod qcore;
pub mod rng;
pub mod stats;
pub mod validate;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Dense complex matrix used for gates, local unitaries and twirl kernels.
pub type CMatrix = nalgebra::DMatrix<C64>;
