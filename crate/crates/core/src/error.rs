use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("site index {site} out of range for {n} sites")]
    SiteOutOfRange { site: usize, n: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("state is not valid: {0}")]
    InvalidState(String),
    #[error("insufficient shots: estimator of order {order} needs K >= {order}, got {shots}")]
    InsufficientShots { order: usize, shots: u64 },
    #[error("infeasible exact evaluation: {0}")]
    Infeasible(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("missing moment data: {0}")]
    MissingMoment(String),
    #[error("error cannot be propagated: {0}")]
    NonPropagable(String),
    #[error("no feasible (M, K) pair on the planner grid: {0}")]
    NoFeasibleBudget(String),
    #[error("unknown {kind} '{name}'")]
    UnknownName { kind: &'static str, name: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
