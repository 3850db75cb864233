use thiserror::Error;

use crate::lp::LpError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("effort index {0} out of range")]
    EffortIndex(usize),
    #[error("signal {signal} has zero likelihood under the reference effort")]
    ZeroLikelihood { signal: usize },
    #[error("no information structure realizes the requested likelihood points: {0}")]
    InfeasibleSynthesis(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("degenerate surplus: expected output under the first-best effort does not exceed the outside option")]
    DegenerateSurplus,
    #[error("quadrature did not converge (estimated error {0:.3e})")]
    Quadrature(f64),
    #[error("zero information: p'(e) = 0, effort cannot be incentivized")]
    ZeroInformation,
    #[error("no interior equilibrium: {0}")]
    NoInteriorEquilibrium(String),
    #[error("enumeration exceeds the cap of {0} structures")]
    BudgetExceeded(u64),
    #[error("internal consistency: {0}")]
    Internal(String),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
