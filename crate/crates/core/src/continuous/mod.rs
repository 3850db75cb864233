//! Continuous outcomes and efforts on `[0,1]` under the first-order approach.

pub mod assumption;
pub mod equilibrium;
pub mod foc;
pub mod model;
pub mod threshold;

pub use assumption::{verify_assumption, AssumptionReport, AssumptionWitness};
pub use equilibrium::{
    first_best, principal_response, solve_equilibrium, solve_equilibrium_with,
    ContinuousEquilibrium, FirstBest, Response, SolveOptions,
};
pub use foc::{estimate_eta, foc_sign_pattern, FocReport};
pub use model::{ContinuousModel, Cost, Family, Payoff};
pub use threshold::{multiplier, signal_prob, PaidSignal, ThresholdStructure};
