//! Brute-force cross-checks: exhaustive search over gridded binary
//! structures, a finite discretization of continuous models, and a verifier
//! for claimed agent-optimal solutions.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agent::AgentSolution;
use crate::continuous::ContinuousModel;
use crate::design::{ExtractionCertificate, VERIFY_TOL};
use crate::error::{Error, Result};
use crate::model::{Effort, InformationStructure, ModelInstance, Outcome};
use crate::principal::{best_effort, SubgameOutcome};

/// Default cap on the number of enumerated grid points.
pub const MAX_GRID_POINTS: u64 = 10_000_000;
/// Probability floor applied to discretized cells.
pub const MASS_FLOOR: f64 = 1e-12;
/// Slack allowed in the agent's incentive constraints of a claimed contract.
pub const IC_TOL: f64 = 1e-9;

/// Outcome of checking a claimed solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Verified {
        claimed_value: f64,
        recomputed_value: f64,
        grid_best: f64,
        resolution_bound: f64,
    },
    Refuted {
        reason: String,
        /// High-signal probabilities of a grid structure beating the claim.
        counterexample: Option<Vec<f64>>,
    },
}

impl Verdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, Self::Verified { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    /// Exact maximum of the agent's payoff over the grid.
    pub best_value: f64,
    /// `q(x) = pi(H|x)` at the first grid point attaining the maximum.
    pub best_q: Vec<f64>,
    pub best_structure: InformationStructure,
    pub best_outcome: SubgameOutcome,
    pub delta: f64,
    pub evaluations: u64,
    /// `2 |X| delta S`, see [`resolution_bound`].
    pub resolution_bound: f64,
    pub verdict: Option<Verdict>,
}

fn grid_levels(delta: f64) -> Result<Vec<f64>> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Invalid(format!("grid step {delta} outside (0, 1]")));
    }
    let n = (1.0 / delta - 1e-9).ceil() as usize;
    Ok((0..=n).map(|k| (k as f64 * delta).min(1.0)).collect())
}

/// Lipschitz-style slack between the grid maximum and the true maximum:
/// `2 |X| delta S` with `S = max_e max(E[g|e] - E[g|e_1], c(e))`. No expected
/// wage the principal is willing to pay exceeds `S`, and moving each `q(x)`
/// by at most `delta` moves every signal probability by at most `|X| delta`.
pub fn resolution_bound(m: &ModelInstance, delta: f64) -> f64 {
    let base = m.expected_output(0);
    let scale = (0..m.num_efforts())
        .map(|e| (m.expected_output(e) - base).max(m.cost(e)))
        .fold(0.0, f64::max);
    2.0 * m.num_outcomes() as f64 * delta * scale
}

/// Enumerates `q ∈ {0, delta, 2 delta, .., 1}^X`, solves the principal's
/// subgame by linear programming at every point and returns the best agent
/// payoff. No pruning.
pub fn grid_search_binary(m: &ModelInstance, delta: f64) -> Result<OracleReport> {
    grid_search_binary_capped(m, delta, MAX_GRID_POINTS)
}

pub fn grid_search_binary_capped(m: &ModelInstance, delta: f64, cap: u64) -> Result<OracleReport> {
    let levels = grid_levels(delta)?;
    let nx = m.num_outcomes();
    let base = levels.len() as u64;
    let total = (0..nx).try_fold(1u64, |acc, _| acc.checked_mul(base));
    let total = match total {
        Some(t) if t <= cap => t,
        _ => return Err(Error::BudgetExceeded(cap)),
    };
    let decode = |mut k: u64| -> Vec<f64> {
        let mut q = vec![0.0; nx];
        for v in q.iter_mut() {
            *v = levels[(k % base) as usize];
            k /= base;
        }
        q
    };
    let (best_value, best_index) = (0..total)
        .into_par_iter()
        .map(|k| {
            let out = best_effort(m, &InformationStructure::binary(&decode(k)))?;
            Ok::<_, Error>((out.agent_payoff, k))
        })
        .try_reduce(
            || (f64::NEG_INFINITY, u64::MAX),
            |a, b| {
                // Larger value wins, ties go to the lower index.
                Ok::<_, Error>(if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a })
            },
        )?;
    let best_q = decode(best_index);
    let best_structure = InformationStructure::binary(&best_q);
    let best_outcome = best_effort(m, &best_structure)?;
    Ok(OracleReport {
        best_value,
        best_q,
        best_structure,
        best_outcome,
        delta,
        evaluations: total,
        resolution_bound: resolution_bound(m, delta),
        verdict: None,
    })
}

/// Midpoint-cell discretization: outcome `j` sits at `(j + 1/2)/nx` and
/// carries the mass of its cell, effort `i` is `i/(ne - 1)`.
pub fn discretize_continuous(cm: &ContinuousModel, nx: usize, ne: usize) -> Result<ModelInstance> {
    if nx < 2 || ne < 2 {
        return Err(Error::Invalid(format!("need nx, ne >= 2, got {nx} and {ne}")));
    }
    let outcomes = (0..nx)
        .map(|j| {
            let x = (j as f64 + 0.5) / nx as f64;
            Outcome {
                label: format!("x{:.6}", x),
                g: cm.payoff.eval(x),
            }
        })
        .collect();
    let grid: Vec<f64> = (0..ne).map(|i| i as f64 / (ne - 1) as f64).collect();
    let efforts = grid
        .iter()
        .map(|&e| Effort {
            label: format!("e{:.6}", e),
            c: if e == 0.0 { 0.0 } else { cm.cost.eval(e)[0] },
        })
        .collect();
    let f = grid
        .iter()
        .map(|&e| {
            let row: Vec<f64> = (0..nx)
                .map(|j| {
                    let a = j as f64 / nx as f64;
                    let b = (j + 1) as f64 / nx as f64;
                    (cm.family.cdf(b, e) - cm.family.cdf(a, e)).max(MASS_FLOOR)
                })
                .collect();
            let total: f64 = row.iter().sum();
            row.into_iter().map(|v| v / total).collect()
        })
        .collect();
    ModelInstance::new(outcomes, efforts, f)
}

/// A claimed agent-optimal solution: a structure, the effort it induces, the
/// contract the principal offers and the agent's payoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub structure: InformationStructure,
    pub effort: usize,
    pub wages: Vec<f64>,
    pub agent_value: f64,
}

impl Claim {
    pub fn from_outcome(structure: &InformationStructure, outcome: &SubgameOutcome) -> Self {
        Self {
            structure: structure.clone(),
            effort: outcome.chosen_effort,
            wages: outcome.wage_schedule.0.clone(),
            agent_value: outcome.agent_payoff,
        }
    }

    /// Reads any report carrying top-level `structure` and `outcome` fields,
    /// such as a serialized [`AgentSolution`] or [`ExtractionCertificate`].
    pub fn from_report_json(value: &serde_json::Value) -> Result<Self> {
        #[derive(Deserialize)]
        struct Carrier {
            structure: InformationStructure,
            outcome: SubgameOutcome,
        }
        let c: Carrier = serde_json::from_value(value.clone())?;
        c.structure.validate()?;
        Ok(Self::from_outcome(&c.structure, &c.outcome))
    }
}

impl From<&AgentSolution> for Claim {
    fn from(s: &AgentSolution) -> Self {
        Self::from_outcome(&s.structure, &s.outcome)
    }
}

impl From<&ExtractionCertificate> for Claim {
    fn from(c: &ExtractionCertificate) -> Self {
        Self::from_outcome(&c.structure, &c.outcome)
    }
}

fn refuted(reason: String, counterexample: Option<Vec<f64>>) -> Verdict {
    Verdict::Refuted {
        reason,
        counterexample,
    }
}

/// Checks the claimed contract directly, then against an exact re-solve of
/// the subgame and against the grid maximum.
fn check_claim(m: &ModelInstance, claim: &Claim) -> Result<std::result::Result<f64, Verdict>> {
    let pi = &claim.structure;
    if pi.validate().is_err() || pi.num_outcomes() != m.num_outcomes() {
        return Ok(Err(refuted("claimed structure is not a valid garbling of X".into(), None)));
    }
    if claim.effort >= m.num_efforts() || claim.wages.len() != pi.num_signals() {
        return Ok(Err(refuted("claimed effort or wage vector has the wrong shape".into(), None)));
    }
    if let Some(s) = claim.wages.iter().position(|&w| !(w >= -IC_TOL)) {
        return Ok(Err(refuted(format!("wage on signal {s} violates limited liability"), None)));
    }
    let p = m.induce(pi)?;
    let utility = |e: usize| -> f64 {
        p.p[e].iter().zip(&claim.wages).map(|(a, w)| a * w).sum::<f64>() - m.cost(e)
    };
    let own = utility(claim.effort);
    for alt in 0..m.num_efforts() {
        if utility(alt) > own + IC_TOL {
            return Ok(Err(refuted(
                format!(
                    "agent prefers {} ({:.9}) to the claimed {} ({:.9})",
                    m.efforts[alt].label, utility(alt), m.efforts[claim.effort].label, own
                ),
                None,
            )));
        }
    }
    if (own - claim.agent_value).abs() > VERIFY_TOL {
        return Ok(Err(refuted(
            format!("claimed value {} but the contract pays {own}", claim.agent_value),
            None,
        )));
    }
    let exact = best_effort(m, pi)?;
    if exact.chosen_effort != claim.effort || (exact.agent_payoff - claim.agent_value).abs() > VERIFY_TOL {
        return Ok(Err(refuted(
            format!(
                "principal's best response is {} with agent payoff {}",
                exact.chosen_label, exact.agent_payoff
            ),
            None,
        )));
    }
    Ok(Ok(exact.agent_payoff))
}

/// Re-solves the claim exactly and compares it with [`grid_search_binary`]:
/// the claim must satisfy `claimed >= grid best - resolution bound`.
pub fn verify_solution(m: &ModelInstance, claim: &Claim, delta: f64) -> Result<OracleReport> {
    let mut report = grid_search_binary(m, delta)?;
    let verdict = match check_claim(m, claim)? {
        Err(v) => v,
        Ok(recomputed) if recomputed < report.best_value - report.resolution_bound => refuted(
            format!(
                "grid point reaches {} > claimed {} + bound {}",
                report.best_value, recomputed, report.resolution_bound
            ),
            Some(report.best_q.clone()),
        ),
        Ok(recomputed) => Verdict::Verified {
            claimed_value: claim.agent_value,
            recomputed_value: recomputed,
            grid_best: report.best_value,
            resolution_bound: report.resolution_bound,
        },
    };
    report.verdict = Some(verdict);
    Ok(report)
}
