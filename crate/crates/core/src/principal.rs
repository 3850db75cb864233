//! The principal's second stage: cheapest incentive-compatible wages for each
//! effort, then the profit-maximizing effort.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{Cmp, LinearProgram, LpError};
use crate::model::{InformationStructure, ModelInstance, SignalDistribution};

/// Principal payoffs within this distance count as ties.
pub const TIE_TOL: f64 = 1e-9;

/// Limited-liability wages indexed by signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WageSchedule(pub Vec<f64>);

impl WageSchedule {
    pub fn zeros(k: usize) -> Self {
        Self(vec![0.0; k])
    }

    /// `sum_s p(s|e) w(s)`.
    pub fn expected_under(&self, p_e: &[f64]) -> f64 {
        p_e.iter().zip(&self.0).map(|(p, w)| p * w).sum()
    }
}

#[derive(Debug, Clone)]
pub struct MinWage {
    pub wages: WageSchedule,
    /// `W(e, pi)`.
    pub value: f64,
    /// Dual objective of the wage program; equals `value` at optimality.
    pub dual_value: f64,
}

/// Solves `min sum_s p(s|e) w(s)` over `w >= 0` subject to the agent
/// preferring `e` to every alternative. `Ok(None)` means `e` cannot be
/// implemented under this structure.
pub fn min_wage(m: &ModelInstance, p: &SignalDistribution, e: usize) -> Result<Option<MinWage>> {
    m.check_effort(e)?;
    if p.p.len() != m.num_efforts() {
        return Err(Error::Dimension("signal distribution rows must match efforts".into()));
    }
    let pe = &p.p[e];
    let mut lp = LinearProgram::minimize(pe.clone());
    for (alt, p_alt) in p.p.iter().enumerate() {
        if alt == e {
            continue;
        }
        let coefs = pe.iter().zip(p_alt).map(|(a, b)| a - b).collect();
        lp.add(coefs, Cmp::Ge, m.cost(e) - m.cost(alt));
    }
    match lp.solve() {
        Ok(sol) => {
            let dual_value = sol.dual_objective(&lp);
            Ok(Some(MinWage {
                value: sol.objective,
                wages: WageSchedule(sol.x),
                dual_value,
            }))
        }
        Err(LpError::Infeasible { .. }) => Ok(None),
        Err(LpError::Unbounded) => Err(Error::Internal(
            "wage program unbounded although wages are nonnegative".into(),
        )),
        Err(e) => Err(e.into()),
    }
}

/// Closed-form minimum wage for a binary structure with `P(H|e) = p_high[e]`.
///
/// Only the spread `d = w_H - w_L` matters for incentives; the cheapest
/// schedule pays on one signal only, costing `p_H d` for `d >= 0` and
/// `(1 - p_H)(-d)` otherwise. Returns `(W, w_H, w_L)`.
pub fn binary_min_wage(m: &ModelInstance, p_high: &[f64], e: usize) -> Option<(f64, f64, f64)> {
    let pe = p_high[e];
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for (alt, &pa) in p_high.iter().enumerate() {
        if alt == e {
            continue;
        }
        let dc = m.cost(e) - m.cost(alt);
        let dp = pe - pa;
        if dp > 0.0 {
            lo = lo.max(dc / dp);
        } else if dp < 0.0 {
            hi = hi.min(dc / dp);
        } else if dc > 0.0 {
            return None;
        }
    }
    if lo > hi + 1e-12 * (1.0 + hi.abs()) {
        return None;
    }
    let d = 0.0_f64.clamp(lo, hi.max(lo));
    if d >= 0.0 {
        Some((pe * d, d, 0.0))
    } else {
        Some(((1.0 - pe) * -d, 0.0, -d))
    }
}

/// Principal's choice and the per-effort minimum wages for a binary
/// structure `pi(H|x) = q[x]`, without solving any LP.
pub fn binary_subgame(m: &ModelInstance, q: &[f64]) -> (usize, Vec<Option<f64>>) {
    let p_high: Vec<f64> = m
        .f
        .iter()
        .map(|row| row.iter().zip(q).map(|(f, q)| f * q).sum())
        .collect();
    binary_subgame_from(m, &p_high)
}

pub fn binary_subgame_from(m: &ModelInstance, p_high: &[f64]) -> (usize, Vec<Option<f64>>) {
    let wages: Vec<Option<f64>> = (0..m.num_efforts())
        .map(|e| binary_min_wage(m, p_high, e).map(|w| w.0))
        .collect();
    (select_effort(m, &wages), wages)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffortValue {
    pub effort: usize,
    pub label: String,
    /// `W(e, pi)`, absent when `e` is not implementable.
    pub expected_wage: Option<f64>,
    /// `E[g|e] - W(e, pi)`, absent when `e` is not implementable.
    pub principal_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubgameOutcome {
    pub chosen_effort: usize,
    pub chosen_label: String,
    pub wage_schedule: WageSchedule,
    pub expected_wage: f64,
    #[serde(rename = "U_P")]
    pub principal_payoff: f64,
    #[serde(rename = "U_A")]
    pub agent_payoff: f64,
    pub per_effort_values: Vec<EffortValue>,
}

/// Picks the principal's effort given `W(e, pi)` for every effort.
///
/// Ties within [`TIE_TOL`] go to the effort the agent likes best, then to the
/// lowest index.
pub fn select_effort(m: &ModelInstance, wages: &[Option<f64>]) -> usize {
    let value = |e: usize| wages[e].map(|w| m.expected_output(e) - w);
    let best = (0..m.num_efforts())
        .filter_map(value)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut chosen: Option<(usize, f64)> = None;
    for e in 0..m.num_efforts() {
        let (Some(v), Some(w)) = (value(e), wages[e]) else {
            continue;
        };
        if v < best - TIE_TOL {
            continue;
        }
        let agent = w - m.cost(e);
        match chosen {
            Some((_, a)) if agent <= a + TIE_TOL => {}
            _ => chosen = Some((e, agent)),
        }
    }
    chosen.map_or(0, |(e, _)| e)
}

pub fn best_effort(m: &ModelInstance, pi: &InformationStructure) -> Result<SubgameOutcome> {
    pi.validate()?;
    let p = m.induce(pi)?;
    best_effort_for_distribution(m, &p)
}

pub fn best_effort_for_distribution(
    m: &ModelInstance,
    p: &SignalDistribution,
) -> Result<SubgameOutcome> {
    let solved = (0..m.num_efforts())
        .map(|e| min_wage(m, p, e))
        .collect::<Result<Vec<_>>>()?;
    let wages: Vec<Option<f64>> = solved.iter().map(|s| s.as_ref().map(|s| s.value)).collect();
    let chosen = select_effort(m, &wages);
    let schedule = solved[chosen]
        .as_ref()
        .map(|s| s.wages.clone())
        .unwrap_or_else(|| WageSchedule::zeros(p.num_signals()));
    Ok(assemble_outcome(m, &wages, chosen, schedule))
}

pub(crate) fn assemble_outcome(
    m: &ModelInstance,
    wages: &[Option<f64>],
    chosen: usize,
    schedule: WageSchedule,
) -> SubgameOutcome {
    let expected_wage = wages[chosen].unwrap_or(0.0);
    let per_effort_values = (0..m.num_efforts())
        .map(|e| EffortValue {
            effort: e,
            label: m.efforts[e].label.clone(),
            expected_wage: wages[e],
            principal_value: wages[e].map(|w| m.expected_output(e) - w),
        })
        .collect();
    SubgameOutcome {
        chosen_effort: chosen,
        chosen_label: m.efforts[chosen].label.clone(),
        wage_schedule: schedule,
        expected_wage,
        principal_payoff: m.expected_output(chosen) - expected_wage,
        agent_payoff: expected_wage - m.cost(chosen),
        per_effort_values,
    }
}
