//! The agent's first-stage problem: choose the indicator that maximizes
//! `W(e, pi) - c(e)` for the effort the principal ends up implementing.
//!
//! Binary structures lose nothing for a fixed implemented effort, so the
//! search runs over `q ∈ [0,1]^X` with `pi(H|x) = q[x]`. For each target
//! effort a penalized coordinate search pushes the principal towards that
//! effort. Every evaluated point is also scored by its true subgame value,
//! and the best one is re-verified with the LP solver.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::design::{full_extraction, reduce_to_binary};
use crate::error::Result;
use crate::model::{InformationStructure, ModelInstance};
use crate::principal::{best_effort, binary_subgame, binary_subgame_from, SubgameOutcome};

const PENALTY: f64 = 1e3;
const MARGIN: f64 = 1e-9;
const MIN_STEP: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Random restarts per target effort, on top of the deterministic seeds.
    pub restarts: usize,
    /// Coordinate sweeps per run.
    pub sweeps: usize,
    /// Cap on subgame evaluations across the whole search.
    pub max_evals: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            restarts: 64,
            sweeps: 200,
            max_evals: 50_000_000,
        }
    }
}

impl Budget {
    /// A budget stated as a total evaluation count.
    pub fn evals(max_evals: u64) -> Self {
        Self {
            max_evals,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchDiagnostics {
    pub runs: usize,
    pub evaluations: u64,
    /// Best agent value found with each effort implemented.
    pub best_per_effort: Vec<Option<f64>>,
    /// "optimal" when the value meets the full-extraction bound, else "best found".
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgentSolution {
    pub structure: InformationStructure,
    pub outcome: SubgameOutcome,
    pub agent_value: f64,
    pub diagnostics: SearchDiagnostics,
}

#[derive(Debug, Clone)]
struct Candidate {
    value: f64,
    q: Vec<f64>,
}

struct Evaluator<'a> {
    m: &'a ModelInstance,
    evals: u64,
    cap: u64,
    best: Option<Candidate>,
    per_effort: Vec<Option<f64>>,
}

impl<'a> Evaluator<'a> {
    fn new(m: &'a ModelInstance, cap: u64) -> Self {
        Self {
            m,
            evals: 0,
            cap,
            best: None,
            per_effort: vec![None; m.num_efforts()],
        }
    }

    fn exhausted(&self) -> bool {
        self.evals >= self.cap
    }

    /// Penalized objective for `target`; records the true value on the side.
    fn score(&mut self, q: &[f64], target: usize) -> f64 {
        self.evals += 1;
        let m = self.m;
        let p_high: Vec<f64> = m
            .f
            .iter()
            .map(|row| row.iter().zip(q).map(|(f, q)| f * q).sum())
            .collect();
        let (chosen, wages) = binary_subgame_from(m, &p_high);
        let true_value = wages[chosen].map_or(0.0, |w| w - m.cost(chosen));
        let slot = &mut self.per_effort[chosen];
        if slot.is_none_or(|v| true_value > v) {
            *slot = Some(true_value);
        }
        if self.best.as_ref().is_none_or(|b| true_value > b.value + 1e-12) {
            self.best = Some(Candidate {
                value: true_value,
                q: q.to_vec(),
            });
        }

        let Some(w) = wages[target] else {
            return -PENALTY * (1.0 + infeasibility(m, &p_high, target));
        };
        let own = m.expected_output(target) - w;
        let violation: f64 = (0..m.num_efforts())
            .filter_map(|e| wages[e].map(|we| m.expected_output(e) - we))
            .map(|v| (v - own - MARGIN).max(0.0))
            .sum();
        w - m.cost(target) - PENALTY * violation
    }
}

/// How far the incentive interval for `e` is from being nonempty.
fn infeasibility(m: &ModelInstance, p_high: &[f64], e: usize) -> f64 {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    let mut flat = 0.0;
    for (alt, &pa) in p_high.iter().enumerate() {
        let dc = m.cost(e) - m.cost(alt);
        let dp = p_high[e] - pa;
        if dp > 0.0 {
            lo = lo.max(dc / dp);
        } else if dp < 0.0 {
            hi = hi.min(dc / dp);
        } else if alt != e && dc > 0.0 {
            flat += dc;
        }
    }
    let gap = if lo.is_finite() && hi.is_finite() {
        (lo - hi).max(0.0)
    } else {
        0.0
    };
    (gap + flat).min(1e6) / (1.0 + (gap + flat).min(1e6))
}

fn coordinate_search(ev: &mut Evaluator, start: Vec<f64>, target: usize, sweeps: usize) {
    let mut q = start;
    let mut current = ev.score(&q, target);
    let mut step = 0.25;
    for _ in 0..sweeps {
        if step < MIN_STEP || ev.exhausted() {
            break;
        }
        let mut improved = false;
        for x in 0..q.len() {
            for dir in [1.0, -1.0] {
                if ev.exhausted() {
                    return;
                }
                let old = q[x];
                let trial = (old + dir * step).clamp(0.0, 1.0);
                if trial == old {
                    continue;
                }
                q[x] = trial;
                let s = ev.score(&q, target);
                if s > current {
                    current = s;
                    improved = true;
                    break;
                }
                q[x] = old;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
}

fn deterministic_seeds(m: &ModelInstance) -> Vec<Vec<f64>> {
    let nx = m.num_outcomes();
    let mut seeds = vec![vec![0.5; nx]];
    if let Ok(report) = full_extraction(m) {
        if let Some(q) = report
            .certificate()
            .and_then(|c| c.structure.high_probabilities())
        {
            seeds.push(q);
        }
    }
    let full = InformationStructure::full_revelation(nx);
    if let Ok(out) = best_effort(m, &full) {
        if let Ok(q) = reduce_to_binary(m, &full, out.chosen_effort) {
            seeds.push(q.high_probabilities().unwrap_or_else(|| vec![1.0; nx]));
        }
    }
    let mut order: Vec<usize> = (0..nx).collect();
    order.sort_by(|&a, &b| m.outcomes[a].g.total_cmp(&m.outcomes[b].g).then(a.cmp(&b)));
    for k in 1..nx {
        let mut upper = vec![0.0; nx];
        for &x in &order[k..] {
            upper[x] = 1.0;
        }
        let lower = upper.iter().map(|v| 1.0 - v).collect();
        seeds.push(upper);
        seeds.push(lower);
    }
    seeds
}

/// Searches binary structures for the agent-optimal implementable outcome.
///
/// When full extraction holds, its structure is among the starting points,
/// so the extraction value is a guaranteed lower bound.
pub fn optimize(m: &ModelInstance, budget: Budget, seed: u64) -> Result<AgentSolution> {
    let nx = m.num_outcomes();
    let ne = m.num_efforts();
    // Each deterministic seed is refined towards the effort it already
    // implements; random restarts cover every target effort.
    let mut jobs: Vec<(usize, Option<Vec<f64>>)> = deterministic_seeds(m)
        .into_iter()
        .map(|q| (binary_subgame(m, &q).0, Some(q)))
        .collect();
    for target in 0..ne {
        jobs.extend(std::iter::repeat_n((target, None), budget.restarts));
    }
    let per_job_cap = (budget.max_evals / jobs.len().max(1) as u64).max(1);

    let results: Vec<(Option<Candidate>, Vec<Option<f64>>, u64)> = jobs
        .par_iter()
        .enumerate()
        .map(|(job, (target, start))| {
            let start = start.clone().unwrap_or_else(|| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(job as u64);
                (0..nx).map(|_| rng.gen::<f64>()).collect()
            });
            let mut ev = Evaluator::new(m, per_job_cap);
            coordinate_search(&mut ev, start, *target, budget.sweeps);
            (ev.best, ev.per_effort, ev.evals)
        })
        .collect();

    let mut best: Option<Candidate> = None;
    let mut per_effort = vec![None; ne];
    let mut evaluations = 0;
    for (cand, table, evals) in results {
        evaluations += evals;
        for (slot, v) in per_effort.iter_mut().zip(table) {
            if let Some(v) = v {
                if slot.is_none_or(|s: f64| v > s) {
                    *slot = Some(v);
                }
            }
        }
        if let Some(c) = cand {
            if best.as_ref().is_none_or(|b| c.value > b.value + 1e-12) {
                best = Some(c);
            }
        }
    }

    let q = best.map_or_else(|| vec![0.5; nx], |b| b.q);
    let structure = InformationStructure::binary(&q);
    let outcome = best_effort(m, &structure)?;
    let agent_value = outcome.agent_payoff;
    let bound = crate::design::first_best_effort(m);
    let ceiling = m.expected_output(bound) - m.cost(bound) - m.expected_output(0);
    let status = if agent_value >= ceiling - 1e-9 {
        "optimal"
    } else {
        "best found"
    };
    Ok(AgentSolution {
        structure,
        outcome,
        agent_value,
        diagnostics: SearchDiagnostics {
            runs: jobs.len(),
            evaluations,
            best_per_effort: per_effort,
            status: status.into(),
        },
    })
}
