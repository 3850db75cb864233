use serde::{Deserialize, Serialize};

use super::assumption::verify_assumption;
use super::model::ContinuousModel;
use super::threshold::{moments, multiplier_from, PaidSignal, ThresholdStructure};
use crate::error::{Error, Result};
use crate::numeric::{brent, golden_max};

/// Lower end of the effort bracket for the principal's first-order condition.
pub const EFFORT_FLOOR: f64 = 1e-6;
/// Step of the central difference for `d lambda / de`.
pub const LAMBDA_STEP: f64 = 1e-5;
const ROOT_TOL: f64 = 1e-10;
const EFFORT_SCAN: usize = 200;
const IC_GRID: usize = 200;
const IC_TOL: f64 = 1e-9;

/// The principal's reply to a threshold structure under the first-order approach.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Response {
    pub effort: f64,
    pub multiplier: f64,
    pub paid_signal: PaidSignal,
    /// Probability of the paid signal at `effort`.
    pub paid_probability: f64,
    pub expected_wage: f64,
    pub principal_value: f64,
    pub agent_value: f64,
    pub principal_foc_residual: f64,
    pub agent_foc_residual: f64,
}

fn lambda_at(cm: &ContinuousModel, t: &ThresholdStructure, e: f64) -> Option<(f64, PaidSignal, f64, f64)> {
    let m = moments(cm, t, e).ok()?;
    let (lam, paid) = multiplier_from(m.p, m.dp).ok()?;
    Some((lam, paid, m.p, m.dp))
}

/// `dE[g]/de - lambda_e c' - lambda c''`, with `lambda_e` by central differences.
pub fn principal_foc(cm: &ContinuousModel, t: &ThresholdStructure, e: f64) -> f64 {
    let Some((lam, paid, ..)) = lambda_at(cm, t, e) else {
        return f64::NAN;
    };
    let h = LAMBDA_STEP;
    let at = |x: f64| match lambda_at(cm, t, x) {
        Some((l, p, ..)) if p == paid => l,
        _ => f64::NAN,
    };
    let dlam = if e > h {
        (at(e + h) - at(e - h)) / (2.0 * h)
    } else {
        (at(e + h) - lam) / h
    };
    let [_, c1, c2] = cm.cost.eval(e);
    cm.expected_output(e)[1] - dlam * c1 - lam * c2
}

/// Probability of `paid` under effort `e`, defined also at `e = 0`.
fn paid_probability(cm: &ContinuousModel, t: &ThresholdStructure, e: f64, paid: PaidSignal) -> f64 {
    let (a, b) = t.interval();
    let p = cm.family.cdf(b, e) - cm.family.cdf(a, e);
    match paid {
        PaidSignal::H => p,
        PaidSignal::L => 1.0 - p,
    }
}

/// Whether the agent facing wage `w` on `paid` has no profitable deviation
/// from `e` on an effort grid; the first-order condition alone does not
/// rule out distant deviations.
pub fn globally_incentive_compatible(
    cm: &ContinuousModel,
    t: &ThresholdStructure,
    e: f64,
    w: f64,
    paid: PaidSignal,
) -> bool {
    let u = |x: f64| w * paid_probability(cm, t, x, paid) - cm.cost.eval(x)[0];
    let at_e = u(e);
    (0..=IC_GRID).all(|k| u(k as f64 / IC_GRID as f64) <= at_e + IC_TOL * (1.0 + at_e.abs()))
}

fn evaluate_root(cm: &ContinuousModel, t: &ThresholdStructure, e: f64) -> Option<Response> {
    let (lam, paid, p, dp) = lambda_at(cm, t, e)?;
    let [c, c1, _] = cm.cost.eval(e);
    let expected_wage = lam * c1;
    let paid_probability = match paid {
        PaidSignal::H => p,
        PaidSignal::L => 1.0 - p,
    };
    if !(paid_probability > 0.0) {
        return None;
    }
    let w = expected_wage / paid_probability;
    if !globally_incentive_compatible(cm, t, e, w, paid) {
        return None;
    }
    let paid_slope = match paid {
        PaidSignal::H => dp,
        PaidSignal::L => -dp,
    };
    Some(Response {
        effort: e,
        multiplier: lam,
        paid_signal: paid,
        paid_probability,
        expected_wage,
        principal_value: cm.expected_output(e)[0] - expected_wage,
        agent_value: expected_wage - c,
        principal_foc_residual: principal_foc(cm, t, e),
        agent_foc_residual: w * paid_slope - c1,
    })
}

/// The effort the principal implements under `t`, or `None` when zero effort
/// (no wage) serves the principal at least as well as every interior
/// stationary point that passes the global incentive check.
pub fn principal_response(cm: &ContinuousModel, t: &ThresholdStructure) -> Option<Response> {
    let grid: Vec<f64> = (0..=EFFORT_SCAN)
        .map(|k| EFFORT_FLOOR + (1.0 - EFFORT_FLOOR) * k as f64 / EFFORT_SCAN as f64)
        .collect();
    let values: Vec<f64> = grid.iter().map(|&e| principal_foc(cm, t, e)).collect();
    let mut best: Option<Response> = None;
    for k in 0..EFFORT_SCAN {
        let (va, vb) = (values[k], values[k + 1]);
        if !(va.is_finite() && vb.is_finite()) || va.signum() == vb.signum() && va != 0.0 {
            continue;
        }
        let Some(root) = brent(|e| principal_foc(cm, t, e), grid[k], grid[k + 1], ROOT_TOL) else {
            continue;
        };
        if let Some(r) = evaluate_root(cm, t, root) {
            if best.is_none_or(|b| r.principal_value > b.principal_value) {
                best = Some(r);
            }
        }
    }
    let idle = cm.expected_output(0.0)[0];
    best.filter(|r| r.principal_value >= idle)
}

fn agent_value(cm: &ContinuousModel, t: &ThresholdStructure) -> f64 {
    if t.validate().is_err() {
        return f64::NEG_INFINITY;
    }
    principal_response(cm, t).map_or(0.0, |r| r.agent_value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirstBest {
    pub effort: f64,
    /// `dE[g]/de - c'(e)` at `effort`.
    pub foc_residual: f64,
}

/// Maximizer of `E[g|e] - c(e)` on `[0, 1]`.
pub fn first_best(cm: &ContinuousModel) -> FirstBest {
    let foc = |e: f64| cm.expected_output(e)[1] - cm.cost.eval(e)[1];
    let effort = if foc(1.0) >= 0.0 {
        1.0
    } else {
        brent(foc, 1e-12, 1.0, 1e-14).unwrap_or(0.0)
    };
    FirstBest {
        effort,
        foc_residual: foc(effort),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Require the likelihood-ratio assumption before solving.
    pub check_assumption: bool,
    /// Also search interval (two-threshold) structures.
    pub double: bool,
    pub coarse_step: f64,
    pub fine_step: f64,
    pub refine_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            check_assumption: true,
            double: true,
            coarse_step: 1e-2,
            fine_step: 1e-4,
            refine_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuousEquilibrium {
    pub structure: ThresholdStructure,
    pub paid_signal: PaidSignal,
    pub effort: f64,
    pub multiplier: f64,
    pub expected_wage: f64,
    /// Wage paid on the paid signal, `expected_wage / P(paid signal)`.
    pub wage_on_paid_signal: f64,
    pub paid_probability: f64,
    #[serde(rename = "U_P")]
    pub principal_payoff: f64,
    #[serde(rename = "U_A")]
    pub agent_payoff: f64,
    pub effort_cost: f64,
    pub expected_output: f64,
    pub agent_foc_residual: f64,
    pub principal_foc_residual: f64,
    pub first_best: FirstBest,
}

fn top_indices(values: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    idx.truncate(k);
    idx
}

fn search_single(cm: &ContinuousModel, opts: &SolveOptions) -> (f64, f64) {
    let n = (1.0 / opts.coarse_step).round() as usize;
    let coarse: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
    let values: Vec<f64> = coarse
        .iter()
        .map(|&t| agent_value(cm, &ThresholdStructure::single(t)))
        .collect();
    let mut best = (coarse[0], values[0]);
    for i in top_indices(&values, 3) {
        let centre = coarse[i];
        let m = (opts.coarse_step / opts.fine_step).round() as i64;
        let mut local = (centre, values[i]);
        for j in -m..=m {
            let t = centre + j as f64 * opts.fine_step;
            if !(0.0..=1.0).contains(&t) {
                continue;
            }
            let v = agent_value(cm, &ThresholdStructure::single(t));
            if v > local.1 {
                local = (t, v);
            }
        }
        let lo = (local.0 - opts.fine_step).max(0.0);
        let hi = (local.0 + opts.fine_step).min(1.0);
        let refined = golden_max(|t| agent_value(cm, &ThresholdStructure::single(t)), lo, hi, opts.refine_tol);
        if refined.1 > local.1 {
            local = refined;
        }
        if local.1 > best.1 {
            best = local;
        }
    }
    best
}

fn search_double(cm: &ContinuousModel, start_single: f64) -> ((f64, f64), f64) {
    let value = |x1: f64, x2: f64| {
        if !(0.0 <= x1 && x1 <= x2 && x2 <= 1.0) {
            return f64::NEG_INFINITY;
        }
        agent_value(cm, &ThresholdStructure::Double { lower: x1, upper: x2 })
    };
    let step: f64 = 0.05;
    let n = (1.0 / step).round() as usize;
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            pairs.push((i as f64 * step, j as f64 * step));
        }
    }
    let grid_values: Vec<f64> = pairs.iter().map(|&(a, b)| value(a, b)).collect();
    let mut starts: Vec<(f64, f64)> = top_indices(&grid_values, 3).into_iter().map(|i| pairs[i]).collect();
    starts.push((start_single, 1.0));

    let mut best = ((start_single, 1.0), value(start_single, 1.0));
    for (mut x1, mut x2) in starts {
        let mut current = value(x1, x2);
        let mut h = 0.02;
        let mut evals = 0;
        while h > 1e-8 && evals < 4000 {
            let mut moved = false;
            for (d1, d2) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (-1.0, -1.0)] {
                let (a, b) = ((x1 + d1 * h).clamp(0.0, 1.0), (x2 + d2 * h).clamp(0.0, 1.0));
                evals += 1;
                let v = value(a, b);
                if v > current {
                    (x1, x2, current) = (a, b, v);
                    moved = true;
                    break;
                }
            }
            if !moved {
                h *= 0.5;
            }
        }
        if current > best.1 {
            best = ((x1, x2), current);
        }
    }
    best
}

/// Agent-optimal threshold structure and the induced equilibrium.
pub fn solve_equilibrium(cm: &ContinuousModel) -> Result<ContinuousEquilibrium> {
    solve_equilibrium_with(cm, &SolveOptions::default())
}

pub fn solve_equilibrium_with(cm: &ContinuousModel, opts: &SolveOptions) -> Result<ContinuousEquilibrium> {
    cm.validate()?;
    if opts.check_assumption {
        let report = verify_assumption(cm, 64, 32);
        if !report.passed {
            return Err(Error::Precondition(format!(
                "likelihood-ratio assumption fails: {}",
                report.summary()
            )));
        }
    }
    let (t_single, v_single) = search_single(cm, opts);
    let mut structure = ThresholdStructure::single(t_single);
    if opts.double {
        let ((x1, x2), v_double) = search_double(cm, t_single);
        if v_double > v_single + 1e-9 {
            structure = if x2 >= 1.0 - 1e-6 {
                ThresholdStructure::single(x1)
            } else if x1 <= 1e-6 {
                // High on [0, x2] is the relabeled complement of [x2, 1].
                ThresholdStructure::single(x2)
            } else {
                ThresholdStructure::Double { lower: x1, upper: x2 }
            };
        }
    }
    let Some(r) = principal_response(cm, &structure) else {
        let fb = first_best(cm);
        return Err(Error::NoInteriorEquilibrium(format!(
            "no threshold structure yields an incentive-compatible interior effort the principal prefers to zero effort (first-best effort {:.6})",
            fb.effort
        )));
    };
    let [c, ..] = cm.cost.eval(r.effort);
    Ok(ContinuousEquilibrium {
        structure,
        paid_signal: r.paid_signal,
        effort: r.effort,
        multiplier: r.multiplier,
        expected_wage: r.expected_wage,
        wage_on_paid_signal: r.expected_wage / r.paid_probability,
        paid_probability: r.paid_probability,
        principal_payoff: r.principal_value,
        agent_payoff: r.agent_value,
        effort_cost: c,
        expected_output: cm.expected_output(r.effort)[0],
        agent_foc_residual: r.agent_foc_residual,
        principal_foc_residual: r.principal_foc_residual,
        first_best: first_best(cm),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuous::model::{Cost, Family, Payoff};

    #[test]
    fn response_at_published_threshold() {
        let cm = ContinuousModel::example_two();
        let r = principal_response(&cm, &ThresholdStructure::single(0.45)).unwrap();
        assert!((r.effort - 0.2725).abs() < 1e-3);
        assert!((r.principal_value - 0.3450).abs() < 1e-3);
        assert!((r.agent_value - 0.0677).abs() < 1e-3);
        assert!(r.principal_foc_residual.abs() < 1e-7);
        assert!(r.agent_foc_residual.abs() < 1e-10);
    }

    #[test]
    fn first_best_root() {
        let fb = first_best(&ContinuousModel::example_two());
        assert!((fb.effort - 0.4908).abs() < 1e-3);
        assert!(fb.foc_residual.abs() < 1e-8);
    }

    #[test]
    fn uninformative_structure_gets_no_effort() {
        let cm = ContinuousModel::example_two();
        assert!(principal_response(&cm, &ThresholdStructure::single(1.0)).is_none());
        assert!(principal_response(&cm, &ThresholdStructure::single(0.0)).is_none());
    }

    #[test]
    fn cheap_effort_drives_the_wage_down() {
        // The wage vanishes as effort gets cheap, but the agent-optimal
        // structure keeps effort well below the first-best.
        let mut last_wage = f64::INFINITY;
        for scale in [1e-2, 1e-3, 1e-4] {
            let cm = ContinuousModel {
                family: Family::Power { shape: 3.0 },
                cost: Cost::Quadratic { scale },
                payoff: Payoff::LINEAR,
            };
            let opts = SolveOptions {
                double: false,
                ..SolveOptions::default()
            };
            let eq = solve_equilibrium_with(&cm, &opts).unwrap();
            assert!(eq.expected_wage < last_wage);
            assert!(eq.effort < eq.first_best.effort);
            last_wage = eq.expected_wage;
        }
        assert!(last_wage < 0.03);
    }
}
