//! Constructing information structures: synthesis from likelihood points,
//! binary reduction, and the full-surplus-extraction certificate.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{hull_of_f, in_hull, Hyperplane, LikelihoodHull, LikelihoodVector};
use crate::lp::{Cmp, LinearProgram, LpError};
use crate::model::{Effort, InformationStructure, ModelInstance, Outcome};
use crate::principal::{best_effort, min_wage, SubgameOutcome};

/// Tolerance for the payoff checks that close each construction.
pub const VERIFY_TOL: f64 = 1e-8;

/// Shrink applied to the ray-shooting scale to stay off the hull boundary.
pub const ALPHA_SHRINK: f64 = 0.99;

/// Halvings of alpha tried when the two-point decomposition is infeasible.
pub const ALPHA_BACKOFF_STEPS: usize = 60;

/// Finds `pi` with one signal per point of `points` whose likelihood vectors
/// relative to `reference` are exactly those points.
///
/// Writing `q_z(x) = pi(z|x)`, a signal has likelihood vector `z` iff
/// `sum_x [f(x|e_i) - (1 - z_i) f(x|e*)] q_z(x) = 0` for every effort, which
/// is linear in `q`. The LP maximizes the smallest `p(z|e*)` so that no
/// signal is null.
pub fn structure_from_hull(
    m: &ModelInstance,
    reference: usize,
    points: &[Vec<f64>],
) -> Result<InformationStructure> {
    let hull = hull_of_f(m, reference)?;
    let nx = m.num_outcomes();
    let ne = m.num_efforts();
    if points.is_empty() {
        return Err(Error::InfeasibleSynthesis("empty point set".into()));
    }
    for (k, z) in points.iter().enumerate() {
        if z.len() != ne {
            return Err(Error::Dimension(format!(
                "point {k} has {} components, expected {ne}",
                z.len()
            )));
        }
        if !in_hull(z, &hull).inside {
            return Err(Error::InfeasibleSynthesis(format!("point {k} lies outside co(f)")));
        }
    }
    let point_hull = LikelihoodHull {
        reference,
        labels: Vec::new(),
        generators: points.to_vec(),
        directions: Vec::new(),
        direction_labels: Vec::new(),
    };
    if !in_hull(&vec![0.0; ne], &point_hull).inside {
        return Err(Error::InfeasibleSynthesis(
            "origin is not in the hull of the points".into(),
        ));
    }

    let nz = points.len();
    let var = |z: usize, x: usize| z * nx + x;
    let t = nz * nx;
    let mut objective = vec![0.0; t + 1];
    objective[t] = -1.0;
    let mut lp = LinearProgram::minimize(objective);
    for x in 0..nx {
        let mut row = vec![0.0; t + 1];
        for z in 0..nz {
            row[var(z, x)] = 1.0;
        }
        lp.add(row, Cmp::Eq, 1.0);
    }
    for (z, point) in points.iter().enumerate() {
        for i in 0..ne {
            if i == reference {
                continue;
            }
            let mut row = vec![0.0; t + 1];
            for x in 0..nx {
                row[var(z, x)] = m.f[i][x] - (1.0 - point[i]) * m.f[reference][x];
            }
            lp.add(row, Cmp::Eq, 0.0);
        }
        let mut row = vec![0.0; t + 1];
        for x in 0..nx {
            row[var(z, x)] = m.f[reference][x];
        }
        row[t] = -1.0;
        lp.add(row, Cmp::Ge, 0.0);
    }
    let sol = match lp.solve() {
        Ok(sol) => sol,
        Err(LpError::Infeasible { residual, .. }) => {
            return Err(Error::InfeasibleSynthesis(format!(
                "decomposition infeasible (residual {residual:.3e})"
            )))
        }
        Err(e) => return Err(e.into()),
    };
    if sol.x[t] <= 1e-9 {
        return Err(Error::InfeasibleSynthesis(
            "some point can only be realized by a null signal".into(),
        ));
    }
    let mut pi = vec![vec![0.0; nz]; nx];
    for (x, row) in pi.iter_mut().enumerate() {
        for (z, v) in row.iter_mut().enumerate() {
            *v = sol.x[var(z, x)].clamp(0.0, 1.0);
        }
        let total: f64 = row.iter().sum();
        row.iter_mut().for_each(|v| *v /= total);
    }
    let signals = (1..=nz).map(|k| format!("z{k}")).collect();
    InformationStructure::new(signals, pi)
}

/// Garbles `pi` into two signals without changing the cost of implementing
/// `e_star` or the principal's choice.
pub fn reduce_to_binary(
    m: &ModelInstance,
    pi: &InformationStructure,
    e_star: usize,
) -> Result<InformationStructure> {
    m.check_effort(e_star)?;
    let p = m.induce(pi)?;
    let Some(sol) = min_wage(m, &p, e_star)? else {
        return Err(Error::Precondition(format!(
            "effort {e_star} is not implementable under the given structure"
        )));
    };
    let before = best_effort(m, pi)?;
    if before.chosen_effort != e_star {
        return Err(Error::Precondition(format!(
            "the principal chooses effort {} rather than {e_star}",
            before.chosen_effort
        )));
    }
    let total: f64 = sol.wages.0.iter().sum();
    if total <= 0.0 {
        return Ok(InformationStructure::uninformative(m.num_outcomes()));
    }
    // beta_s = (alpha_s / p(s|e*)) / sum, with alpha_s proportional to
    // w(s) p(s|e*), reduces to w(s) / sum w.
    let beta: Vec<f64> = sol.wages.0.iter().map(|w| w / total).collect();
    let q: Vec<f64> = pi
        .pi
        .iter()
        .map(|row| row.iter().zip(&beta).map(|(a, b)| a * b).sum::<f64>().clamp(0.0, 1.0))
        .collect();
    let reduced = InformationStructure::binary(&q);

    let p_hat = m.induce(&reduced)?;
    let w_hat = min_wage(m, &p_hat, e_star)?
        .ok_or_else(|| Error::Internal("binary reduction lost implementability".into()))?;
    if (w_hat.value - sol.value).abs() > VERIFY_TOL {
        return Err(Error::Internal(format!(
            "binary reduction changed W from {} to {}",
            sol.value, w_hat.value
        )));
    }
    let after = best_effort(m, &reduced)?;
    if after.chosen_effort != e_star {
        return Err(Error::Internal(format!(
            "binary reduction changed the principal's choice to {}",
            after.chosen_effort
        )));
    }
    Ok(reduced)
}

/// Maximizer of `E[g|e] - c(e)`, ties to the lowest index.
pub fn first_best_effort(m: &ModelInstance) -> usize {
    let surplus = |e: usize| m.expected_output(e) - m.cost(e);
    (1..m.num_efforts()).fold(0, |best, e| {
        if surplus(e) > surplus(best) + 1e-12 {
            e
        } else {
            best
        }
    })
}

/// The likelihood point at which the agent is indifferent and the principal
/// earns exactly `E[g|e_1]`.
pub fn compute_l_star(m: &ModelInstance, e_star: usize) -> Result<LikelihoodVector> {
    m.check_effort(e_star)?;
    let gain = m.expected_output(e_star) - m.expected_output(0);
    if gain <= 0.0 {
        return Err(Error::DegenerateSurplus);
    }
    let l = m.efforts.iter().map(|e| (m.cost(e_star) - e.c) / gain).collect();
    Ok(LikelihoodVector::new(l, e_star))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtractionCertificate {
    pub e_star: usize,
    pub e_star_label: String,
    pub l_star: Vec<f64>,
    /// Weights writing `l*` as a convex combination of the outcome generators.
    pub hull_weights: Vec<f64>,
    /// Scale of the second point `-alpha l*`.
    pub alpha: f64,
    /// Largest feasible scale, `None` if the ray never leaves the hull.
    pub alpha_max: Option<f64>,
    pub structure: InformationStructure,
    #[serde(rename = "U_A")]
    pub agent_payoff: f64,
    #[serde(rename = "U_P")]
    pub principal_payoff: f64,
    pub outcome: SubgameOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ExtractionReport {
    Extractable(ExtractionCertificate),
    NotExtractable {
        e_star: usize,
        l_star: Option<Vec<f64>>,
        /// Hyperplane separating `l*` from `co(f)`.
        witness: Option<Hyperplane>,
        reason: String,
    },
}

impl ExtractionReport {
    pub fn is_extractable(&self) -> bool {
        matches!(self, Self::Extractable(_))
    }

    pub fn certificate(&self) -> Option<&ExtractionCertificate> {
        match self {
            Self::Extractable(c) => Some(c),
            Self::NotExtractable { .. } => None,
        }
    }
}

/// Largest `alpha` with `-alpha * dir` in the hull; `None` if unbounded.
fn ray_shoot(hull: &LikelihoodHull, dir: &[f64]) -> Result<Option<f64>> {
    let k = hull.generators.len();
    let r = hull.directions.len();
    let mut objective = vec![0.0; k + r + 1];
    objective[k + r] = -1.0;
    let mut lp = LinearProgram::minimize(objective);
    let mut sum_row = vec![1.0; k];
    sum_row.extend(std::iter::repeat_n(0.0, r + 1));
    lp.add(sum_row, Cmp::Eq, 1.0);
    for (i, d) in dir.iter().enumerate() {
        let mut row: Vec<f64> = hull.generators.iter().chain(&hull.directions).map(|g| g[i]).collect();
        row.push(*d);
        lp.add(row, Cmp::Eq, 0.0);
    }
    match lp.solve() {
        Ok(sol) => Ok(Some(sol.x[k + r])),
        Err(LpError::Unbounded) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Checks whether the agent can design a structure under which the principal
/// implements the first-best effort and keeps only `E[g|e_1]`.
///
/// The construction needs `l* ∈ co(f)`. That condition is sufficient, not
/// necessary, so a negative answer means "not extractable by this
/// construction".
pub fn full_extraction(m: &ModelInstance) -> Result<ExtractionReport> {
    let e_star = first_best_effort(m);
    let nx = m.num_outcomes();
    if e_star == 0 {
        let structure = InformationStructure::uninformative(nx);
        let outcome = best_effort(m, &structure)?;
        return Ok(ExtractionReport::Extractable(ExtractionCertificate {
            e_star,
            e_star_label: m.efforts[0].label.clone(),
            l_star: vec![0.0; m.num_efforts()],
            hull_weights: m.f[0].clone(),
            alpha: 0.0,
            alpha_max: None,
            structure,
            agent_payoff: outcome.agent_payoff,
            principal_payoff: outcome.principal_payoff,
            outcome,
        }));
    }
    let l_star = compute_l_star(m, e_star)?.l;
    if m.cost(e_star) <= 0.0 {
        return Ok(ExtractionReport::NotExtractable {
            e_star,
            l_star: Some(l_star),
            witness: None,
            reason: "first-best effort is costless, so no wage can be demanded for it".into(),
        });
    }
    let hull = hull_of_f(m, e_star)?;
    let membership = in_hull(&l_star, &hull);
    if !membership.inside {
        return Ok(ExtractionReport::NotExtractable {
            e_star,
            l_star: Some(l_star),
            witness: membership.separating,
            reason: "l* lies outside co(f); not extractable by this construction".into(),
        });
    }
    let alpha_max = ray_shoot(&hull, &l_star)?;
    let alpha = match alpha_max {
        None => 1.0,
        Some(a) if a > 1e-12 => ALPHA_SHRINK * a,
        Some(_) => 0.0,
    };
    // The two signal masses are fixed at alpha/(1+alpha) and 1/(1+alpha), so
    // a far point near a thin vertex may not be realizable. Small alpha
    // always is: l* can be carved out of f(.|e*) with small mass.
    let mut alpha = alpha;
    let mut attempts = 0;
    let structure = loop {
        let far: Vec<f64> = l_star.iter().map(|v| -alpha * v).collect();
        match structure_from_hull(m, e_star, &[l_star.clone(), far]) {
            Ok(s) => break s,
            Err(Error::InfeasibleSynthesis(_)) if attempts < ALPHA_BACKOFF_STEPS && alpha > 0.0 => {
                alpha *= 0.5;
                attempts += 1;
            }
            Err(e) => return Err(e),
        }
    };
    let outcome = best_effort(m, &structure)?;
    let target = m.expected_output(0);
    if outcome.chosen_effort != e_star || (outcome.principal_payoff - target).abs() > VERIFY_TOL {
        return Err(Error::Internal(format!(
            "extraction structure failed verification: effort {} with U_P {} (expected {e_star}, {target})",
            outcome.chosen_effort, outcome.principal_payoff
        )));
    }
    Ok(ExtractionReport::Extractable(ExtractionCertificate {
        e_star,
        e_star_label: m.efforts[e_star].label.clone(),
        l_star,
        hull_weights: membership.weights,
        alpha,
        alpha_max,
        structure,
        agent_payoff: outcome.agent_payoff,
        principal_payoff: outcome.principal_payoff,
        outcome,
    }))
}

/// The almost-perfect technology on `X = E`: the intended outcome occurs with
/// probability `1 - (m-1) eps`, every other one with `eps`.
pub fn almost_perfect_model(values: &[f64], costs: &[f64], eps: f64) -> Result<ModelInstance> {
    let n = values.len();
    if n < 2 || costs.len() != n {
        return Err(Error::Dimension(
            "need at least two effort values with one cost each".into(),
        ));
    }
    if values[0] != 0.0 || values.iter().any(|&v| !(v >= 0.0)) {
        return Err(Error::Invalid("effort values must be nonnegative with e_1 = 0".into()));
    }
    let upper = 1.0 / (n as f64 - 1.0);
    if !(eps > 0.0 && eps < upper) {
        return Err(Error::Invalid(format!("eps must lie in (0, {upper})")));
    }
    let f = (0..n)
        .map(|j| {
            (0..n)
                .map(|k| if k == j { 1.0 - (n as f64 - 1.0) * eps } else { eps })
                .collect()
        })
        .collect();
    let outcomes = values
        .iter()
        .map(|&v| Outcome { label: format!("x={v}"), g: v })
        .collect();
    let efforts = values
        .iter()
        .zip(costs)
        .map(|(&v, &c)| Effort { label: format!("e={v}"), c })
        .collect();
    ModelInstance::new(outcomes, efforts, f)
}

/// Full extraction on the almost-perfect technology. Counts as a success only
/// when the first-best effort is costly: once noise makes `e_1` first-best
/// there is no surplus left to extract.
pub fn almost_perfect_probe(values: &[f64], costs: &[f64], eps: f64) -> Result<bool> {
    let m = almost_perfect_model(values, costs, eps)?;
    let report = full_extraction(&m)?;
    Ok(matches!(report, ExtractionReport::Extractable(ref c) if c.e_star != 0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpsilonBracket {
    /// Largest probed noise level at which extraction holds.
    pub lo: f64,
    /// Smallest probed noise level above `lo` at which it fails.
    pub hi: f64,
}

/// Brackets the noise threshold for extraction by bisection to width `width`.
pub fn threshold_epsilon(values: &[f64], costs: &[f64], width: f64) -> Result<EpsilonBracket> {
    let upper = 1.0 / (values.len() as f64 - 1.0);
    let mut lo = 1e-6_f64.min(upper / 2.0);
    let mut hi = upper * (1.0 - 1e-9);
    if !almost_perfect_probe(values, costs, lo)? {
        return Err(Error::Precondition(format!(
            "extraction fails already at eps = {lo}"
        )));
    }
    if almost_perfect_probe(values, costs, hi)? {
        return Ok(EpsilonBracket { lo: hi, hi: upper });
    }
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if almost_perfect_probe(values, costs, mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(EpsilonBracket { lo, hi })
}
