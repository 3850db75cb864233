//! Likelihood-ratio geometry.
//!
//! Relative to a reference effort `e*`, every signal `s` maps to the vector
//! `l(s)_i = 1 - p(s|e_i) / p(s|e*)`. A wage schedule is equivalent to an
//! overall wage level together with a point of the convex hull of these
//! vectors, and the principal's cost of implementing `e_i` is a function of
//! that point alone. Outcomes (or signals) that never occur under `e*` have
//! no finite likelihood vector; they enter the hull as recession directions
//! `-p(s|.)`, the limit of `p(s|e*) * l(s)` as `p(s|e*) -> 0`.

use std::sync::atomic::{AtomicU64, Ordering};

use serde::Serialize;

use crate::error::Result;
use crate::lp::{Cmp, LinearProgram, LpError};
use crate::model::{InformationStructure, ModelInstance};

/// Tolerance for hull membership and cone feasibility.
pub const HULL_TOL: f64 = 1e-9;
static HULL_OVERRIDE: AtomicU64 = AtomicU64::new(0);

/// Current cone tolerance, [`HULL_TOL`] unless overridden.
pub fn hull_tol() -> f64 {
    match HULL_OVERRIDE.load(Ordering::Relaxed) {
        0 => HULL_TOL,
        bits => f64::from_bits(bits),
    }
}

/// Overrides the cone tolerance for the whole process.
pub fn set_hull_tol(tol: f64) {
    assert!(tol > 0.0, "tolerance must be positive");
    HULL_OVERRIDE.store(tol.to_bits(), Ordering::Relaxed);
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LikelihoodVector {
    pub l: Vec<f64>,
    pub reference: usize,
}

impl LikelihoodVector {
    pub fn new(l: Vec<f64>, reference: usize) -> Self {
        Self { l, reference }
    }

    pub fn origin(dim: usize, reference: usize) -> Self {
        Self {
            l: vec![0.0; dim],
            reference,
        }
    }

    pub fn dim(&self) -> usize {
        self.l.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LikelihoodHull {
    pub reference: usize,
    pub labels: Vec<String>,
    pub generators: Vec<Vec<f64>>,
    /// Recession directions contributed by zero-likelihood outcomes or signals.
    pub directions: Vec<Vec<f64>>,
    pub direction_labels: Vec<String>,
}

impl LikelihoodHull {
    pub fn dim(&self) -> usize {
        self.generators
            .first()
            .or(self.directions.first())
            .map_or(0, Vec::len)
    }

    fn from_columns(reference: usize, labels: Vec<String>, columns: &[Vec<f64>]) -> Self {
        // columns[k][i] = probability of column k under effort i
        let mut hull = Self {
            reference,
            labels: Vec::new(),
            generators: Vec::new(),
            directions: Vec::new(),
            direction_labels: Vec::new(),
        };
        for (label, col) in labels.into_iter().zip(columns) {
            let star = col[reference];
            if star > 0.0 {
                hull.generators.push(col.iter().map(|p| 1.0 - p / star).collect());
                hull.labels.push(label);
            } else if col.iter().any(|&p| p > 0.0) {
                hull.directions.push(col.iter().map(|p| -p).collect());
                hull.direction_labels.push(label);
            }
        }
        hull
    }
}

/// `co(f)`: one generator per outcome, `1 - f(x|e_i)/f(x|e*)`.
pub fn hull_of_f(m: &ModelInstance, reference: usize) -> Result<LikelihoodHull> {
    m.check_effort(reference)?;
    let columns: Vec<Vec<f64>> = (0..m.num_outcomes())
        .map(|x| m.f.iter().map(|row| row[x]).collect())
        .collect();
    let labels = m.outcomes.iter().map(|o| o.label.clone()).collect();
    Ok(LikelihoodHull::from_columns(reference, labels, &columns))
}

/// `co(p)`: one generator per signal. Signals that are never emitted are
/// dropped.
pub fn hull_of_p(
    m: &ModelInstance,
    pi: &InformationStructure,
    reference: usize,
) -> Result<LikelihoodHull> {
    m.check_effort(reference)?;
    let p = m.induce(pi)?;
    let columns: Vec<Vec<f64>> = (0..p.num_signals())
        .map(|s| p.p.iter().map(|row| row[s]).collect())
        .collect();
    Ok(LikelihoodHull::from_columns(
        reference,
        pi.signals.clone(),
        &columns,
    ))
}

/// Separating hyperplane `normal . y <= offset` for all hull points, with the
/// tested point strictly on the other side. `normal` has unit length.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hyperplane {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Hyperplane {
    pub fn eval(&self, y: &[f64]) -> f64 {
        self.normal.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() - self.offset
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Membership {
    pub inside: bool,
    /// Convex weights over the generators when inside.
    pub weights: Vec<f64>,
    /// Nonnegative weights over recession directions when inside.
    pub direction_weights: Vec<f64>,
    pub separating: Option<Hyperplane>,
}

pub fn in_hull(point: &[f64], hull: &LikelihoodHull) -> Membership {
    let k = hull.generators.len();
    let r = hull.directions.len();
    let dim = point.len();
    let mut lp = LinearProgram::minimize(vec![0.0; k + r]);
    let mut sum_row = vec![1.0; k];
    sum_row.extend(std::iter::repeat_n(0.0, r));
    lp.add(sum_row, Cmp::Eq, 1.0);
    for i in 0..dim {
        let row = hull
            .generators
            .iter()
            .chain(&hull.directions)
            .map(|g| g[i])
            .collect();
        lp.add(row, Cmp::Eq, point[i]);
    }
    match lp.solve() {
        Ok(sol) => {
            let mut weights = sol.x[..k].to_vec();
            let total: f64 = weights.iter().sum();
            if total > 0.0 {
                weights.iter_mut().for_each(|w| *w /= total);
            }
            Membership {
                inside: true,
                weights,
                direction_weights: sol.x[k..].to_vec(),
                separating: None,
            }
        }
        Err(LpError::Infeasible { farkas, .. }) => {
            let y0 = farkas[0];
            let h: Vec<f64> = farkas[1..].to_vec();
            let norm = h.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
            Membership {
                inside: false,
                weights: Vec::new(),
                direction_weights: Vec::new(),
                separating: Some(Hyperplane {
                    normal: h.iter().map(|v| v / norm).collect(),
                    offset: -y0 / norm,
                }),
            }
        }
        Err(_) => Membership {
            inside: false,
            weights: Vec::new(),
            direction_weights: Vec::new(),
            separating: None,
        },
    }
}

/// Numerical rank of a set of row vectors (Gaussian elimination, partial pivoting).
pub fn rank(rows: &[Vec<f64>], tol: f64) -> usize {
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let ncols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let pivot = (rank..a.len()).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()));
        let Some(p) = pivot else { break };
        if a[p][col].abs() <= tol {
            continue;
        }
        a.swap(rank, p);
        for i in 0..a.len() {
            if i != rank {
                let factor = a[i][col] / a[rank][col];
                for c in col..ncols {
                    a[i][c] -= factor * a[rank][c];
                }
            }
        }
        rank += 1;
    }
    rank
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InteriorityReport {
    pub reference: usize,
    pub full_support_at_reference: bool,
    /// Dimension of the smallest linear subspace containing `co(f)`.
    pub dim_t: usize,
    pub interior: bool,
}

/// With full support under `e*`, the weights `f(x|e*)` write the origin as a
/// strictly positive combination of all generators, so it is relatively
/// interior.
pub fn origin_interiority(m: &ModelInstance, reference: usize) -> Result<InteriorityReport> {
    let hull = hull_of_f(m, reference)?;
    let full = m.f[reference].iter().all(|&v| v > 0.0);
    let mut vecs = hull.generators.clone();
    vecs.extend(hull.directions.iter().cloned());
    Ok(InteriorityReport {
        reference,
        full_support_at_reference: full,
        dim_t: rank(&vecs, 1e-9),
        interior: full,
    })
}

/// Lower and upper bounds on the reference-weighted wage level `w̄` that make
/// `e_i` incentive compatible at `l`, or `None` when an equal-likelihood
/// cheaper effort makes the point infeasible.
fn wage_bounds(l: &[f64], i: usize, c: &[f64]) -> Option<(f64, f64)> {
    let mut lower = 0.0_f64;
    let mut upper = f64::INFINITY;
    for j in 0..l.len() {
        if j == i {
            continue;
        }
        let dc = c[i] - c[j];
        let dl = l[j] - l[i];
        if dl > 0.0 {
            lower = lower.max(dc / dl);
        } else if dl < 0.0 {
            upper = upper.min(dc / dl);
        } else if dc > 0.0 {
            return None;
        }
    }
    Some((lower, upper))
}

/// Membership of `l` in the feasible cone `Omega_i`.
pub fn cone_membership(l: &[f64], i: usize, c: &[f64]) -> bool {
    matches!(wage_bounds(l, i, c), Some((lo, hi)) if lo <= hi + hull_tol())
}

/// Cost `(1 - l_i) * max_j (c_i - c_j)/(l_j - l_i)` of implementing `e_i` at
/// `l`; `+inf` outside `Omega_i`.
pub fn geometric_cost(l: &[f64], i: usize, c: &[f64]) -> f64 {
    match wage_bounds(l, i, c) {
        Some((lo, hi)) if lo <= hi + hull_tol() => (1.0 - l[i]) * lo,
        _ => f64::INFINITY,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HullMinimum {
    pub value: f64,
    /// `None` when the hull misses `Omega_i` or the infimum is approached
    /// only along a recession direction.
    pub minimizer: Option<Vec<f64>>,
    /// The effort whose incentive constraint binds at the minimizer.
    pub binding: Option<usize>,
}

/// Minimizes [`geometric_cost`] over `hull ∩ Omega_i`.
///
/// For each candidate binding effort `j` (cheaper than `e_i`) the cost is a
/// linear-fractional function of the hull weights; the Charnes-Cooper
/// substitution `z = beta / (l_j - l_i)` turns it into an LP. The cone
/// conditions, multiplied through by `l_j - l_i > 0`, stay linear.
pub fn min_cost_over_hull(hull: &LikelihoodHull, i: usize, c: &[f64]) -> HullMinimum {
    let dim = c.len();
    if c.iter().all(|&cj| c[i] <= cj) {
        return HullMinimum {
            value: 0.0,
            minimizer: Some(vec![0.0; dim]),
            binding: None,
        };
    }
    let k = hull.generators.len();
    let cols: Vec<&Vec<f64>> = hull.generators.iter().chain(&hull.directions).collect();
    // Linear form of L_q = sum_k z_k a_kq + sum_r nu_r d_rq.
    let coord = |q: usize| -> Vec<f64> { cols.iter().map(|g| g[q]).collect() };
    let diff = |a: &[f64], b: &[f64], sa: f64, sb: f64| -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| sa * x - sb * y).collect()
    };

    let mut best = HullMinimum {
        value: f64::INFINITY,
        minimizer: None,
        binding: None,
    };
    let li = coord(i);
    for j in 0..dim {
        let dcj = c[i] - c[j];
        if dcj <= 0.0 {
            continue;
        }
        let lj = coord(j);
        let gap_j = diff(&lj, &li, 1.0, 1.0);
        // objective: dcj * (S - L_i), S = sum of generator weights
        let objective: Vec<f64> = (0..cols.len())
            .map(|col| dcj * (if col < k { 1.0 } else { 0.0 } - li[col]))
            .collect();
        let mut lp = LinearProgram::minimize(objective);
        lp.add(gap_j.clone(), Cmp::Eq, 1.0);
        for q in 0..dim {
            if q == i || q == j {
                continue;
            }
            let dcq = c[i] - c[q];
            let gap_q = diff(&coord(q), &li, 1.0, 1.0);
            // dcj * (L_q - L_i) - dcq * (L_j - L_i) >= 0
            lp.add(diff(&gap_q, &gap_j, dcj, dcq), Cmp::Ge, 0.0);
        }
        let Ok(sol) = lp.solve() else { continue };
        if sol.objective < best.value {
            let s: f64 = sol.x[..k].iter().sum();
            let minimizer = (s > 1e-12).then(|| {
                (0..dim)
                    .map(|q| cols.iter().zip(&sol.x).map(|(g, z)| g[q] * z).sum::<f64>() / s)
                    .collect()
            });
            best = HullMinimum {
                value: sol.objective,
                minimizer,
                binding: Some(j),
            };
        }
    }
    best
}
