use serde::{Deserialize, Serialize};

use super::model::ContinuousModel;

const TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionWitness {
    pub condition: String,
    pub effort: f64,
    pub x: [f64; 3],
    pub values: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    /// `f_e/f` strictly monotone in `x` at every sampled effort.
    pub monotone: bool,
    /// `d/de (f_e/f)` convex as a function of `f_e/f`.
    pub convex: bool,
    pub passed: bool,
    pub witness: Option<AssumptionWitness>,
}

impl AssumptionReport {
    pub fn summary(&self) -> String {
        match &self.witness {
            None => "holds on the sampled grid".into(),
            Some(w) => format!(
                "{} violated at e = {:.4}, x = ({:.4}, {:.4}, {:.4})",
                w.condition, w.effort, w.x[0], w.x[1], w.x[2]
            ),
        }
    }
}

/// Samples the score `r(x) = f_e/f` on midpoint grids and checks strict
/// monotonicity in `x` and convexity of `dr/de` against `r`.
pub fn verify_assumption(cm: &ContinuousModel, nx: usize, ne: usize) -> AssumptionReport {
    let xs: Vec<f64> = (0..nx).map(|k| (k as f64 + 0.5) / nx as f64).collect();
    let mut monotone = true;
    let mut convex = true;
    let mut witness = None;
    for j in 1..=ne {
        let e = j as f64 / ne as f64;
        let pts: Vec<[f64; 2]> = xs.iter().map(|&x| cm.family.score(x, e)).collect();
        let first = pts[1][0] - pts[0][0];
        let dir = if first > TOL {
            1.0
        } else if first < -TOL {
            -1.0
        } else {
            0.0
        };
        for k in 1..nx.saturating_sub(1) {
            let d_prev = pts[k][0] - pts[k - 1][0];
            let d_next = pts[k + 1][0] - pts[k][0];
            let strict = dir != 0.0 && d_prev * dir > TOL && d_next * dir > TOL;
            if monotone && !strict {
                monotone = false;
                witness.get_or_insert(AssumptionWitness {
                    condition: "strict monotonicity of f_e/f in x".into(),
                    effort: e,
                    x: [xs[k - 1], xs[k], xs[k + 1]],
                    values: [pts[k - 1][0], pts[k][0], pts[k + 1][0]],
                });
            }
            if !strict {
                continue;
            }
            let s1 = (pts[k][1] - pts[k - 1][1]) / (pts[k][0] - pts[k - 1][0]);
            let s2 = (pts[k + 1][1] - pts[k][1]) / (pts[k + 1][0] - pts[k][0]);
            let second = dir * (s2 - s1) / (pts[k + 1][0] - pts[k - 1][0]);
            if convex && second < -TOL {
                convex = false;
                witness.get_or_insert(AssumptionWitness {
                    condition: "convexity of d(f_e/f)/de in f_e/f".into(),
                    effort: e,
                    x: [xs[k - 1], xs[k], xs[k + 1]],
                    values: [pts[k - 1][1], pts[k][1], pts[k + 1][1]],
                });
            }
        }
    }
    AssumptionReport {
        monotone,
        convex,
        passed: monotone && convex,
        witness,
    }
}
