//! Dense two-phase simplex with Bland's rule.
//!
//! Every program solved in this crate has at most a few hundred variables and
//! constraints, so a plain tableau is both fast enough and easy to audit. The
//! solver reports dual prices for every optimal solve and a Farkas certificate
//! for every infeasible one; the hull-membership test relies on the latter.

use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

/// Pivot elements smaller than this are treated as zero.
const PIVOT_TOL: f64 = 1e-11;
/// Reduced costs above `-COST_TOL` count as non-improving.
const COST_TOL: f64 = 1e-10;
/// Phase-one residual above which a program is declared infeasible.
pub const INFEASIBILITY_TOL: f64 = 1e-9;
static INFEASIBILITY_OVERRIDE: AtomicU64 = AtomicU64::new(0);
const MAX_PIVOTS: usize = 50_000;

/// Current infeasibility threshold, [`INFEASIBILITY_TOL`] unless overridden.
pub fn infeasibility_tol() -> f64 {
    match INFEASIBILITY_OVERRIDE.load(Ordering::Relaxed) {
        0 => INFEASIBILITY_TOL,
        bits => f64::from_bits(bits),
    }
}

/// Overrides the infeasibility threshold for the whole process.
pub fn set_infeasibility_tol(tol: f64) {
    assert!(tol > 0.0, "tolerance must be positive");
    INFEASIBILITY_OVERRIDE.store(tol.to_bits(), Ordering::Relaxed);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LpError {
    /// `farkas` holds one multiplier per constraint row `y` with
    /// `y^T A <= 0` componentwise over the variables and `y^T b > 0`
    /// (for rows written as `A x = b` after slack insertion).
    #[error("linear program is infeasible (phase-one residual {residual:.3e})")]
    Infeasible { residual: f64, farkas: Vec<f64> },
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("simplex exceeded {0} pivots")]
    IterationLimit(usize),
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coefs: Vec<f64>,
    pub cmp: Cmp,
    pub rhs: f64,
}

/// `minimize c^T x` subject to row constraints and `x >= 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    objective: Vec<f64>,
    constraints: Vec<Constraint>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Dual price of each constraint, in the sign convention of the
    /// minimization: `>= 0` for `Ge` rows, `<= 0` for `Le` rows.
    pub duals: Vec<f64>,
}

impl LpSolution {
    /// `b^T y`, equal to [`LpSolution::objective`] at optimality.
    pub fn dual_objective(&self, lp: &LinearProgram) -> f64 {
        lp.constraints
            .iter()
            .zip(&self.duals)
            .map(|(c, y)| c.rhs * y)
            .sum()
    }
}

impl LinearProgram {
    pub fn minimize(objective: Vec<f64>) -> Self {
        Self {
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn add(&mut self, coefs: Vec<f64>, cmp: Cmp, rhs: f64) -> &mut Self {
        assert_eq!(coefs.len(), self.objective.len(), "constraint width");
        self.constraints.push(Constraint { coefs, cmp, rhs });
        self
    }

    pub fn solve(&self) -> Result<LpSolution, LpError> {
        Tableau::build(self).run(self)
    }
}

struct Tableau {
    m: usize,
    n: usize,
    /// Total columns: structural, then slack/surplus, then artificial.
    cols: usize,
    first_artificial: usize,
    a: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    /// Column that formed the unit vector of each row initially.
    unit_col: Vec<usize>,
    /// `-1` if the row was negated to make its right-hand side nonnegative.
    row_sign: Vec<f64>,
    pivots: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let m = lp.constraints.len();
        let n = lp.objective.len();
        let mut rows = Vec::with_capacity(m);
        let mut row_sign = Vec::with_capacity(m);
        for c in &lp.constraints {
            let (sign, cmp) = if c.rhs < 0.0 {
                let flipped = match c.cmp {
                    Cmp::Le => Cmp::Ge,
                    Cmp::Ge => Cmp::Le,
                    Cmp::Eq => Cmp::Eq,
                };
                (-1.0, flipped)
            } else {
                (1.0, c.cmp)
            };
            rows.push((c.coefs.iter().map(|v| v * sign).collect::<Vec<_>>(), cmp, c.rhs * sign));
            row_sign.push(sign);
        }
        let n_slack = rows.iter().filter(|r| r.1 != Cmp::Eq).count();
        let n_art = rows.iter().filter(|r| r.1 != Cmp::Le).count();
        let first_artificial = n + n_slack;
        let cols = first_artificial + n_art;

        let mut a = vec![vec![0.0; cols]; m];
        let mut rhs = vec![0.0; m];
        let mut basis = vec![0; m];
        let mut unit_col = vec![0; m];
        let (mut slack, mut art) = (n, first_artificial);
        for (i, (coefs, cmp, b)) in rows.into_iter().enumerate() {
            a[i][..n].copy_from_slice(&coefs);
            rhs[i] = b;
            match cmp {
                Cmp::Le => {
                    a[i][slack] = 1.0;
                    basis[i] = slack;
                    unit_col[i] = slack;
                    slack += 1;
                }
                Cmp::Ge => {
                    a[i][slack] = -1.0;
                    slack += 1;
                    a[i][art] = 1.0;
                    basis[i] = art;
                    unit_col[i] = art;
                    art += 1;
                }
                Cmp::Eq => {
                    a[i][art] = 1.0;
                    basis[i] = art;
                    unit_col[i] = art;
                    art += 1;
                }
            }
        }
        Self {
            m,
            n,
            cols,
            first_artificial,
            a,
            rhs,
            basis,
            unit_col,
            row_sign,
            pivots: 0,
        }
    }

    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut r = cost.to_vec();
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                for (rj, aij) in r.iter_mut().zip(&self.a[i]) {
                    *rj -= cb * aij;
                }
            }
        }
        r
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.a[row][col];
        for v in self.a[row].iter_mut() {
            *v /= p;
        }
        self.rhs[row] /= p;
        let pivot_row = self.a[row].clone();
        let pivot_rhs = self.rhs[row];
        for i in 0..self.m {
            if i == row {
                continue;
            }
            let f = self.a[i][col];
            if f.abs() > 0.0 {
                for (v, pv) in self.a[i].iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                self.a[i][col] = 0.0;
                self.rhs[i] -= f * pivot_rhs;
                if self.rhs[i] < 0.0 && self.rhs[i] > -1e-13 {
                    self.rhs[i] = 0.0;
                }
            }
        }
        self.basis[row] = col;
        self.pivots += 1;
    }

    /// Runs simplex iterations on `cost` with Bland's rule. Columns at or
    /// beyond `col_limit` may not enter.
    fn iterate(&mut self, cost: &[f64], col_limit: usize) -> Result<(), LpError> {
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(LpError::IterationLimit(MAX_PIVOTS));
            }
            let r = self.reduced_costs(cost);
            let entering = (0..col_limit).find(|&j| r[j] < -COST_TOL && !self.basis.contains(&j));
            let Some(col) = entering else {
                return Ok(());
            };
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let aij = self.a[i][col];
                if aij > PIVOT_TOL {
                    let ratio = self.rhs[i] / aij;
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - 1e-14
                                || (ratio <= br + 1e-14 && self.basis[i] < self.basis[bi])
                            {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            match best {
                None => return Err(LpError::Unbounded),
                Some((row, _)) => self.pivot(row, col),
            }
        }
    }

    /// `y_i = c_u - r_u` where `u` is the row's initial unit column.
    fn row_duals(&self, cost: &[f64]) -> Vec<f64> {
        let r = self.reduced_costs(cost);
        (0..self.m)
            .map(|i| {
                let u = self.unit_col[i];
                let y = cost[u] - r[u];
                // Undo the right-hand-side normalization.
                y * self.row_sign[i]
            })
            .collect()
    }

    fn run(mut self, lp: &LinearProgram) -> Result<LpSolution, LpError> {
        if self.first_artificial < self.cols {
            let mut phase1 = vec![0.0; self.cols];
            for c in phase1.iter_mut().skip(self.first_artificial) {
                *c = 1.0;
            }
            self.iterate(&phase1, self.cols)?;
            let residual: f64 = (0..self.m)
                .filter(|&i| self.basis[i] >= self.first_artificial)
                .map(|i| self.rhs[i])
                .sum();
            if residual > infeasibility_tol() {
                let farkas = self.row_duals(&phase1);
                return Err(LpError::Infeasible { residual, farkas });
            }
            // Drive zero-level artificials out of the basis where possible.
            for i in 0..self.m {
                if self.basis[i] >= self.first_artificial {
                    if let Some(j) =
                        (0..self.first_artificial).find(|&j| self.a[i][j].abs() > 1e-9)
                    {
                        self.pivot(i, j);
                    }
                }
            }
        }
        let mut cost = vec![0.0; self.cols];
        cost[..self.n].copy_from_slice(&lp.objective);
        self.iterate(&cost, self.first_artificial)?;

        let mut x = vec![0.0; self.n];
        for i in 0..self.m {
            if self.basis[i] < self.n {
                x[self.basis[i]] = self.rhs[i].max(0.0);
            }
        }
        let objective = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        let duals = self.row_duals(&cost);
        Ok(LpSolution {
            x,
            objective,
            duals,
        })
    }
}
