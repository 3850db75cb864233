//! Numerical check of the sign pattern of `dL/dpi(x)`, where
//!
//! `L = lambda c' - c + eta [dE[g]/de - lambda_e c' - lambda c'']`
//!
//! is the agent's Lagrangian with the principal's first-order condition as
//! constraint. Writing `P, D, Q` for the integrals of `f, f_e, f_ee` against
//! `pi(H|.)`, `lambda = N/D` with `N = P` (paid on H) or `N = P - 1` (paid
//! on L), and `lambda_e = 1 - N Q / D^2`. Perturbing `pi` by a bump of mass
//! `delta` at `x` moves `(P, D, Q)` by `delta * (f, f_e, f_ee)(x)`.

use serde::{Deserialize, Serialize};

use super::model::ContinuousModel;
use super::threshold::{moments, Moments, PaidSignal, ThresholdStructure};
use crate::error::Result;

pub const BUMP: f64 = 1e-4;
pub const GRID: usize = 512;
pub const PATTERN_TOL: f64 = 1e-6;
const ETA_STEP: f64 = 1e-5;

fn lagrangian(cm: &ContinuousModel, e: f64, m: Moments, paid: PaidSignal, eta: f64) -> f64 {
    let n = match paid {
        PaidSignal::H => m.p,
        PaidSignal::L => m.p - 1.0,
    };
    let lam = n / m.dp;
    let lam_e = 1.0 - n * m.d2p / (m.dp * m.dp);
    let [c, c1, c2] = cm.cost.eval(e);
    lam * c1 - c + eta * (cm.expected_output(e)[1] - lam_e * c1 - lam * c2)
}

fn paid_of(m: &Moments) -> PaidSignal {
    if m.dp > 0.0 {
        PaidSignal::H
    } else {
        PaidSignal::L
    }
}

/// Shadow price of the principal's first-order condition, from stationarity
/// of the Lagrangian in `e`: `eta = -(d/de)(lambda c' - c) / (d/de) G`.
pub fn estimate_eta(cm: &ContinuousModel, t: &ThresholdStructure, e: f64) -> Result<f64> {
    let paid = paid_of(&moments(cm, t, e)?);
    let parts = |x: f64| -> Result<(f64, f64)> {
        let m = moments(cm, t, x)?;
        let objective = lagrangian(cm, x, m, paid, 0.0);
        let g = lagrangian(cm, x, m, paid, 1.0) - objective;
        Ok((objective, g))
    };
    let (o_hi, g_hi) = parts(e + ETA_STEP)?;
    let (o_lo, g_lo) = parts(e - ETA_STEP)?;
    Ok(-(o_hi - o_lo) / (g_hi - g_lo))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FocReport {
    pub lambda: f64,
    pub eta: f64,
    pub grid_points: usize,
    pub sign_changes: usize,
    /// Midpoints between grid cells where the sign flips.
    pub change_points: Vec<f64>,
    /// Sign of the derivative on the first grid point with a nonzero value.
    pub leading_sign: i8,
    /// Derivative `>= -tol` where `pi = 1` and `<= tol` where `pi = 0`.
    pub pattern_holds: bool,
    pub worst_violation: f64,
    pub worst_violation_at: Option<f64>,
    /// No information (`p' = 0`): the structure cannot be incentive compatible.
    pub degenerate: bool,
}

impl FocReport {
    fn degenerate() -> Self {
        Self {
            lambda: f64::NAN,
            eta: f64::NAN,
            grid_points: GRID,
            sign_changes: 0,
            change_points: Vec::new(),
            leading_sign: 0,
            pattern_holds: false,
            worst_violation: 0.0,
            worst_violation_at: None,
            degenerate: true,
        }
    }
}

/// Evaluates `dL/dpi(x)` on a midpoint grid and counts its sign changes.
/// `eta` defaults to [`estimate_eta`].
pub fn foc_sign_pattern(
    cm: &ContinuousModel,
    t: &ThresholdStructure,
    e: f64,
    eta: Option<f64>,
) -> Result<FocReport> {
    let base = moments(cm, t, e)?;
    if base.dp.abs() < 1e-14 {
        return Ok(FocReport::degenerate());
    }
    let paid = paid_of(&base);
    let eta = match eta {
        Some(v) => v,
        None => estimate_eta(cm, t, e)?,
    };
    let lambda = match paid {
        PaidSignal::H => base.p / base.dp,
        PaidSignal::L => (base.p - 1.0) / base.dp,
    };

    let xs: Vec<f64> = (0..GRID).map(|k| (k as f64 + 0.5) / GRID as f64).collect();
    let derivs: Vec<f64> = xs
        .iter()
        .map(|&x| {
            let [f, fe, fee] = cm.family.density(x, e);
            let shift = |s: f64| Moments {
                p: base.p + s * f,
                dp: base.dp + s * fe,
                d2p: base.d2p + s * fee,
            };
            (lagrangian(cm, e, shift(BUMP), paid, eta) - lagrangian(cm, e, shift(-BUMP), paid, eta))
                / (2.0 * BUMP)
        })
        .collect();

    let mut sign_changes = 0;
    let mut change_points = Vec::new();
    let mut last: Option<(f64, f64)> = None;
    let mut leading_sign = 0;
    let mut worst = 0.0_f64;
    let mut worst_at = None;
    for (&x, &d) in xs.iter().zip(&derivs) {
        let violation = if t.high(x) { -d - PATTERN_TOL } else { d - PATTERN_TOL };
        if violation > worst {
            worst = violation;
            worst_at = Some(x);
        }
        if d == 0.0 {
            continue;
        }
        if leading_sign == 0 {
            leading_sign = d.signum() as i8;
        }
        if let Some((px, pd)) = last {
            if pd.signum() != d.signum() {
                sign_changes += 1;
                change_points.push(0.5 * (px + x));
            }
        }
        last = Some((x, d));
    }
    Ok(FocReport {
        lambda,
        eta,
        grid_points: GRID,
        sign_changes,
        change_points,
        leading_sign,
        pattern_holds: worst_at.is_none(),
        worst_violation: worst,
        worst_violation_at: worst_at,
        degenerate: false,
    })
}
