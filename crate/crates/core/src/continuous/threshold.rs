use serde::{Deserialize, Serialize};

use super::model::{ContinuousModel, Family};
use crate::error::{Error, Result};
use crate::numeric::integrate;

const QUAD_TOL: f64 = 1e-10;

/// Indicator structures: the high signal is sent exactly on an interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ThresholdStructure {
    /// `pi(H|x) = 1` iff `x >= threshold`.
    Single { threshold: f64 },
    /// `pi(H|x) = 1` iff `lower <= x <= upper`.
    Double { lower: f64, upper: f64 },
}

impl ThresholdStructure {
    pub fn single(threshold: f64) -> Self {
        Self::Single { threshold }
    }

    pub fn interval(&self) -> (f64, f64) {
        match *self {
            Self::Single { threshold } => (threshold, 1.0),
            Self::Double { lower, upper } => (lower, upper),
        }
    }

    pub fn high(&self, x: f64) -> bool {
        let (a, b) = self.interval();
        x >= a && x <= b
    }

    pub fn validate(&self) -> Result<()> {
        let (a, b) = self.interval();
        if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) || a > b {
            return Err(Error::Invalid(format!(
                "threshold interval [{a}, {b}] must satisfy 0 <= x1 <= x2 <= 1"
            )));
        }
        Ok(())
    }
}

/// `(P, D, Q) = ∫ (f, f_e, f_ee) pi(H|x) dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub p: f64,
    pub dp: f64,
    pub d2p: f64,
}

pub fn moments(cm: &ContinuousModel, t: &ThresholdStructure, e: f64) -> Result<Moments> {
    let (a, b) = t.interval();
    let p = cm.family.cdf(b, e) - cm.family.cdf(a, e);
    if let Some(hi) = cm.family.cdf_derivatives(b, e) {
        let lo = cm.family.cdf_derivatives(a, e).expect("closed form at both ends");
        return Ok(Moments {
            p,
            dp: hi[0] - lo[0],
            d2p: hi[1] - lo[1],
        });
    }
    let fam: Family = cm.family;
    Ok(Moments {
        p,
        dp: integrate(|x| fam.density(x, e)[1], a, b, QUAD_TOL)?,
        d2p: integrate(|x| fam.density(x, e)[2], a, b, QUAD_TOL)?,
    })
}

/// Probability of the high signal and its effort derivative.
pub fn signal_prob(cm: &ContinuousModel, t: &ThresholdStructure, e: f64) -> Result<(f64, f64)> {
    if !(e > 0.0 && e <= 1.0) {
        return Err(Error::Invalid(format!("effort {e} outside (0, 1]")));
    }
    t.validate()?;
    let m = moments(cm, t, e)?;
    Ok((m.p, m.dp))
}

/// Which signal carries the wage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PaidSignal {
    H,
    L,
}

/// `lambda = p/p'` when paying on H (`p' > 0`), `-(1-p)/p'` when paying on L.
pub fn multiplier_from(p: f64, dp: f64) -> Result<(f64, PaidSignal)> {
    if dp.abs() < 1e-14 {
        return Err(Error::ZeroInformation);
    }
    Ok(if dp > 0.0 {
        (p / dp, PaidSignal::H)
    } else {
        (-(1.0 - p) / dp, PaidSignal::L)
    })
}

pub fn multiplier(cm: &ContinuousModel, t: &ThresholdStructure, e: f64) -> Result<f64> {
    let (p, dp) = signal_prob(cm, t, e)?;
    multiplier_from(p, dp).map(|(l, _)| l)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example_values() {
        let cm = ContinuousModel::example_two();
        let t = ThresholdStructure::single(0.45);
        let (p, dp) = signal_prob(&cm, &t, 0.2725).unwrap();
        assert!((p - (1.0 - 0.45f64.powf(0.8175))).abs() < 1e-12);
        assert!((p - 0.4794).abs() < 1e-4);
        assert!((dp + 3.0 * 0.45f64.powf(0.8175) * 0.45f64.ln()).abs() < 1e-12);
        assert!((dp - 1.2464).abs() < 1e-3);
        let lam = multiplier(&cm, &t, 0.2725).unwrap();
        assert!((lam - p / dp).abs() < 1e-15);
        assert!((lam - 0.3846).abs() < 1e-3);
    }

    #[test]
    fn degenerate_thresholds() {
        let cm = ContinuousModel::example_two();
        let (p, dp) = signal_prob(&cm, &ThresholdStructure::single(0.0), 0.5).unwrap();
        assert_eq!((p, dp), (1.0, 0.0));
        let (p, _) = signal_prob(&cm, &ThresholdStructure::single(1.0), 0.5).unwrap();
        assert_eq!(p, 0.0);
        assert!(matches!(
            multiplier(&cm, &ThresholdStructure::single(0.0), 0.5),
            Err(Error::ZeroInformation)
        ));
    }

    #[test]
    fn complement_swaps_branches() {
        let (p, dp) = (0.3, 0.8);
        let (lh, sh) = multiplier_from(p, dp).unwrap();
        let (ll, sl) = multiplier_from(1.0 - p, -dp).unwrap();
        assert_eq!((sh, sl), (PaidSignal::H, PaidSignal::L));
        assert!((lh - ll).abs() < 1e-15);
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let cm = ContinuousModel::example_two();
        for &x in &[0.05, 0.3, 0.45, 0.8] {
            for &e in &[0.1, 0.27, 0.6, 1.0] {
                let t = ThresholdStructure::single(x);
                let m = moments(&cm, &t, e).unwrap();
                let f = |k: usize| integrate(|y| cm.family.density(y, e)[k], x, 1.0, 1e-12).unwrap();
                assert!((m.p - f(0)).abs() < 1e-9);
                assert!((m.dp - f(1)).abs() < 1e-9);
                assert!((m.d2p - f(2)).abs() < 1e-8);
            }
        }
    }
}
