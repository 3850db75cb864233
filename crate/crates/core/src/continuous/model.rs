use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::integrate;

/// Density families on `[0,1]` indexed by effort `e ∈ (0,1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    /// `f(x|e) = a e x^(a e - 1)`, CDF `x^(a e)`.
    Power { shape: f64 },
    /// CDF `(e^x - 1)/(e - 1)` with the effort as base; uniform at `e = 1`.
    TruncatedExponential,
    /// `w * Power(a1) + (1 - w) * Power(a2)`; its score is not monotone in `x`.
    Mixture { shapes: [f64; 2], weight: f64 },
}

/// `u / (e^u - 1)`.
fn phi(u: f64) -> f64 {
    if u == 0.0 {
        1.0
    } else {
        u / u.exp_m1()
    }
}

/// `d/du ln phi(u) = 1/u - 1/(1 - e^-u)`.
fn kappa(u: f64) -> f64 {
    if u.abs() < 0.05 {
        let u2 = u * u;
        -0.5 - u / 12.0 + u * u2 / 720.0 - u * u2 * u2 / 30240.0
    } else {
        1.0 / u + 1.0 / (-u).exp_m1()
    }
}

fn kappa_prime(u: f64) -> f64 {
    if u.abs() < 0.05 {
        let u2 = u * u;
        -1.0 / 12.0 + u2 / 240.0 - u2 * u2 / 6048.0
    } else {
        let s = (0.5 * u).sinh();
        -1.0 / (u * u) + 1.0 / (4.0 * s * s)
    }
}

fn power_density(a: f64, x: f64, e: f64) -> [f64; 3] {
    let ae = a * e;
    let base = a * x.powf(ae - 1.0);
    let lx = x.ln();
    [e * base, base * (1.0 + ae * lx), a * base * lx * (2.0 + ae * lx)]
}

fn power_cdf(a: f64, x: f64, e: f64) -> [f64; 3] {
    if x <= 0.0 {
        return [0.0; 3];
    }
    if x >= 1.0 {
        return [1.0, 0.0, 0.0];
    }
    let fx = x.powf(a * e);
    let lx = x.ln();
    [fx, a * lx * fx, a * a * lx * lx * fx]
}

impl Family {
    /// `(f, f_e, f_ee)` at `(x, e)`.
    pub fn density(&self, x: f64, e: f64) -> [f64; 3] {
        match *self {
            Family::Power { shape } => power_density(shape, x, e),
            Family::TruncatedExponential => {
                let u = e.ln();
                let f = (x * u).exp() * phi(u);
                let s = x + kappa(u);
                [f, f * s / e, f * (s * s + kappa_prime(u) - s) / (e * e)]
            }
            Family::Mixture { shapes, weight } => {
                let p = power_density(shapes[0], x, e);
                let q = power_density(shapes[1], x, e);
                [0, 1, 2].map(|k| weight * p[k] + (1.0 - weight) * q[k])
            }
        }
    }

    /// `F(x|e)`.
    pub fn cdf(&self, x: f64, e: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        match *self {
            Family::Power { shape } => power_cdf(shape, x, e)[0],
            Family::TruncatedExponential => {
                if e <= 0.0 {
                    return 1.0;
                }
                let u = e.ln();
                if u == 0.0 {
                    x
                } else {
                    (x * u).exp_m1() / u.exp_m1()
                }
            }
            Family::Mixture { shapes, weight } => {
                weight * power_cdf(shapes[0], x, e)[0]
                    + (1.0 - weight) * power_cdf(shapes[1], x, e)[0]
            }
        }
    }

    /// `(F_e, F_ee)` where a closed form exists.
    pub fn cdf_derivatives(&self, x: f64, e: f64) -> Option<[f64; 2]> {
        match *self {
            Family::Power { shape } => {
                let c = power_cdf(shape, x, e);
                Some([c[1], c[2]])
            }
            Family::TruncatedExponential => None,
            Family::Mixture { shapes, weight } => {
                let p = power_cdf(shapes[0], x, e);
                let q = power_cdf(shapes[1], x, e);
                Some([
                    weight * p[1] + (1.0 - weight) * q[1],
                    weight * p[2] + (1.0 - weight) * q[2],
                ])
            }
        }
    }

    /// `(E[x|e], dE[x|e]/de)`.
    pub fn mean(&self, e: f64) -> [f64; 2] {
        let power = |a: f64| {
            let d = a * e + 1.0;
            [a * e / d, a / (d * d)]
        };
        match *self {
            Family::Power { shape } => power(shape),
            Family::TruncatedExponential => {
                let u = e.ln();
                [-kappa(u), -kappa_prime(u) / e]
            }
            Family::Mixture { shapes, weight } => {
                let p = power(shapes[0]);
                let q = power(shapes[1]);
                [0, 1].map(|k| weight * p[k] + (1.0 - weight) * q[k])
            }
        }
    }

    /// Score `r = f_e/f` and its effort derivative `dr/de`.
    pub fn score(&self, x: f64, e: f64) -> [f64; 2] {
        match *self {
            Family::Power { shape } => [1.0 / e + shape * x.ln(), -1.0 / (e * e)],
            Family::TruncatedExponential => {
                let u = e.ln();
                let s = x + kappa(u);
                [s / e, (kappa_prime(u) - s) / (e * e)]
            }
            Family::Mixture { .. } => {
                let [f, fe, fee] = self.density(x, e);
                let r = fe / f;
                [r, fee / f - r * r]
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Cost {
    /// `c(e) = scale * e^2`.
    Quadratic { scale: f64 },
    /// `c(e) = scale * e^exponent`, exponent > 1.
    Power { scale: f64, exponent: f64 },
}

impl Cost {
    /// `(c, c', c'')`.
    pub fn eval(&self, e: f64) -> [f64; 3] {
        match *self {
            Cost::Quadratic { scale } => [scale * e * e, 2.0 * scale * e, 2.0 * scale],
            Cost::Power { scale, exponent: r } => [
                scale * e.powf(r),
                scale * r * e.powf(r - 1.0),
                scale * r * (r - 1.0) * e.powf(r - 2.0),
            ],
        }
    }

    /// Parses `quad:<scale>` or `power:<scale>:<exponent>`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::Invalid(format!("bad number {s:?} in cost {text:?}")))
        };
        match parts.as_slice() {
            ["quad", s] => Ok(Cost::Quadratic { scale: num(s)? }),
            ["power", s, r] => Ok(Cost::Power {
                scale: num(s)?,
                exponent: num(r)?,
            }),
            _ => Err(Error::Invalid(format!(
                "cost must be quad:<scale> or power:<scale>:<exponent>, got {text:?}"
            ))),
        }
    }
}

/// Affine payoffs `g(x) = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Payoff {
    pub intercept: f64,
    pub slope: f64,
}

impl Payoff {
    pub const LINEAR: Payoff = Payoff {
        intercept: 0.0,
        slope: 1.0,
    };

    pub fn eval(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }

    /// Parses `linear` or `affine:<intercept>:<slope>`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        match parts.as_slice() {
            ["linear"] => Ok(Self::LINEAR),
            ["affine", a, b] => {
                let num = |s: &str| {
                    s.parse::<f64>()
                        .map_err(|_| Error::Invalid(format!("bad number {s:?} in payoff")))
                };
                Ok(Payoff {
                    intercept: num(a)?,
                    slope: num(b)?,
                })
            }
            _ => Err(Error::Invalid(format!(
                "payoff must be linear or affine:<a>:<b>, got {text:?}"
            ))),
        }
    }
}

impl Default for Payoff {
    fn default() -> Self {
        Self::LINEAR
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuousModel {
    pub family: Family,
    pub cost: Cost,
    #[serde(default)]
    pub payoff: Payoff,
}

impl ContinuousModel {
    /// The worked example: power family with shape 3, `c = e^2/2`, `g = x`.
    pub fn example_two() -> Self {
        Self {
            family: Family::Power { shape: 3.0 },
            cost: Cost::Quadratic { scale: 0.5 },
            payoff: Payoff::LINEAR,
        }
    }

    /// `(E[g|e], dE[g|e]/de)`.
    pub fn expected_output(&self, e: f64) -> [f64; 2] {
        let [m, dm] = self.family.mean(e);
        [self.payoff.eval(m), self.payoff.slope * dm]
    }

    /// Checks normalization on an effort grid, `c(0) = 0`, and `c'' > 0`.
    pub fn validate(&self) -> Result<()> {
        match self.family {
            Family::Power { shape } if !(shape > 0.0) => {
                return Err(Error::Invalid("power shape must be positive".into()))
            }
            Family::Mixture { shapes, weight }
                if !(shapes.iter().all(|&a| a > 0.0) && (0.0..=1.0).contains(&weight)) =>
            {
                return Err(Error::Invalid(
                    "mixture shapes must be positive and the weight in [0,1]".into(),
                ))
            }
            _ => {}
        }
        if self.cost.eval(0.0)[0] != 0.0 {
            return Err(Error::Invalid("cost must vanish at zero effort".into()));
        }
        for k in 1..=10 {
            let e = k as f64 / 10.0;
            let mass = integrate(|x| self.family.density(x, e)[0], 0.0, 1.0, 1e-10)?;
            if (mass - 1.0).abs() > 1e-8 {
                return Err(Error::Invalid(format!(
                    "density integrates to {mass} at e = {e}"
                )));
            }
            if !(self.cost.eval(e)[2] > 0.0) {
                return Err(Error::Invalid(format!("cost is not strictly convex at e = {e}")));
            }
        }
        Ok(())
    }
}
