//! Finite principal-agent instances, information structures and the signal
//! distributions they induce.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row sums and probability bounds are checked to this tolerance.
pub const PROB_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outcome {
    pub label: String,
    /// Principal's payoff `g(x)`.
    pub g: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Effort {
    pub label: String,
    /// Agent's cost `c(e)`.
    pub c: f64,
}

/// A finite moral-hazard instance. Effort 0 is the zero-cost outside option.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelInstance {
    pub outcomes: Vec<Outcome>,
    pub efforts: Vec<Effort>,
    /// Performance technology `f[effort][outcome]`.
    pub f: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Shape { detail: String },
    NonFinite { effort: usize, outcome: usize },
    RowSum { effort: usize, sum: f64 },
    NotFullSupport { effort: usize, outcome: usize, value: f64 },
    ZeroEffortCost { cost: f64 },
    NegativeCost { effort: usize, cost: f64 },
}

impl Violation {
    /// Full-support gaps are tolerated by the solvers (zero-likelihood
    /// outcomes become recession directions of the likelihood hull);
    /// everything else makes the instance unusable.
    pub fn is_hard(&self) -> bool {
        !matches!(self, Violation::NotFullSupport { .. })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_hard_violations(&self) -> bool {
        self.violations.iter().any(Violation::is_hard)
    }
}

impl ModelInstance {
    /// Builds an instance after checking shapes. Probabilistic invariants are
    /// left to [`validate_model`].
    pub fn new(outcomes: Vec<Outcome>, efforts: Vec<Effort>, f: Vec<Vec<f64>>) -> Result<Self> {
        let m = Self {
            outcomes,
            efforts,
            f,
        };
        m.check_shape()?;
        Ok(m)
    }

    /// Convenience constructor with generated labels `x1..`, `e1..`.
    pub fn from_arrays(g: &[f64], c: &[f64], f: Vec<Vec<f64>>) -> Result<Self> {
        let outcomes = g
            .iter()
            .enumerate()
            .map(|(i, &g)| Outcome {
                label: format!("x{}", i + 1),
                g,
            })
            .collect();
        let efforts = c
            .iter()
            .enumerate()
            .map(|(i, &c)| Effort {
                label: format!("e{}", i + 1),
                c,
            })
            .collect();
        Self::new(outcomes, efforts, f)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: Self = serde_json::from_str(text)?;
        m.check_shape()?;
        Ok(m)
    }

    fn check_shape(&self) -> Result<()> {
        if self.outcomes.len() < 2 || self.efforts.len() < 2 {
            return Err(Error::Dimension(format!(
                "need at least 2 outcomes and 2 efforts, got {} and {}",
                self.outcomes.len(),
                self.efforts.len()
            )));
        }
        if self.f.len() != self.efforts.len() {
            return Err(Error::Dimension(format!(
                "f has {} rows for {} efforts",
                self.f.len(),
                self.efforts.len()
            )));
        }
        if let Some((i, row)) = self
            .f
            .iter()
            .enumerate()
            .find(|(_, r)| r.len() != self.outcomes.len())
        {
            return Err(Error::Dimension(format!(
                "f row {} has {} entries for {} outcomes",
                i,
                row.len(),
                self.outcomes.len()
            )));
        }
        Ok(())
    }

    pub fn num_outcomes(&self) -> usize {
        self.outcomes.len()
    }

    pub fn num_efforts(&self) -> usize {
        self.efforts.len()
    }

    pub fn costs(&self) -> Vec<f64> {
        self.efforts.iter().map(|e| e.c).collect()
    }

    pub fn payoffs(&self) -> Vec<f64> {
        self.outcomes.iter().map(|o| o.g).collect()
    }

    pub fn cost(&self, e: usize) -> f64 {
        self.efforts[e].c
    }

    pub fn check_effort(&self, e: usize) -> Result<()> {
        if e < self.num_efforts() {
            Ok(())
        } else {
            Err(Error::EffortIndex(e))
        }
    }

    /// `E[g(x) | e] = sum_x g(x) f(x|e)`.
    pub fn expected_output(&self, e: usize) -> f64 {
        self.f[e]
            .iter()
            .zip(&self.outcomes)
            .map(|(p, o)| p * o.g)
            .sum()
    }

    pub fn induce(&self, pi: &InformationStructure) -> Result<SignalDistribution> {
        induce_signal_distribution(self, pi)
    }
}

pub fn validate_model(m: &ModelInstance) -> ValidationReport {
    let mut violations = Vec::new();
    if let Err(e) = m.check_shape() {
        violations.push(Violation::Shape {
            detail: e.to_string(),
        });
        return ValidationReport { violations };
    }
    for (e, row) in m.f.iter().enumerate() {
        for (x, &v) in row.iter().enumerate() {
            if !v.is_finite() {
                violations.push(Violation::NonFinite { effort: e, outcome: x });
            } else if v <= 0.0 {
                violations.push(Violation::NotFullSupport {
                    effort: e,
                    outcome: x,
                    value: v,
                });
            }
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > PROB_TOL {
            violations.push(Violation::RowSum { effort: e, sum });
        }
    }
    let c0 = m.efforts[0].c;
    if c0 != 0.0 {
        violations.push(Violation::ZeroEffortCost { cost: c0 });
    }
    for (e, eff) in m.efforts.iter().enumerate() {
        if !(eff.c >= 0.0) {
            violations.push(Violation::NegativeCost { effort: e, cost: eff.c });
        }
    }
    ValidationReport { violations }
}

/// A garbling `pi[outcome][signal]` of outcomes into signals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InformationStructure {
    pub signals: Vec<String>,
    pub pi: Vec<Vec<f64>>,
}

impl InformationStructure {
    pub fn new(signals: Vec<String>, pi: Vec<Vec<f64>>) -> Result<Self> {
        let s = Self { signals, pi };
        s.validate()?;
        Ok(s)
    }

    /// Builds a structure from a row-stochastic matrix with labels `s1..`.
    pub fn from_matrix(pi: Vec<Vec<f64>>) -> Result<Self> {
        let k = pi.first().map_or(0, Vec::len);
        Self::new((1..=k).map(|i| format!("s{i}")).collect(), pi)
    }

    pub fn full_revelation(num_outcomes: usize) -> Self {
        let pi = (0..num_outcomes)
            .map(|x| (0..num_outcomes).map(|s| if s == x { 1.0 } else { 0.0 }).collect())
            .collect();
        Self {
            signals: (1..=num_outcomes).map(|i| format!("x{i}")).collect(),
            pi,
        }
    }

    pub fn uninformative(num_outcomes: usize) -> Self {
        Self {
            signals: vec!["s".to_string()],
            pi: vec![vec![1.0]; num_outcomes],
        }
    }

    /// Binary structure with `pi(H|x) = q[x]`; signal 0 is `H`, signal 1 is `L`.
    pub fn binary(q: &[f64]) -> Self {
        Self {
            signals: vec!["H".to_string(), "L".to_string()],
            pi: q.iter().map(|&h| vec![h, 1.0 - h]).collect(),
        }
    }

    pub fn num_signals(&self) -> usize {
        self.signals.len()
    }

    pub fn num_outcomes(&self) -> usize {
        self.pi.len()
    }

    /// `pi(H|x)` when the structure is binary.
    pub fn high_probabilities(&self) -> Option<Vec<f64>> {
        (self.num_signals() == 2).then(|| self.pi.iter().map(|r| r[0]).collect())
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.signals.len();
        if k == 0 {
            return Err(Error::Dimension("structure has no signals".into()));
        }
        for (x, row) in self.pi.iter().enumerate() {
            if row.len() != k {
                return Err(Error::Dimension(format!(
                    "pi row {x} has {} entries for {k} signals",
                    row.len()
                )));
            }
            if row.iter().any(|&v| !(-PROB_TOL..=1.0 + PROB_TOL).contains(&v)) {
                return Err(Error::Invalid(format!("pi row {x} has an entry outside [0, 1]")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > PROB_TOL {
                return Err(Error::Invalid(format!("pi row {x} sums to {sum}")));
            }
        }
        Ok(())
    }

    /// Post-processes the structure with a row-stochastic signal garbling
    /// `g[signal][new_signal]`, i.e. returns `pi * g`.
    pub fn garble(&self, g: &[Vec<f64>]) -> Result<Self> {
        if g.len() != self.num_signals() {
            return Err(Error::Dimension("garbling rows must match signals".into()));
        }
        let k = g.first().map_or(0, Vec::len);
        let pi = self
            .pi
            .iter()
            .map(|row| {
                (0..k)
                    .map(|t| row.iter().zip(g).map(|(p, gr)| p * gr[t]).sum())
                    .collect()
            })
            .collect();
        Ok(Self {
            signals: (1..=k).map(|i| format!("s{i}")).collect(),
            pi,
        })
    }

    /// Removes signals that no outcome ever emits.
    pub fn without_null_signals(&self) -> Self {
        let keep: Vec<usize> = (0..self.num_signals())
            .filter(|&s| self.pi.iter().any(|r| r[s] > 0.0))
            .collect();
        Self {
            signals: keep.iter().map(|&s| self.signals[s].clone()).collect(),
            pi: self
                .pi
                .iter()
                .map(|r| keep.iter().map(|&s| r[s]).collect())
                .collect(),
        }
    }
}

/// `p[effort][signal]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignalDistribution {
    pub p: Vec<Vec<f64>>,
}

impl SignalDistribution {
    pub fn num_signals(&self) -> usize {
        self.p.first().map_or(0, Vec::len)
    }
}

/// `p(s|e) = sum_x f(x|e) pi(s|x)`.
pub fn induce_signal_distribution(
    m: &ModelInstance,
    pi: &InformationStructure,
) -> Result<SignalDistribution> {
    if pi.num_outcomes() != m.num_outcomes() {
        return Err(Error::Dimension(format!(
            "structure covers {} outcomes, model has {}",
            pi.num_outcomes(),
            m.num_outcomes()
        )));
    }
    let k = pi.num_signals();
    let p = m
        .f
        .iter()
        .map(|frow| {
            (0..k)
                .map(|s| frow.iter().zip(&pi.pi).map(|(fx, row)| fx * row[s]).sum())
                .collect()
        })
        .collect();
    Ok(SignalDistribution { p })
}

/// The bundled worked instance: three outcomes `{0, 1, 2}`, three efforts
/// with costs `0, 0.1, 0.3`.
pub fn example_one() -> ModelInstance {
    ModelInstance::from_arrays(
        &[0.0, 1.0, 2.0],
        &[0.0, 0.1, 0.3],
        vec![
            vec![0.35, 0.50, 0.15],
            vec![0.05, 0.50, 0.45],
            vec![0.10, 0.15, 0.75],
        ],
    )
    .expect("static instance")
}

/// A four-signal structure on [`example_one`] whose `co(p)` is a quadrilateral.
pub fn example_one_four_signal() -> InformationStructure {
    InformationStructure::from_matrix(vec![
        vec![0.5, 0.2, 0.1, 0.2],
        vec![0.2, 0.3, 0.3, 0.2],
        vec![0.05, 0.05, 0.1, 0.8],
    ])
    .expect("static structure")
}

/// Two-outcome textbook instance: high effort succeeds surely, low effort
/// succeeds with probability `p`; high effort costs `c`.
pub fn simple_instance(p: f64, c: f64) -> Result<ModelInstance> {
    ModelInstance::new(
        vec![
            Outcome {
                label: "fail".into(),
                g: 0.0,
            },
            Outcome {
                label: "success".into(),
                g: 1.0,
            },
        ],
        vec![
            Effort {
                label: "low".into(),
                c: 0.0,
            },
            Effort {
                label: "high".into(),
                c,
            },
        ],
        vec![vec![1.0 - p, p], vec![0.0, 1.0]],
    )
}
