//! Command-line front end. Every subcommand writes one JSON report to stdout
//! or `--out` and maps its result to an exit status.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::agent::{optimize, Budget};
use crate::continuous::{
    foc_sign_pattern, solve_equilibrium_with, verify_assumption, ContinuousModel, Cost, Family,
    Payoff, SolveOptions,
};
use crate::design::{full_extraction, reduce_to_binary, structure_from_hull, ExtractionReport};
use crate::error::Error;
use crate::geometry::{hull_of_f, hull_of_p, set_hull_tol, HULL_TOL};
use crate::lp::{set_infeasibility_tol, INFEASIBILITY_TOL};
use crate::model::{validate_model, InformationStructure, ModelInstance};
use crate::oracle::{grid_search_binary, verify_solution, Claim};
use crate::plot::hull_plot;
use crate::principal::best_effort;

/// Exit statuses.
pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "indicator-design", version, about = "Optimal performance indicators for principal-agent models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Phase-one residual above which a linear program (and hence a hull
    /// membership test) is declared infeasible.
    #[arg(long, global = true, default_value_t = INFEASIBILITY_TOL)]
    pub tol_lp: f64,
    /// Slack in the feasible-cone test.
    #[arg(long, global = true, default_value_t = HULL_TOL)]
    pub tol_hull: f64,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ContinuousArgs {
    /// JSON model config; overrides the individual flags.
    pub config: Option<PathBuf>,
    /// `power`, `truncated-exponential` or `mixture`.
    #[arg(long, default_value = "power")]
    pub family: String,
    #[arg(long, default_value_t = 3.0)]
    pub shape: f64,
    /// Mixture shapes `a,b`.
    #[arg(long, value_delimiter = ',')]
    pub shapes: Option<Vec<f64>>,
    /// Mixture weight on the first shape.
    #[arg(long, default_value_t = 0.5)]
    pub weight: f64,
    /// `quad:s` or `power:s:r`.
    #[arg(long, default_value = "quad:0.5")]
    pub cost: String,
    /// `linear` or `affine:a:b`.
    #[arg(long, default_value = "linear")]
    pub payoff: String,
    /// Search single thresholds only.
    #[arg(long)]
    pub single_only: bool,
    /// Skip the score-monotonicity and convexity precheck.
    #[arg(long)]
    pub skip_assumption: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a finite instance (or a continuous config) for well-formedness.
    Validate { instance: PathBuf },
    /// Solve the principal's subgame for a structure, or the agent's problem.
    SolveDiscrete {
        instance: PathBuf,
        /// Structure JSON (or any report with a `structure` field);
        /// full revelation when omitted.
        #[arg(long)]
        structure: Option<PathBuf>,
        #[arg(long)]
        agent_optimal: bool,
        /// Total subgame evaluations for the agent-optimal search.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Decide whether the agent can extract the full surplus.
    ExtractCheck { instance: PathBuf },
    /// Build a structure whose likelihood hull is spanned by given points.
    ConstructSignal {
        instance: PathBuf,
        /// JSON array of likelihood vectors; the extraction pair by default.
        #[arg(long)]
        points: Option<PathBuf>,
        /// Reference effort (label or 0-based index); the first-best by default.
        #[arg(long)]
        effort: Option<String>,
    },
    /// Collapse a structure to two signals, keeping the implemented effort.
    ReduceBinary {
        instance: PathBuf,
        #[arg(long)]
        structure: PathBuf,
        /// Effort to preserve; the principal's choice by default.
        #[arg(long)]
        effort: Option<String>,
    },
    /// Solve the continuous model over threshold indicators.
    SolveContinuous(ContinuousArgs),
    /// Exhaustive grid search over binary structures.
    Oracle {
        instance: PathBuf,
        #[arg(long, default_value_t = 0.02)]
        delta: f64,
        /// Solution or certificate report to verify against the grid.
        #[arg(long)]
        verify: Option<PathBuf>,
    },
    /// Likelihood hull as CSV, plus SVG when the hull is two-dimensional.
    Plot {
        instance: PathBuf,
        /// Reference effort; the first-best by default.
        #[arg(long)]
        effort: Option<String>,
        /// Plot `co(p)` of this structure instead of `co(f)`.
        #[arg(long)]
        structure: Option<PathBuf>,
        /// Projection coordinates `i,j` (0-based effort indices).
        #[arg(long, value_delimiter = ',')]
        axes: Option<Vec<usize>>,
        /// Output path stem for `.csv` and `.svg`.
        #[arg(long, default_value = "hull")]
        prefix: PathBuf,
    },
}

/// A report and the exit status it carries.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub report: Value,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Self { code: EXIT_OK, report }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

/// Exit status for an error raised by the library.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Json(_)
        | Error::Dimension(_)
        | Error::Invalid(_)
        | Error::EffortIndex(_)
        | Error::BudgetExceeded(_) => EXIT_INVALID,
        Error::InfeasibleSynthesis(_)
        | Error::Precondition(_)
        | Error::ZeroInformation
        | Error::NoInteriorEquilibrium(_)
        | Error::DegenerateSurplus
        | Error::ZeroLikelihood { .. } => EXIT_NO,
        Error::Quadrature(_) | Error::Internal(_) | Error::Lp(_) | Error::Io(_) => EXIT_INTERNAL,
    }
}

/// JSON body describing an error; parse errors carry their position.
pub fn error_report(err: &Error) -> Value {
    let mut v = json!({ "error": err.to_string() });
    if let Error::Json(e) = err {
        v["line"] = json!(e.line());
        v["column"] = json!(e.column());
    }
    v
}

fn read_json(path: &Path) -> Result<Value, Error> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn load_instance(path: &Path) -> Result<ModelInstance, Error> {
    ModelInstance::from_json(&fs::read_to_string(path)?)
}

/// Accepts a bare structure or any report with a `structure` field.
fn load_structure(path: &Path) -> Result<InformationStructure, Error> {
    let v = read_json(path)?;
    let inner = v.get("structure").cloned().unwrap_or(v);
    let s: InformationStructure = serde_json::from_value(inner)?;
    s.validate()?;
    Ok(s)
}

fn resolve_effort(m: &ModelInstance, text: &str) -> Result<usize, Error> {
    if let Some(i) = m.efforts.iter().position(|e| e.label == text) {
        return Ok(i);
    }
    let i: usize = text
        .parse()
        .map_err(|_| Error::Invalid(format!("unknown effort {text:?}")))?;
    m.check_effort(i)?;
    Ok(i)
}

/// Loads an instance and rejects it when it has hard violations; missing
/// support is tolerated because the solvers handle it.
fn checked_instance(path: &Path) -> Result<Result<ModelInstance, Outcome>, Error> {
    let m = load_instance(path)?;
    let report = validate_model(&m);
    if report.has_hard_violations() {
        return Ok(Err(Outcome {
            code: EXIT_INVALID,
            report: json!({ "valid": false, "violations": to_value(&report.violations) }),
        }));
    }
    Ok(Ok(m))
}

macro_rules! instance {
    ($path:expr) => {
        match checked_instance($path)? {
            Ok(m) => m,
            Err(out) => return Ok(out),
        }
    };
}

fn continuous_model(args: &ContinuousArgs) -> Result<ContinuousModel, Error> {
    if let Some(path) = &args.config {
        return Ok(serde_json::from_str(&fs::read_to_string(path)?)?);
    }
    let family = match args.family.as_str() {
        "power" => Family::Power { shape: args.shape },
        "truncated-exponential" | "truncated_exponential" => Family::TruncatedExponential,
        "mixture" => {
            let s = args.shapes.clone().unwrap_or_else(|| vec![1.0, 10.0]);
            if s.len() != 2 {
                return Err(Error::Invalid(format!("--shapes takes two values, got {}", s.len())));
            }
            Family::Mixture {
                shapes: [s[0], s[1]],
                weight: args.weight,
            }
        }
        other => return Err(Error::Invalid(format!("unknown family {other:?}"))),
    };
    Ok(ContinuousModel {
        family,
        cost: Cost::parse(&args.cost)?,
        payoff: Payoff::parse(&args.payoff)?,
    })
}

/// Runs one command. Library errors are returned as `Err`; verdicts that
/// are a well-defined "no" come back as an [`Outcome`] with [`EXIT_NO`].
pub fn execute(cli: &Cli) -> Result<Outcome, Error> {
    if !(cli.tol_lp > 0.0 && cli.tol_hull > 0.0) {
        return Err(Error::Invalid("tolerances must be positive".into()));
    }
    set_infeasibility_tol(cli.tol_lp);
    set_hull_tol(cli.tol_hull);
    match &cli.command {
        Command::Validate { instance } => validate(instance),
        Command::SolveDiscrete {
            instance,
            structure,
            agent_optimal,
            budget,
            seed,
        } => {
            let m = instance!(instance);
            if *agent_optimal {
                let b = budget.map_or_else(Budget::default, Budget::evals);
                let sol = optimize(&m, b, *seed)?;
                return Ok(Outcome::ok(to_value(&sol)));
            }
            let pi = match structure {
                Some(p) => load_structure(p)?,
                None => InformationStructure::full_revelation(m.num_outcomes()),
            };
            let out = best_effort(&m, &pi)?;
            Ok(Outcome::ok(json!({ "structure": to_value(&pi), "outcome": to_value(&out) })))
        }
        Command::ExtractCheck { instance } => {
            let m = instance!(instance);
            let report = full_extraction(&m)?;
            let mut v = to_value(&report);
            v["extractable"] = json!(report.is_extractable());
            Ok(Outcome {
                code: if report.is_extractable() { EXIT_OK } else { EXIT_NO },
                report: v,
            })
        }
        Command::ConstructSignal {
            instance,
            points,
            effort,
        } => {
            let m = instance!(instance);
            let (reference, points) = match points {
                Some(p) => {
                    let pts: Vec<Vec<f64>> = serde_json::from_value(read_json(p)?)?;
                    let e = match effort {
                        Some(s) => resolve_effort(&m, s)?,
                        None => crate::design::first_best_effort(&m),
                    };
                    (e, pts)
                }
                None => match full_extraction(&m)? {
                    ExtractionReport::Extractable(c) => {
                        let far = c.l_star.iter().map(|v| -c.alpha * v).collect();
                        (c.e_star, vec![c.l_star.clone(), far])
                    }
                    not => {
                        let mut v = to_value(&not);
                        v["extractable"] = json!(false);
                        return Ok(Outcome { code: EXIT_NO, report: v });
                    }
                },
            };
            let pi = structure_from_hull(&m, reference, &points)?;
            let hull = hull_of_p(&m, &pi, reference)?;
            let outcome = best_effort(&m, &pi)?;
            Ok(Outcome::ok(json!({
                "reference": reference,
                "points": points,
                "structure": to_value(&pi),
                "signal_likelihoods": to_value(&hull.generators),
                "outcome": to_value(&outcome),
            })))
        }
        Command::ReduceBinary {
            instance,
            structure,
            effort,
        } => {
            let m = instance!(instance);
            let pi = load_structure(structure)?;
            let before = best_effort(&m, &pi)?;
            let e = match effort {
                Some(s) => resolve_effort(&m, s)?,
                None => before.chosen_effort,
            };
            let reduced = reduce_to_binary(&m, &pi, e)?;
            let after = best_effort(&m, &reduced)?;
            Ok(Outcome::ok(json!({
                "effort": e,
                "original": to_value(&pi),
                "original_outcome": to_value(&before),
                "structure": to_value(&reduced),
                "outcome": to_value(&after),
            })))
        }
        Command::SolveContinuous(args) => solve_continuous(args),
        Command::Oracle {
            instance,
            delta,
            verify,
        } => {
            let m = instance!(instance);
            let report = match verify {
                Some(p) => verify_solution(&m, &Claim::from_report_json(&read_json(p)?)?, *delta)?,
                None => grid_search_binary(&m, *delta)?,
            };
            let refuted = report.verdict.as_ref().is_some_and(|v| !v.is_verified());
            Ok(Outcome {
                code: if refuted { EXIT_NO } else { EXIT_OK },
                report: to_value(&report),
            })
        }
        Command::Plot {
            instance,
            effort,
            structure,
            axes,
            prefix,
        } => {
            let m = instance!(instance);
            let reference = match effort {
                Some(s) => resolve_effort(&m, s)?,
                None => crate::design::first_best_effort(&m),
            };
            let hull = match structure {
                Some(p) => hull_of_p(&m, &load_structure(p)?, reference)?,
                None => hull_of_f(&m, reference)?,
            };
            let plot = hull_plot(&m, &hull);
            let csv_path = prefix.with_extension("csv");
            fs::write(&csv_path, plot.to_csv())?;
            let explicit = axes.is_some();
            let (a, b) = match axes {
                Some(ax) if ax.len() == 2 => (ax[0], ax[1]),
                Some(ax) => return Err(Error::Invalid(format!("--axes takes two values, got {}", ax.len()))),
                None => {
                    let mut free = (0..m.num_efforts()).filter(|&i| i != reference);
                    (free.next().unwrap_or(0), free.next().unwrap_or(0))
                }
            };
            let drawable = a < m.num_efforts() && b < m.num_efforts() && a != b;
            if explicit && !drawable {
                return Err(Error::Invalid(format!("axes {a},{b} are not two distinct coordinates")));
            }
            let mut report = json!({
                "reference": reference,
                "dim_t": plot.dim_t,
                "axes": if drawable { json!([a, b]) } else { Value::Null },
                "csv": csv_path.display().to_string(),
                "plot": to_value(&plot),
            });
            if plot.dim_t == 2 && drawable {
                let svg_path = prefix.with_extension("svg");
                fs::write(&svg_path, plot.to_svg(a, b))?;
                report["svg"] = json!(svg_path.display().to_string());
            } else {
                report["notice"] = json!(format!(
                    "hull has dimension {}, SVG is only drawn for dimension 2",
                    plot.dim_t
                ));
            }
            Ok(Outcome::ok(report))
        }
    }
}

fn validate(path: &Path) -> Result<Outcome, Error> {
    let text = fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text)?;
    if v.get("family").is_some() {
        let cm: ContinuousModel = serde_json::from_str(&text)?;
        let assumption = verify_assumption(&cm, 200, 50);
        return Ok(match cm.validate() {
            Ok(()) => Outcome::ok(json!({
                "valid": true,
                "kind": "continuous",
                "assumption": to_value(&assumption),
                "assumption_summary": assumption.summary(),
            })),
            Err(e) => Outcome {
                code: EXIT_INVALID,
                report: json!({ "valid": false, "kind": "continuous", "error": e.to_string() }),
            },
        });
    }
    let m: ModelInstance = serde_json::from_str(&text)?;
    let report = validate_model(&m);
    Ok(Outcome {
        code: if report.passed() { EXIT_OK } else { EXIT_INVALID },
        report: json!({
            "valid": report.passed(),
            "kind": "finite",
            "violations": to_value(&report.violations),
        }),
    })
}

fn solve_continuous(args: &ContinuousArgs) -> Result<Outcome, Error> {
    let cm = continuous_model(args)?;
    if let Err(e) = cm.validate() {
        return Ok(Outcome {
            code: EXIT_INVALID,
            report: json!({ "valid": false, "error": e.to_string() }),
        });
    }
    if !args.skip_assumption {
        let assumption = verify_assumption(&cm, 64, 32);
        if !assumption.passed {
            return Ok(Outcome {
                code: EXIT_INVALID,
                report: json!({
                    "valid": false,
                    "error": format!("likelihood-ratio assumption fails: {}", assumption.summary()),
                    "assumption": to_value(&assumption),
                }),
            });
        }
    }
    let opts = SolveOptions {
        check_assumption: !args.skip_assumption,
        double: !args.single_only,
        ..SolveOptions::default()
    };
    let eq = solve_equilibrium_with(&cm, &opts)?;
    let foc = foc_sign_pattern(&cm, &eq.structure, eq.effort, None)?;
    let identity = eq.principal_payoff + eq.agent_payoff + eq.effort_cost - eq.expected_output;
    Ok(Outcome::ok(json!({
        "model": to_value(&cm),
        "equilibrium": to_value(&eq),
        "accounting_residual": identity,
        "foc_check": to_value(&foc),
    })))
}

/// Parses `args`, runs the command and writes the report. Returns the exit
/// status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    let (code, report) = match execute(&cli) {
        Ok(o) => (o.code, o.report),
        Err(e) => {
            eprintln!("error: {e}");
            (exit_code(&e), error_report(&e))
        }
    };
    let text = serde_json::to_string_pretty(&report).expect("reports serialize") + "\n";
    let written = match &cli.out {
        Some(path) => fs::write(path, &text),
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
            r => r,
        },
    };
    match written {
        Ok(()) => code,
        Err(e) => {
            eprintln!("cannot write report: {e}");
            EXIT_INTERNAL
        }
    }
}
