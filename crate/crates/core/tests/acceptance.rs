//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::time::{Duration, Instant};

use indicator_design::agent::{optimize, Budget};
use indicator_design::continuous::{foc_sign_pattern, solve_equilibrium, ContinuousModel, ThresholdStructure};
use indicator_design::design::{
    almost_perfect_probe, full_extraction, reduce_to_binary, threshold_epsilon, ExtractionReport,
};
use indicator_design::geometry::{hull_of_f, hull_of_p, min_cost_over_hull};
use indicator_design::model::{example_one, simple_instance, InformationStructure, ModelInstance};
use indicator_design::oracle::{discretize_continuous, grid_search_binary, verify_solution, Claim};
use indicator_design::principal::{best_effort, min_wage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn random_model(rng: &mut ChaCha8Rng, nx: usize, ne: usize) -> ModelInstance {
    let g: Vec<f64> = (0..nx).map(|_| rng.gen_range(0.0..2.0)).collect();
    let mut c = vec![0.0];
    for _ in 1..ne {
        let last = *c.last().unwrap();
        c.push(last + rng.gen_range(0.01..0.3));
    }
    let f = (0..ne)
        .map(|_| {
            let row: Vec<f64> = (0..nx).map(|_| rng.gen_range(0.05..1.0)).collect();
            let s: f64 = row.iter().sum();
            row.into_iter().map(|v| v / s).collect()
        })
        .collect();
    ModelInstance::from_arrays(&g, &c, f).unwrap()
}

fn random_structure(rng: &mut ChaCha8Rng, nx: usize, ns: usize) -> InformationStructure {
    let pi = (0..nx)
        .map(|_| {
            let row: Vec<f64> = (0..ns).map(|_| rng.gen_range(0.05..1.0)).collect();
            let s: f64 = row.iter().sum();
            row.into_iter().map(|v| v / s).collect()
        })
        .collect();
    InformationStructure::from_matrix(pi).unwrap()
}

fn hull_geometry() -> Verdict {
    let m = example_one();
    let hull = hull_of_f(&m, 2).unwrap();
    let expected = [[-2.5, 0.5, 0.0], [-7.0 / 3.0, -7.0 / 3.0, 0.0], [0.8, 0.4, 0.0]];
    let err = hull
        .generators
        .iter()
        .zip(&expected)
        .map(|(g, e)| max_abs_diff(g, e))
        .fold(0.0, f64::max);
    let reps = 200;
    let start = Instant::now();
    for _ in 0..reps {
        std::hint::black_box(hull_of_f(std::hint::black_box(&m), 2).unwrap());
    }
    let per_call = start.elapsed() / reps;
    verdict(
        hull.generators.len() == 3 && err <= 1e-9 && per_call < Duration::from_millis(1),
        format!("max generator error {err:.1e}, {per_call:?} per call"),
    )
}

fn full_revelation() -> Verdict {
    let m = example_one();
    let out = best_effort(&m, &InformationStructure::full_revelation(3)).unwrap();
    let w = out.per_effort_values[1].expected_wage.unwrap_or(f64::NAN);
    verdict(
        out.chosen_effort == 1 && (w - 0.15).abs() <= 1e-6 && (out.principal_payoff - 1.25).abs() <= 1e-6,
        format!("chosen {}, W(e2) = {w:.9}, U_P = {:.9}", out.chosen_label, out.principal_payoff),
    )
}

fn extraction_example_one() -> Verdict {
    let m = example_one();
    let ExtractionReport::Extractable(cert) = full_extraction(&m).unwrap() else {
        return verdict(false, "reported not extractable");
    };
    let l_err = max_abs_diff(&cert.l_star, &[6.0 / 17.0, 4.0 / 17.0, 0.0]);
    let q = [27.0 / 83.0, 15.0 / 83.0, 41.0 / 83.0];
    let hand = best_effort(&m, &InformationStructure::binary(&q)).unwrap();
    let pass = l_err <= 1e-9
        && (cert.principal_payoff - 0.8).abs() <= 1e-6
        && (cert.agent_payoff - 0.55).abs() <= 1e-6
        && hand.chosen_effort == 2
        && (hand.principal_payoff - 0.8).abs() <= 1e-6;
    verdict(
        pass,
        format!(
            "l* error {l_err:.1e}, U_P = {:.9}, U_A = {:.9}; reference indicator: {} with U_P = {:.9}",
            cert.principal_payoff, cert.agent_payoff, hand.chosen_label, hand.principal_payoff
        ),
    )
}

fn simple_closed_forms() -> Verdict {
    let mut worst_grid = 0.0f64;
    let mut worst_opt = 0.0f64;
    let mut slowest = Duration::ZERO;
    let mut failures = Vec::new();
    for p in [0.3, 0.5, 0.7] {
        // Above (1-p)^2 the costs stay below 1-p, so high effort remains
        // first best and extraction is not trivial.
        let edge = (1.0 - p) * (1.0 - p);
        let above = |t: f64| edge + t * ((1.0 - p) - edge);
        for c in [0.3 * edge, 0.6 * edge, 0.9 * edge, edge, above(0.25), above(0.75)] {
            let start = Instant::now();
            let m = simple_instance(p, c).unwrap();
            let extractable = full_extraction(&m).unwrap().is_extractable();
            if c <= edge {
                let target = 1.0 - p - c;
                let grid = grid_search_binary(&m, 0.01).unwrap().best_value;
                let opt = optimize(&m, Budget::default(), 1).unwrap().agent_value;
                worst_grid = worst_grid.max((grid - target).abs());
                worst_opt = worst_opt.max((opt - target).abs());
                if !extractable || (grid - target).abs() > 0.01 || (opt - target).abs() > 1e-6 {
                    failures.push(format!("(p={p}, c={c:.4})"));
                }
            } else if extractable {
                failures.push(format!("(p={p}, c={c:.4}) extractable"));
            }
            slowest = slowest.max(start.elapsed());
        }
    }
    verdict(
        failures.is_empty() && slowest < Duration::from_secs(10),
        format!(
            "grid error {worst_grid:.2e}, optimizer error {worst_opt:.2e}, slowest point {slowest:?}{}",
            if failures.is_empty() { String::new() } else { format!(", failing {}", failures.join(" ")) }
        ),
    )
}

fn binary_reduction_suite() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut failures = 0;
    let mut tested = 0;
    let mut drawn = 0;
    // Only instances where the principal implements a costly effort count;
    // cubing the structure entries makes the signals informative enough.
    while tested < 200 && drawn < 100_000 {
        drawn += 1;
        let nx = rng.gen_range(2..=5);
        let ne = rng.gen_range(2..=5);
        let ns = rng.gen_range(1..=5);
        let m = random_model(&mut rng, nx, ne);
        let pi = sharpen(&random_structure(&mut rng, nx, ns), 3);
        let before = best_effort(&m, &pi).unwrap();
        let e = before.chosen_effort;
        if e == 0 {
            continue;
        }
        tested += 1;
        match reduce_to_binary(&m, &pi, e) {
            Ok(b) => {
                let after = best_effort(&m, &b).unwrap();
                let p = m.induce(&b).unwrap();
                let w = min_wage(&m, &p, e).unwrap().map_or(f64::INFINITY, |s| s.value);
                let d = (w - before.expected_wage).abs();
                worst = worst.max(d);
                if d > 1e-7 || after.chosen_effort != e {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
    }
    let elapsed = start.elapsed();
    verdict(
        tested == 200 && failures == 0 && elapsed < Duration::from_secs(60),
        format!(
            "{tested} instances with costly effort of {drawn} drawn, {failures} failures, max W change {worst:.1e}, {elapsed:?}"
        ),
    )
}

/// Raises every entry to `power` and renormalizes rows.
fn sharpen(pi: &InformationStructure, power: i32) -> InformationStructure {
    let rows = pi
        .pi
        .iter()
        .map(|row| {
            let r: Vec<f64> = row.iter().map(|v| v.powi(power)).collect();
            let s: f64 = r.iter().sum();
            r.into_iter().map(|v| v / s).collect()
        })
        .collect();
    InformationStructure::from_matrix(rows).unwrap()
}

fn wage_geometry_suite() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    let mut mismatched_feasibility = 0;
    for _ in 0..200 {
        let nx = rng.gen_range(2..=5);
        let ne = rng.gen_range(2..=5);
        let ns = rng.gen_range(1..=5);
        let m = random_model(&mut rng, nx, ne);
        let pi = random_structure(&mut rng, nx, ns);
        let e = rng.gen_range(0..ne);
        let reference = rng.gen_range(0..ne);
        let lp = min_wage(&m, &m.induce(&pi).unwrap(), e).unwrap().map(|s| s.value);
        let geo = min_cost_over_hull(&hull_of_p(&m, &pi, reference).unwrap(), e, &m.costs()).value;
        match lp {
            Some(w) if geo.is_finite() => worst = worst.max((w - geo).abs()),
            None if geo.is_infinite() => {}
            _ => mismatched_feasibility += 1,
        }
    }
    verdict(
        worst <= 1e-7 && mismatched_feasibility == 0,
        format!("200 instances, max |LP - hull| {worst:.1e}, feasibility mismatches {mismatched_feasibility}"),
    )
}

fn extraction_suite() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut accepted = 0;
    let mut drawn = 0;
    let mut worst = 0.0f64;
    let mut failures = 0;
    let start = Instant::now();
    while accepted < 100 && drawn < 20_000 {
        drawn += 1;
        let nx = rng.gen_range(2..=3);
        let ne = rng.gen_range(2..=3);
        let m = random_model(&mut rng, nx, ne);
        let Ok(ExtractionReport::Extractable(cert)) = full_extraction(&m) else {
            continue;
        };
        if cert.e_star == 0 {
            continue;
        }
        accepted += 1;
        let d = (cert.principal_payoff - m.expected_output(0)).abs();
        worst = worst.max(d);
        let verified = verify_solution(&m, &Claim::from(&cert), 0.02)
            .map(|r| r.verdict.is_some_and(|v| v.is_verified()))
            .unwrap_or(false);
        if d > 1e-7 || !verified {
            failures += 1;
        }
    }
    verdict(
        accepted == 100 && failures == 0,
        format!(
            "{accepted} extractable of {drawn} drawn, {failures} failures, max |U_P - E[g|e1]| {worst:.1e}, {:?}",
            start.elapsed()
        ),
    )
}

fn almost_perfect() -> Verdict {
    let values = [0.0, 0.5, 1.0];
    let costs = [0.0, 0.1, 0.3];
    let start = Instant::now();
    let small = [1e-3, 5e-4, 1e-4, 1e-5, 1e-6]
        .iter()
        .all(|&e| almost_perfect_probe(&values, &costs, e).unwrap());
    let large = [0.45, 0.49, 0.499]
        .iter()
        .all(|&e| !almost_perfect_probe(&values, &costs, e).unwrap());
    let b = threshold_epsilon(&values, &costs, 1e-4).unwrap();
    let elapsed = start.elapsed();
    verdict(
        small && large && b.hi - b.lo <= 1e-4 && elapsed < Duration::from_secs(30),
        format!(
            "holds at eps <= 1e-3: {small}, fails near 1/2: {large}, bracket [{:.6}, {:.6}], {elapsed:?}",
            b.lo, b.hi
        ),
    )
}

fn example_two() -> Verdict {
    let cm = ContinuousModel::example_two();
    let eq = solve_equilibrium(&cm).unwrap();
    let ThresholdStructure::Single { threshold } = eq.structure else {
        return verdict(false, format!("returned {:?}", eq.structure));
    };
    let e = eq.effort;
    let identity = eq.principal_payoff + eq.agent_payoff + eq.effort_cost - 3.0 * e / (3.0 * e + 1.0);
    let rows = [
        ("threshold x*", threshold, 0.45),
        ("effort e*", e, 0.2725),
        ("expected wage", eq.expected_wage, 0.1048),
        ("U_P", eq.principal_payoff, 0.3450),
        ("U_A", eq.agent_payoff, 0.0677),
    ];
    println!("  power-family discrepancy report (tolerance 0.02):");
    let mut within = true;
    for (name, ours, reported) in rows {
        let d = ours - reported;
        within &= d.abs() <= 0.02;
        println!("    {name:<14} solved {ours:.6}  reported {reported:.4}  difference {d:+.6}");
    }
    println!(
        "    wage on H      solved {:.6}  (the reported 0.1048 matches the expected wage, not this)",
        eq.wage_on_paid_signal
    );
    println!(
        "    first best     solved {:.6}  reported 0.4708 (not a target; FOC residual {:.1e})",
        eq.first_best.effort, eq.first_best.foc_residual
    );
    verdict(
        within && identity.abs() <= 1e-8 && eq.first_best.foc_residual.abs() < 1e-8,
        format!(
            "single threshold {threshold:.6}, accounting residual {identity:.1e}, first-best residual {:.1e}",
            eq.first_best.foc_residual
        ),
    )
}

fn discrete_oracle() -> Verdict {
    let cm = ContinuousModel::example_two();
    let start = Instant::now();
    let continuous = solve_equilibrium(&cm).unwrap().agent_payoff;
    let m = discretize_continuous(&cm, 50, 40).unwrap();
    let budget = Budget {
        restarts: 2,
        sweeps: 60,
        max_evals: 2_000_000,
    };
    let discrete = optimize(&m, budget, 7).unwrap();
    let elapsed = start.elapsed();
    let gap = discrete.agent_value - continuous;
    verdict(
        gap.abs() <= 0.02 && elapsed < Duration::from_secs(120),
        format!(
            "continuous U_A {continuous:.6}, discretized agent value {:.6} at {} ({}), gap {gap:+.4}, {elapsed:?}",
            discrete.agent_value, discrete.outcome.chosen_label, discrete.diagnostics.status
        ),
    )
}

fn structure_check() -> Verdict {
    let cm = ContinuousModel::example_two();
    let eq = solve_equilibrium(&cm).unwrap();
    let r = foc_sign_pattern(&cm, &eq.structure, eq.effort, None).unwrap();
    verdict(
        r.sign_changes == 1 && r.pattern_holds,
        format!(
            "{} sign changes at {:?}, leading sign {:+}, eta {:.4}, worst violation {:.3e} at x = {:?}",
            r.sign_changes, r.change_points, r.leading_sign, r.eta, r.worst_violation, r.worst_violation_at
        ),
    )
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 11] = [
        ("worked instance hull geometry", hull_geometry),
        ("worked instance full revelation", full_revelation),
        ("worked instance extraction", extraction_example_one),
        ("two-outcome closed forms", simple_closed_forms),
        ("binary reduction suite", binary_reduction_suite),
        ("wage program vs hull geometry", wage_geometry_suite),
        ("extraction certificate suite", extraction_suite),
        ("almost-perfect technology", almost_perfect),
        ("continuous power-family solve", example_two),
        ("continuous vs discretized", discrete_oracle),
        ("threshold optimality pattern", structure_check),
    ];
    let mut failed = Vec::new();
    for (k, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        println!(
            "criterion {:>2} {}: {name}: {}",
            k + 1,
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
        if !v.pass {
            failed.push(k + 1);
        }
    }
    if failed.is_empty() {
        println!("all criteria pass");
    } else {
        println!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
