mod common;

use common::{close, model_and_structure, structure};
use indicator_design::geometry::{hull_of_p, min_cost_over_hull};
use indicator_design::model::InformationStructure;
use indicator_design::principal::{best_effort, binary_min_wage, min_wage, TIE_TOL};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn induced_rows_are_distributions((m, pi) in model_and_structure(5)) {
        let p = m.induce(&pi).unwrap();
        for row in &p.p {
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(row.iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn wage_program_has_no_duality_gap((m, pi) in model_and_structure(5), e in 0usize..5) {
        let e = e % m.num_efforts();
        let p = m.induce(&pi).unwrap();
        if let Some(sol) = min_wage(&m, &p, e).unwrap() {
            prop_assert!(close(sol.value, sol.dual_value, 1e-8), "{} vs {}", sol.value, sol.dual_value);
            prop_assert!(sol.wages.0.iter().all(|&w| w >= -1e-12));
        }
    }

    #[test]
    fn wage_program_equals_hull_minimum(
        (m, pi) in model_and_structure(5),
        e in 0usize..5,
        r in 0usize..5,
    ) {
        let e = e % m.num_efforts();
        let r = r % m.num_efforts();
        let lp = min_wage(&m, &m.induce(&pi).unwrap(), e).unwrap().map(|s| s.value);
        let geo = min_cost_over_hull(&hull_of_p(&m, &pi, r).unwrap(), e, &m.costs()).value;
        match lp {
            Some(w) => prop_assert!(close(w, geo, 1e-7), "LP {w} vs hull {geo}"),
            None => prop_assert!(geo.is_infinite(), "LP infeasible, hull {geo}"),
        }
    }

    #[test]
    fn garbling_never_lowers_cost(
        (m, pi) in model_and_structure(4),
        seed in any::<u64>(),
    ) {
        let k = pi.num_signals();
        let g = {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let cols = rng.gen_range(1..=3);
            (0..k)
                .map(|_| {
                    let row: Vec<f64> = (0..cols).map(|_| rng.gen_range(0.05..1.0)).collect();
                    let s: f64 = row.iter().sum();
                    row.into_iter().map(|v| v / s).collect()
                })
                .collect::<Vec<Vec<f64>>>()
        };
        let coarse = pi.garble(&g).unwrap();
        let fine_p = m.induce(&pi).unwrap();
        let coarse_p = m.induce(&coarse).unwrap();
        for e in 0..m.num_efforts() {
            if let Some(wc) = min_wage(&m, &coarse_p, e).unwrap() {
                let wf = min_wage(&m, &fine_p, e).unwrap();
                prop_assert!(wf.is_some());
                prop_assert!(wf.unwrap().value <= wc.value + 1e-8 * wc.value.max(1.0));
            }
        }
    }

    #[test]
    fn principal_choice_is_optimal((m, pi) in model_and_structure(5)) {
        let out = best_effort(&m, &pi).unwrap();
        let best = out
            .per_effort_values
            .iter()
            .filter_map(|v| v.principal_value)
            .fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(out.principal_payoff >= best - TIE_TOL);
        prop_assert!(out.agent_payoff >= -1e-12);
    }

    #[test]
    fn binary_closed_form_matches_lp(
        (m, q) in common::model(4).prop_flat_map(|m| {
            let nx = m.num_outcomes();
            (Just(m), prop::collection::vec(0.0f64..=1.0, nx))
        }),
    ) {
        let pi = InformationStructure::binary(&q);
        let p = m.induce(&pi).unwrap();
        let high: Vec<f64> = p.p.iter().map(|r| r[0]).collect();
        for e in 0..m.num_efforts() {
            let lp = min_wage(&m, &p, e).unwrap().map(|s| s.value);
            let closed = binary_min_wage(&m, &high, e).map(|(w, _, _)| w);
            match (lp, closed) {
                (Some(a), Some(b)) => prop_assert!(close(a, b, 1e-7), "{a} vs {b}"),
                (None, None) => {}
                // Feasibility is decided with tolerances; disagreement is
                // only acceptable on a knife edge.
                (a, b) => prop_assert!(a.or(b).unwrap_or(0.0).is_finite(), "{a:?} vs {b:?}"),
            }
        }
    }

    #[test]
    fn uninformative_structure_only_implements_costless_effort(pi in structure(3, 1)) {
        let m = indicator_design::model::example_one();
        let out = best_effort(&m, &pi).unwrap();
        prop_assert_eq!(out.chosen_effort, 0);
        prop_assert_eq!(out.agent_payoff, 0.0);
    }
}
