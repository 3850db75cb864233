mod common;

use common::{model, model_and_structure};
use indicator_design::design::{full_extraction, reduce_to_binary, ExtractionReport};
use indicator_design::geometry::{hull_of_f, hull_of_p};
use indicator_design::principal::{best_effort, min_wage};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn binary_reduction_preserves_cost_and_choice((m, pi) in model_and_structure(5)) {
        let before = best_effort(&m, &pi).unwrap();
        let e = before.chosen_effort;
        let binary = reduce_to_binary(&m, &pi, e).unwrap();
        prop_assert!(binary.num_signals() <= 2);
        let after = best_effort(&m, &binary).unwrap();
        prop_assert_eq!(after.chosen_effort, e);
        let w = min_wage(&m, &m.induce(&binary).unwrap(), e).unwrap().unwrap().value;
        prop_assert!((w - before.expected_wage).abs() <= 1e-7);
    }

    #[test]
    fn extraction_certificates_pay_off(m in model(3)) {
        let report = full_extraction(&m).unwrap();
        match report {
            ExtractionReport::Extractable(cert) => {
                let e = cert.e_star;
                let base = m.expected_output(0);
                prop_assert_eq!(cert.outcome.chosen_effort, e);
                prop_assert!((cert.principal_payoff - base).abs() <= 1e-7);
                let surplus = m.expected_output(e) - m.cost(e) - base;
                prop_assert!((cert.agent_payoff - surplus).abs() <= 1e-7);
                // Every signal's likelihood vector lies on the line through l*.
                if e > 0 {
                    let norm: f64 = cert.l_star.iter().map(|v| v * v).sum::<f64>().sqrt();
                    for z in hull_of_p(&m, &cert.structure, e).unwrap().generators {
                        let t: f64 = z.iter().zip(&cert.l_star).map(|(a, b)| a * b).sum::<f64>() / (norm * norm);
                        for (a, b) in z.iter().zip(&cert.l_star) {
                            prop_assert!((a - t * b).abs() < 1e-7, "{z:?} off the line");
                        }
                        prop_assert!(t <= 1.0 + 1e-7 && t >= -cert.alpha - 1e-7);
                    }
                }
            }
            ExtractionReport::NotExtractable { e_star, l_star, witness, .. } => {
                if let (Some(l), Some(h)) = (l_star, witness) {
                    prop_assert!(h.eval(&l) > 0.0);
                    for g in hull_of_f(&m, e_star).unwrap().generators {
                        prop_assert!(h.eval(&g) <= 1e-9);
                    }
                }
            }
        }
    }
}
