mod common;

use common::{model, model_and_structure};
use indicator_design::design::structure_from_hull;
use indicator_design::geometry::{hull_of_f, hull_of_p, in_hull};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn signal_hull_lies_in_outcome_hull((m, pi) in model_and_structure(5), r in 0usize..5) {
        let r = r % m.num_efforts();
        let outer = hull_of_f(&m, r).unwrap();
        let inner = hull_of_p(&m, &pi, r).unwrap();
        for z in &inner.generators {
            prop_assert!(in_hull(z, &outer).inside, "{z:?}");
        }
    }

    #[test]
    fn origin_is_in_every_signal_hull((m, pi) in model_and_structure(5), r in 0usize..5) {
        let r = r % m.num_efforts();
        let hull = hull_of_p(&m, &pi, r).unwrap();
        prop_assert!(in_hull(&vec![0.0; m.num_efforts()], &hull).inside);
    }

    #[test]
    fn likelihood_components_are_at_most_one((m, pi) in model_and_structure(5), r in 0usize..5) {
        let r = r % m.num_efforts();
        for z in hull_of_p(&m, &pi, r).unwrap().generators {
            prop_assert!(z.iter().all(|&v| v <= 1.0 + 1e-12));
            prop_assert_eq!(z[r], 0.0);
        }
    }

    #[test]
    fn separating_hyperplane_separates(
        m in model(4),
        r in 0usize..4,
        point in prop::collection::vec(-3.0f64..3.0, 4),
    ) {
        let r = r % m.num_efforts();
        let mut point = point[..m.num_efforts()].to_vec();
        point[r] = 0.0;
        let hull = hull_of_f(&m, r).unwrap();
        let mem = in_hull(&point, &hull);
        if let Some(h) = mem.separating {
            prop_assert!(h.eval(&point) > 0.0);
            for g in &hull.generators {
                prop_assert!(h.eval(g) <= 1e-9, "{}", h.eval(g));
            }
        } else {
            prop_assert!(mem.inside);
            let recon: Vec<f64> = (0..point.len())
                .map(|i| hull.generators.iter().zip(&mem.weights).map(|(g, w)| g[i] * w).sum())
                .collect();
            for (a, b) in recon.iter().zip(&point) {
                prop_assert!((a - b).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn synthesized_structure_realizes_its_points(
        m in model(4),
        r in 0usize..4,
        split in prop::collection::vec(0.1f64..0.9, 4),
    ) {
        // Split f(.|e*) into two positive parts; their normalized images
        // are points of co(f) whose hull contains the origin.
        let r = r % m.num_efforts();
        let hull = hull_of_f(&m, r).unwrap();
        let base = &m.f[r];
        let u: Vec<f64> = base.iter().zip(&split).map(|(b, s)| b * s).collect();
        let v: Vec<f64> = base.iter().zip(&u).map(|(b, a)| b - a).collect();
        let image = |w: &[f64]| -> Vec<f64> {
            let t: f64 = w.iter().sum();
            (0..m.num_efforts())
                .map(|i| hull.generators.iter().zip(w).map(|(g, x)| g[i] * x / t).sum())
                .collect()
        };
        let points = vec![image(&u), image(&v)];
        let pi = structure_from_hull(&m, r, &points).unwrap();
        let realized = hull_of_p(&m, &pi, r).unwrap().generators;
        prop_assert_eq!(realized.len(), 2);
        for (z, want) in realized.iter().zip(&points) {
            for (a, b) in z.iter().zip(want) {
                prop_assert!((a - b).abs() < 1e-7, "{z:?} vs {want:?}");
            }
        }
    }
}
