//! Likelihood vectors, hull membership with a separating hyperplane, and
//! the geometric form of the wage program.

use indicator_design::geometry::{hull_of_f, in_hull, min_cost_over_hull, origin_interiority};
use indicator_design::model::{example_one, InformationStructure};
use indicator_design::principal::min_wage;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let m = example_one();
    let hull = hull_of_f(&m, 2)?;
    for (label, g) in hull.labels.iter().zip(&hull.generators) {
        println!("{label}: l = ({:.4}, {:.4})", g[0], g[1]);
    }
    let report = origin_interiority(&m, 2)?;
    println!("dim T = {}, origin interior: {}", report.dim_t, report.interior);

    for point in [[0.3, 0.2, 0.0], [1.0, 1.0, 0.0]] {
        let mem = in_hull(&point, &hull);
        match mem.separating {
            None => println!("{point:?} inside, weights {:?}", mem.weights),
            Some(h) => println!("{point:?} outside, separated by {:?} . l <= {:.4}", h.normal, h.offset),
        }
    }

    let p = m.induce(&InformationStructure::full_revelation(3))?;
    for e in 0..3 {
        let lp = min_wage(&m, &p, e)?.map(|s| s.value);
        let geo = min_cost_over_hull(&hull, e, &m.costs());
        println!("{}: wage LP {lp:?}, hull minimum {:.6}", m.efforts[e].label, geo.value);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
