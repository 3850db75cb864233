//! Building an indicator from prescribed likelihood points, and collapsing
//! any indicator to two signals.

use indicator_design::design::{reduce_to_binary, structure_from_hull};
use indicator_design::geometry::hull_of_p;
use indicator_design::model::{example_one, example_one_four_signal};
use indicator_design::principal::best_effort;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let m = example_one();
    let points = vec![vec![0.4, 0.2, 0.0], vec![-0.8, -0.4, 0.0]];
    let pi = structure_from_hull(&m, 2, &points)?;
    println!("pi = {:?}", pi.pi);
    for g in hull_of_p(&m, &pi, 2)?.generators {
        println!("  signal likelihood {:?}", g);
    }

    let four = example_one_four_signal();
    let before = best_effort(&m, &four)?;
    let binary = reduce_to_binary(&m, &four, before.chosen_effort)?;
    let after = best_effort(&m, &binary)?;
    println!(
        "four signals: {} at W = {:.6}; binary: {} at W = {:.6}",
        before.chosen_label, before.expected_wage, after.chosen_label, after.expected_wage
    );
    println!("binary q = {:?}", binary.high_probabilities());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
