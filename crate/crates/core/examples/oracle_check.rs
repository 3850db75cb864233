//! Brute-force verification: grid search over binary indicators and a
//! check of a claimed solution, honest and tampered.

use indicator_design::design::full_extraction;
use indicator_design::model::example_one;
use indicator_design::oracle::{grid_search_binary, verify_solution, Claim};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let m = example_one();
    let grid = grid_search_binary(&m, 0.1)?;
    println!(
        "grid best {:.4} at q = {:?} over {} points (slack {:.3})",
        grid.best_value, grid.best_q, grid.evaluations, grid.resolution_bound
    );

    let report = full_extraction(&m)?;
    let cert = report.certificate().ok_or("the worked instance is extractable")?;
    let claim = Claim::from(cert);
    println!("certificate: {:?}", verify_solution(&m, &claim, 0.1)?.verdict);

    let mut tampered = claim.clone();
    tampered.wages.iter_mut().for_each(|w| *w *= 0.9);
    println!("tampered: {:?}", verify_solution(&m, &tampered, 0.1)?.verdict);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
