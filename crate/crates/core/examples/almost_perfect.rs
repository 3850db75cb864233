//! Almost-perfect monitoring: extraction survives small noise and breaks
//! down as the technology becomes uninformative.

use indicator_design::design::{almost_perfect_probe, threshold_epsilon};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let values = [0.0, 0.5, 1.0];
    let costs = [0.0, 0.1, 0.3];
    for eps in [1e-3, 0.1, 0.2, 0.4] {
        println!("eps = {eps}: extractable {}", almost_perfect_probe(&values, &costs, eps)?);
    }
    let b = threshold_epsilon(&values, &costs, 1e-4)?;
    println!("threshold in [{:.5}, {:.5}]", b.lo, b.hi);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
