//! Bridging the two models: a continuous technology cut into cells becomes
//! a finite instance for the discrete machinery.

use indicator_design::continuous::ContinuousModel;
use indicator_design::design::{first_best_effort, full_extraction};
use indicator_design::oracle::discretize_continuous;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cm = ContinuousModel::example_two();
    let m = discretize_continuous(&cm, 10, 6)?;
    let e = first_best_effort(&m);
    println!("{} outcomes, {} efforts, first best {}", m.num_outcomes(), m.num_efforts(), m.efforts[e].label);
    for (eff, row) in m.efforts.iter().zip(&m.f) {
        let shown: Vec<String> = row.iter().map(|v| format!("{v:.3}")).collect();
        println!("  {} (c = {:.3}): {}", eff.label, eff.c, shown.join(" "));
    }
    println!("extractable: {}", full_extraction(&m)?.is_extractable());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
