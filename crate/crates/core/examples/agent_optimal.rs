//! The agent's choice of indicator when full extraction is out of reach.

use indicator_design::agent::{optimize, Budget};
use indicator_design::design::full_extraction;
use indicator_design::model::simple_instance;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let budget = Budget {
        restarts: 4,
        sweeps: 60,
        max_evals: 200_000,
    };
    for (p, c) in [(0.5, 0.2), (0.5, 0.3)] {
        let m = simple_instance(p, c)?;
        let sol = optimize(&m, budget, 11)?;
        println!(
            "p = {p}, c = {c}: extractable {}, agent value {:.6} ({}), q = {:?}",
            full_extraction(&m)?.is_extractable(),
            sol.agent_value,
            sol.diagnostics.status,
            sol.structure.high_probabilities()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
