//! The principal's problem for a fixed indicator: cheapest wages for every
//! effort, then the most profitable effort.

use indicator_design::model::{example_one, example_one_four_signal, InformationStructure};
use indicator_design::principal::best_effort;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let m = example_one();
    for (name, pi) in [
        ("full revelation", InformationStructure::full_revelation(3)),
        ("four signals", example_one_four_signal()),
        ("no information", InformationStructure::uninformative(3)),
    ] {
        let out = best_effort(&m, &pi)?;
        println!("{name}: principal picks {}", out.chosen_label);
        for v in &out.per_effort_values {
            match v.expected_wage {
                Some(w) => println!("  {}: W = {w:.4}, U_P = {:.4}", v.label, m.expected_output(v.effort) - w),
                None => println!("  {}: not implementable", v.label),
            }
        }
        println!("  U_P = {:.4}, U_A = {:.4}", out.principal_payoff, out.agent_payoff);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
