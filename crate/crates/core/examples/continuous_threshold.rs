//! Continuous outcomes: the principal's best response to a threshold
//! indicator, the agent's optimal threshold, and a check of the pointwise
//! optimality conditions at the solution.

use indicator_design::continuous::{
    foc_sign_pattern, principal_response, signal_prob, solve_equilibrium, ContinuousModel,
    ThresholdStructure,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cm = ContinuousModel::example_two();
    let t = ThresholdStructure::single(0.45);
    let (p, dp) = signal_prob(&cm, &t, 0.2725)?;
    println!("P(H) = {p:.4}, dP/de = {dp:.4}");
    if let Some(r) = principal_response(&cm, &t) {
        println!("at x* = 0.45 the principal implements e = {:.4}, U_A = {:.4}", r.effort, r.agent_value);
    }

    let eq = solve_equilibrium(&cm)?;
    println!("{:?}, e = {:.4}", eq.structure, eq.effort);
    println!(
        "expected wage {:.4}, U_P = {:.4}, U_A = {:.4}, first best {:.4}",
        eq.expected_wage, eq.principal_payoff, eq.agent_payoff, eq.first_best.effort
    );

    let foc = foc_sign_pattern(&cm, &eq.structure, eq.effort, None)?;
    println!(
        "dL/dpi: {} sign changes at {:?}, pattern holds: {}",
        foc.sign_changes, foc.change_points, foc.pattern_holds
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
