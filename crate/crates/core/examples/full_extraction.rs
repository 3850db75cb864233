//! Full surplus extraction: when `l*` lies in the outcome hull the agent can
//! design a binary indicator under which the principal implements the
//! first-best effort and keeps only her outside option.

use indicator_design::design::{full_extraction, ExtractionReport};
use indicator_design::model::{example_one, simple_instance, InformationStructure};
use indicator_design::principal::best_effort;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let m = example_one();
    match full_extraction(&m)? {
        ExtractionReport::Extractable(cert) => {
            println!("e* = {}, l* = {:?}", cert.e_star_label, cert.l_star);
            println!("alpha = {:.4} (max {:?})", cert.alpha, cert.alpha_max);
            println!("pi = {:?}", cert.structure.pi);
            println!("U_P = {:.4}, U_A = {:.4}", cert.principal_payoff, cert.agent_payoff);
        }
        ExtractionReport::NotExtractable { reason, .. } => println!("not extractable: {reason}"),
    }

    // A different structure with the same payoffs; optima are not unique.
    let q = [27.0 / 83.0, 15.0 / 83.0, 41.0 / 83.0];
    let out = best_effort(&m, &InformationStructure::binary(&q))?;
    println!("hand-made indicator: {} with U_P = {:.4}", out.chosen_label, out.principal_payoff);

    // Two outcomes: extraction holds iff c <= (1 - p)^2.
    for (p, c) in [(0.5, 0.2), (0.5, 0.3)] {
        let r = full_extraction(&simple_instance(p, c)?)?;
        println!("p = {p}, c = {c}: extractable {}", r.is_extractable());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
