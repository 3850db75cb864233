//! The bundled simplex solver: optimal solves with duals, and Farkas
//! certificates for infeasible programs.

use indicator_design::lp::{Cmp, LinearProgram, LpError};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut lp = LinearProgram::minimize(vec![1.0, 2.0]);
    lp.add(vec![1.0, 1.0], Cmp::Ge, 1.0).add(vec![1.0, -1.0], Cmp::Le, 0.5);
    let sol = lp.solve()?;
    println!("x = {:?}, objective {}, duals {:?}", sol.x, sol.objective, sol.duals);

    let mut bad = LinearProgram::minimize(vec![1.0]);
    bad.add(vec![1.0], Cmp::Ge, 2.0).add(vec![1.0], Cmp::Le, 1.0);
    match bad.solve() {
        Err(LpError::Infeasible { residual, farkas }) => {
            println!("infeasible, residual {residual}, certificate {farkas:?}")
        }
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
