//! Parse an instance in the text format, solve it, and print the plan.
//!
//! ```text
//! cargo run --example solve_basic
//! ```

use tpsolve::{build_initial_plan, solve_to_optimality, InitRule, PivotStrategy, Problem};

const INSTANCE: &str = "\
3 4
20 30 25
10 25 15 25
8 6 10 9
9 12 13 7
14 9 16 5
";

fn main() -> tpsolve::Result<()> {
    let problem = Problem::parse(INSTANCE)?;
    let start = build_initial_plan(&problem, InitRule::Vogel)?;
    let solution = solve_to_optimality(&problem, start, PivotStrategy::ModifiedRowMostNegative)?;

    println!("optimal cost {}", solution.objective);
    println!("{} pivots", solution.stats.pivots);
    for e in solution.plan.entries().iter().filter(|e| e.flow > 0.0) {
        println!("  ship {:>4} along {}", e.flow, e.cell);
    }
    println!("u = {:?}", solution.duals.u);
    println!("v = {:?}", solution.duals.v);
    Ok(())
}
