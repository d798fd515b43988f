//! The two runtime drivers, pivots and priced cells, under each pivot
//! strategy.
//!
//! ```text
//! cargo run --release --example pivot_strategies
//! ```

use tpsolve::bench::{generate_instance, InstanceSpec};
use tpsolve::{build_initial_plan, solve_to_optimality, InitRule, PivotStrategy};

fn main() -> tpsolve::Result<()> {
    let problem = generate_instance(InstanceSpec { n: 200, seed: 7 })?.problem;
    let start = build_initial_plan(&problem, InitRule::LeastCost)?;

    for strategy in PivotStrategy::ALL {
        let sol = solve_to_optimality(&problem, start.clone(), strategy)?;
        println!(
            "{:<7} pivots {:>6} (degenerate {:>5})  cells priced {:>10}  cost {:.6}",
            strategy.name(),
            sol.stats.pivots,
            sol.stats.degenerate_pivots,
            sol.stats.cells_scanned,
            sol.objective
        );
    }
    Ok(())
}
