//! Compare the thirteen initialization rules on one random instance: cost of
//! the starting plan, and the pivots the simplex then needs.
//!
//! ```text
//! cargo run --release --example init_rules -- 200
//! ```

use std::time::Instant;

use tpsolve::bench::{generate_instance, InstanceSpec};
use tpsolve::{build_initial_plan, objective, solve_to_optimality, InitRule, PivotStrategy};

fn main() -> tpsolve::Result<()> {
    let n = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(150);
    let problem = generate_instance(InstanceSpec { n, seed: 2024 })?.problem;

    println!(
        "{:<12} {:>14} {:>9} {:>8} {:>10}",
        "rule", "initial cost", "init ms", "pivots", "total ms"
    );
    for rule in InitRule::ALL {
        let t = Instant::now();
        let start = build_initial_plan(&problem, rule)?;
        let init_ms = t.elapsed().as_secs_f64() * 1e3;
        let initial = objective(&problem, &start)?;
        let sol = solve_to_optimality(&problem, start, PivotStrategy::ModifiedRowMostNegative)?;
        let total_ms = t.elapsed().as_secs_f64() * 1e3;
        println!(
            "{:<12} {:>14.1} {:>9.2} {:>8} {:>10.2}",
            rule.name(),
            initial,
            init_ms,
            sol.stats.pivots,
            total_ms
        );
    }
    Ok(())
}
