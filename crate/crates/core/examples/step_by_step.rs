//! Drive the simplex by hand: select an entering cell, inspect its cycle of
//! changes, pivot, repeat.
//!
//! ```text
//! cargo run --example step_by_step
//! ```

use tpsolve::simplex::{find_cycle, PivotSelector, SimplexState};
use tpsolve::{build_initial_plan, InitRule, PivotStrategy, Problem};

fn main() -> tpsolve::Result<()> {
    let problem = Problem::from_rows(
        vec![15.0, 25.0, 10.0],
        vec![5.0, 15.0, 15.0, 15.0],
        &[
            vec![10.0, 2.0, 20.0, 11.0],
            vec![12.0, 7.0, 9.0, 20.0],
            vec![4.0, 14.0, 16.0, 18.0],
        ],
    )?;
    let start = build_initial_plan(&problem, InitRule::NorthwestCorner)?;
    let mut state = SimplexState::new(&problem, start)?;
    let mut selector = PivotSelector::new(PivotStrategy::MatrixMostNegative);

    println!("start: cost {}", state.objective());
    while let Some(candidate) = state.select(&mut selector) {
        let cycle = find_cycle(state.plan(), candidate.cell)?;
        let path: Vec<String> = cycle
            .cells
            .iter()
            .enumerate()
            .map(|(k, c)| format!("{c}{}", if k % 2 == 0 { '+' } else { '-' }))
            .collect();
        let out = state.pivot(candidate)?;
        println!(
            "enter {} (r = {}), cycle {}, theta {}, leave {}, cost {}",
            out.entering,
            candidate.relative_cost,
            path.join(" "),
            out.theta,
            out.leaving,
            state.objective()
        );
    }
    println!("optimal after {} pivots", state.stats.pivots);
    Ok(())
}
