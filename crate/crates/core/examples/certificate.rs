//! Check plans independently of the solver: an optimality certificate from
//! recomputed duals, and exhaustive enumeration for a tiny instance.
//!
//! ```text
//! cargo run --example certificate
//! ```

use tpsolve::bench::{generate_instance, InstanceSpec};
use tpsolve::verify::spanning_tree_count;
use tpsolve::{
    brute_force_optimum, build_initial_plan, check_certificate, solve_shortlist, InitRule, Problem,
};

fn main() -> tpsolve::Result<()> {
    let problem = generate_instance(InstanceSpec { n: 60, seed: 3 })?.problem;

    let start = build_initial_plan(&problem, InitRule::NorthwestCorner)?;
    let cert = check_certificate(&problem, &start)?;
    println!(
        "northwest plan: min relative cost {:.3} at {}, optimal: {}",
        cert.min_relative_cost,
        cert.worst_cell.map_or("-".into(), |c| c.to_string()),
        cert.is_optimal(&problem)
    );

    let sol = solve_shortlist(&problem, None)?;
    let cert = check_certificate(&problem, &sol.plan)?;
    println!(
        "shortlist plan: min relative cost {:.3e}, residual {:.1e}, primal {:.6} dual {:.6}, optimal: {}",
        cert.min_relative_cost,
        cert.feasibility_residual,
        sol.objective,
        cert.dual_objective,
        cert.is_optimal(&problem)
    );

    let tiny = Problem::from_rows(
        vec![4.0, 6.0, 5.0],
        vec![7.0, 3.0, 5.0],
        &[
            vec![2.0, 9.0, 4.0],
            vec![6.0, 1.0, 8.0],
            vec![3.0, 5.0, 7.0],
        ],
    )?;
    println!(
        "3x3 by enumeration of {} spanning trees: {}",
        spanning_tree_count(3, 3),
        brute_force_optimum(&tiny)?
    );
    println!(
        "3x3 by shortlist method: {}",
        solve_shortlist(&tiny, None)?.objective
    );
    Ok(())
}
