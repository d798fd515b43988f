//! Run the shortlist method and show what each of its four phases did.
//!
//! ```text
//! cargo run --release --example shortlist_phases -- 400 [s k p]
//! ```

use tpsolve::bench::{generate_instance, InstanceSpec};
use tpsolve::{default_params, solve_shortlist, ShortlistParams};

fn main() -> tpsolve::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n = args.first().and_then(|s| s.parse().ok()).unwrap_or(300);
    let mut params = default_params(n);
    if let [_, s, k, p] = args.as_slice() {
        params = ShortlistParams {
            s: s.parse().expect("s"),
            k: k.parse().expect("k"),
            p: p.parse().expect("p"),
        };
    }
    let problem = generate_instance(InstanceSpec { n, seed: 99 })?.problem;
    let sol = solve_shortlist(&problem, Some(params))?;

    println!(
        "n = {n}, s = {}, k = {}, p = {}",
        params.s, params.k, params.p
    );
    let names = [
        "shortlists",
        "initial plan",
        "shortlist pivots",
        "full-row pivots",
    ];
    for (name, phase) in names.iter().zip(&sol.stats.phases) {
        println!(
            "{name:<17} {:>9.2} ms  pivots {:>6}  cells {:>9}  cost {:.3}",
            phase.elapsed.as_secs_f64() * 1e3,
            phase.pivots,
            phase.cells_scanned,
            phase.objective
        );
    }
    println!("optimal cost {:.6}", sol.objective);
    Ok(())
}
