//! Time several methods on paired random instances, write the CSV to
//! stdout, and fit runtime = c * n^q per method on stderr.
//!
//! ```text
//! cargo run --release --example benchmark_sweep > sweep.csv
//! ```

use tpsolve::bench::{fit_power_law, run_benchmark, write_csv, BenchConfig, Method};
use tpsolve::{InitRule, PivotStrategy};

fn main() -> tpsolve::Result<()> {
    let config = BenchConfig {
        sizes: vec![100, 200, 400],
        reps: 3,
        methods: vec![
            Method::Shortlist,
            Method::Init(InitRule::ModifiedRowMinimum),
            Method::Init(InitRule::Vogel),
        ],
        pivots: vec![PivotStrategy::ModifiedRowMostNegative],
        base_seed: 42,
        warmup: true,
        workers: 1,
        shortlist_params: None,
    };
    let records = run_benchmark(&config)?;
    write_csv(&records, std::io::stdout().lock())?;

    for method in &config.methods {
        let rows = records.iter().filter(|r| r.method == method.name());
        let fit = fit_power_law(rows)?;
        eprintln!(
            "{:<10} c = {:.4e} ms, q = {:.3} (log rss {:.2e})",
            method.name(),
            fit.factor,
            fit.exponent,
            fit.rss
        );
    }
    Ok(())
}
