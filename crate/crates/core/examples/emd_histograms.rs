//! Earth mover's distance between two grayscale-style histograms and
//! between two weighted point clouds.
//!
//! The transportation optimum is the total work; dividing by the total mass
//! gives the usual normalized distance.
//!
//! ```text
//! cargo run --example emd_histograms
//! ```

use tpsolve::{solve_shortlist, Problem};

/// EMD between two weighted point sets with Euclidean ground distance.
/// Both sides must carry the same total weight.
fn emd(from: &[((f64, f64), f64)], to: &[((f64, f64), f64)]) -> tpsolve::Result<f64> {
    let cost = from
        .iter()
        .flat_map(|&((x, y), _)| to.iter().map(move |&((u, v), _)| (x - u).hypot(y - v)))
        .collect();
    let problem = Problem::new(
        from.iter().map(|p| p.1).collect(),
        to.iter().map(|p| p.1).collect(),
        cost,
    )?;
    let sol = solve_shortlist(&problem, None)?;
    Ok(sol.objective / problem.total_supply())
}

fn main() -> tpsolve::Result<()> {
    // 1-D histograms over 16 intensity bins; empty bins are dropped because
    // every origin and destination needs positive mass.
    let a = [0, 2, 5, 9, 12, 9, 5, 2, 0, 0, 0, 1, 3, 1, 0, 0];
    let b = [0, 0, 0, 1, 2, 5, 9, 12, 9, 5, 2, 0, 3, 1, 0, 0];
    let bins = |h: &[u32]| -> Vec<((f64, f64), f64)> {
        h.iter()
            .enumerate()
            .filter(|(_, &w)| w > 0)
            .map(|(i, &w)| ((i as f64, 0.0), f64::from(w)))
            .collect()
    };
    println!("histogram EMD (bins): {:.4}", emd(&bins(&a), &bins(&b))?);

    let cloud_a = [((0.0, 0.0), 3.0), ((1.0, 0.0), 2.0), ((0.0, 2.0), 5.0)];
    let cloud_b = [((4.0, 0.0), 4.0), ((4.0, 3.0), 6.0)];
    println!("point cloud EMD: {:.4}", emd(&cloud_a, &cloud_b)?);
    Ok(())
}
