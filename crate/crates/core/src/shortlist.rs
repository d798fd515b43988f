//! The shortlist method.
//!
//! 1. For every origin keep the `s` cheapest destinations, sorted by cost.
//! 2. Build an initial plan from those shortlists.
//! 3. Improve the plan by pricing only shortlist cells, in batches of
//!    consecutive shortlists. A batch ends once `k` candidates are found or
//!    `ceil(p * m)` shortlists are searched; the most negative candidate of
//!    the batch enters the basis.
//! 4. Finish with the ordinary simplex over complete rows
//!    ([`PivotStrategy::ModifiedRowMostNegative`] by default).

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::init::repair_degeneracy;
use crate::problem::{Cell, Problem, TransportPlan};
use crate::simplex::{
    default_pivot_limit, Candidate, DualPrices, PivotSelector, PivotStrategy, SimplexState,
    SolveStats,
};

/// Shortlist length `s`, candidate stop `k`, and batch fraction `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShortlistParams {
    pub s: usize,
    pub k: usize,
    pub p: f64,
}

impl ShortlistParams {
    pub fn validate(&self) -> Result<()> {
        if self.s == 0 {
            return Err(Error::InvalidParams(
                "shortlist length s must be >= 1".into(),
            ));
        }
        if self.k == 0 {
            return Err(Error::InvalidParams(
                "candidate count k must be >= 1".into(),
            ));
        }
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(Error::InvalidParams(format!(
                "batch fraction p must lie in (0, 1], got {}",
                self.p
            )));
        }
        Ok(())
    }

    /// Shortlists searched per batch: `ceil(p * m)`, at least one.
    pub fn batch_size(&self, rows: usize) -> usize {
        ((self.p * rows as f64).ceil() as usize).clamp(1, rows.max(1))
    }
}

/// Rule-of-thumb parameters for `n` destinations: `s = 15` up to `n = 200`,
/// then 15 more per doubling; `k = s`; `p = 5%`.
pub fn default_params(n: usize) -> ShortlistParams {
    let s = if n <= 200 {
        15
    } else {
        15 + (15.0 * (n as f64 / 200.0).log2()).floor() as usize
    };
    ShortlistParams { s, k: s, p: 0.05 }
}

/// Per-origin lists of the cheapest destinations, plus the batch cursor used
/// while improving on them.
#[derive(Debug, Clone, PartialEq)]
pub struct Shortlists {
    lists: Vec<Vec<(usize, f64)>>,
    /// First shortlist not considered by the previous batch.
    pub batch_cursor: usize,
}

impl Shortlists {
    /// `(destination, cost)` pairs of origin `row`, ascending by `(cost, destination)`.
    pub fn list(&self, row: usize) -> &[(usize, f64)] {
        &self.lists[row]
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }
}

/// Keeps the `min(s, n)` cheapest destinations of every origin.
pub fn build_shortlists(problem: &Problem, s: usize) -> Shortlists {
    let s = s.min(problem.cols());
    let by_cost = |a: &(usize, f64), b: &(usize, f64)| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0));
    let mut row: Vec<(usize, f64)> = Vec::with_capacity(problem.cols());
    let lists = (0..problem.rows())
        .map(|i| {
            row.clear();
            row.extend(problem.cost_row(i).iter().copied().enumerate());
            if s < row.len() && s > 0 {
                row.select_nth_unstable_by(s - 1, by_cost);
            }
            let mut list = row[..s].to_vec();
            list.sort_unstable_by(by_cost);
            list
        })
        .collect();
    Shortlists {
        lists,
        batch_cursor: 0,
    }
}

/// Initial plan from the shortlists: each origin in turn ships to its
/// cheapest shortlisted destinations with remaining demand, falling back to
/// the cheapest remaining destination of the full row once its shortlist is
/// used up. The result is repaired to a spanning tree.
pub fn shortlist_initial_plan(problem: &Problem, shortlists: &Shortlists) -> Result<TransportPlan> {
    let (m, n) = (problem.rows(), problem.cols());
    let snap = problem.mass_tolerance();
    let mut supply = problem.supply().to_vec();
    let mut demand = problem.demand().to_vec();
    let mut open_cols = n;
    let mut plan = TransportPlan::new(m, n);

    let mut ship = |i: usize, j: usize, supply: &mut [f64], demand: &mut [f64]| -> bool {
        let amount = supply[i].min(demand[j]);
        plan.push(Cell::new(i, j), amount);
        supply[i] -= amount;
        demand[j] -= amount;
        if supply[i] <= snap {
            supply[i] = 0.0;
        }
        if demand[j] <= snap {
            demand[j] = 0.0;
            true
        } else {
            false
        }
    };

    for i in 0..m {
        if open_cols == 0 {
            break;
        }
        for &(j, _) in shortlists.list(i) {
            if supply[i] <= 0.0 {
                break;
            }
            if demand[j] > 0.0 && ship(i, j, &mut supply, &mut demand) {
                open_cols -= 1;
            }
        }
        while supply[i] > 0.0 && open_cols > 0 {
            let row = problem.cost_row(i);
            let j = (0..n)
                .filter(|&j| demand[j] > 0.0)
                .min_by(|&a, &b| row[a].total_cmp(&row[b]).then(a.cmp(&b)))
                .expect("an open destination exists");
            if ship(i, j, &mut supply, &mut demand) {
                open_cols -= 1;
            }
        }
    }
    repair_degeneracy(plan, problem)
}

/// Phase three: pivots on shortlist cells until a full pass over all
/// shortlists under unchanged duals finds no candidate.
pub fn shortlist_phase3(
    state: &mut SimplexState<'_>,
    shortlists: &mut Shortlists,
    params: &ShortlistParams,
    pivot_limit: usize,
) -> Result<()> {
    params.validate()?;
    let m = state.problem().rows();
    let batch = params.batch_size(m);
    let threshold = -state.eps();
    let mut cursor = shortlists.batch_cursor % m;
    // Consecutive candidate-free shortlists since the last pivot.
    let mut quiet = 0;
    let mut pivots = 0;
    loop {
        let mut best: Option<Candidate> = None;
        let mut found = 0;
        let mut scanned = 0;
        let mut searched = 0;
        while searched < batch && found < params.k && quiet < m {
            let i = cursor;
            let DualPrices { u, v } = state.duals();
            let ui = u[i];
            let mut hit = false;
            for &(j, c) in shortlists.list(i) {
                scanned += 1;
                let r = c - ui - v[j];
                if r < threshold {
                    hit = true;
                    found += 1;
                    if best.is_none_or(|b| r < b.relative_cost) {
                        best = Some(Candidate {
                            cell: Cell::new(i, j),
                            relative_cost: r,
                        });
                    }
                    if found == params.k {
                        break;
                    }
                }
            }
            quiet = if hit { 0 } else { quiet + 1 };
            cursor = (cursor + 1) % m;
            searched += 1;
        }
        state.count_scanned(scanned);
        match best {
            Some(candidate) => {
                if pivots == pivot_limit {
                    return Err(Error::IterationLimit { limit: pivot_limit });
                }
                state.pivot(candidate)?;
                pivots += 1;
                quiet = 0;
            }
            None if quiet >= m => break,
            None => {}
        }
    }
    shortlists.batch_cursor = cursor;
    Ok(())
}

/// Timing and counters of one phase.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PhaseStats {
    pub elapsed: Duration,
    pub pivots: usize,
    pub cells_scanned: usize,
    /// Objective at the end of the phase (0 for phase one, which has no plan).
    pub objective: f64,
}

/// Per-phase statistics of a shortlist run, phases one to four.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ShortlistStats {
    pub phases: [PhaseStats; 4],
}

impl ShortlistStats {
    pub fn total(&self) -> SolveStats {
        SolveStats {
            pivots: self.phases.iter().map(|p| p.pivots).sum(),
            degenerate_pivots: 0,
            cells_scanned: self.phases.iter().map(|p| p.cells_scanned).sum(),
        }
    }

    pub fn elapsed(&self) -> Duration {
        self.phases.iter().map(|p| p.elapsed).sum()
    }

    /// Time to the initial plan (phases one and two).
    pub fn init_elapsed(&self) -> Duration {
        self.phases[0].elapsed + self.phases[1].elapsed
    }
}

#[derive(Debug, Clone)]
pub struct ShortlistSolution {
    pub plan: TransportPlan,
    pub duals: DualPrices,
    pub objective: f64,
    pub stats: ShortlistStats,
    pub degenerate_pivots: usize,
}

/// Runs all four phases; `params` default to [`default_params`] of the
/// number of destinations.
pub fn solve_shortlist(
    problem: &Problem,
    params: Option<ShortlistParams>,
) -> Result<ShortlistSolution> {
    solve_shortlist_with(
        problem,
        params.unwrap_or_else(|| default_params(problem.cols())),
        PivotStrategy::ModifiedRowMostNegative,
    )
}

/// As [`solve_shortlist`], with an explicit pivot strategy for phase four.
pub fn solve_shortlist_with(
    problem: &Problem,
    params: ShortlistParams,
    final_strategy: PivotStrategy,
) -> Result<ShortlistSolution> {
    params.validate()?;
    let limit = default_pivot_limit(problem);
    let mut stats = ShortlistStats::default();

    let t = Instant::now();
    let mut lists = build_shortlists(problem, params.s);
    stats.phases[0] = PhaseStats {
        elapsed: t.elapsed(),
        ..Default::default()
    };

    let t = Instant::now();
    let plan = shortlist_initial_plan(problem, &lists)?;
    let mut state = SimplexState::new(problem, plan)?;
    stats.phases[1] = PhaseStats {
        elapsed: t.elapsed(),
        objective: state.objective(),
        ..Default::default()
    };

    let t = Instant::now();
    shortlist_phase3(&mut state, &mut lists, &params, limit)?;
    let after3 = state.stats;
    stats.phases[2] = PhaseStats {
        elapsed: t.elapsed(),
        pivots: after3.pivots,
        cells_scanned: after3.cells_scanned,
        objective: state.objective(),
    };

    let t = Instant::now();
    state.optimize(&mut PivotSelector::new(final_strategy), limit)?;
    let total = state.stats;
    let objective = state.objective();
    stats.phases[3] = PhaseStats {
        elapsed: t.elapsed(),
        pivots: total.pivots - after3.pivots,
        cells_scanned: total.cells_scanned - after3.cells_scanned,
        objective,
    };

    Ok(ShortlistSolution {
        duals: state.duals().clone(),
        degenerate_pivots: total.degenerate_pivots,
        plan: state.into_plan(),
        objective,
        stats,
    })
}
