//! Stage two of the transportation algorithm: improve a basic feasible plan
//! until no cell has a negative relative cost.
//!
//! The basis is a spanning tree of the bipartite origin/destination graph.
//! Dual prices come from a breadth-first traversal of that tree starting
//! with `u_0 = 0`; the cycle of changes for an entering cell is found by a
//! depth-first search that alternately scans rows and columns of the basis.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::problem::{Cell, Problem, TransportPlan};

/// Simplex multipliers: `u` per origin, `v` per destination, with
/// `u_i + v_j = c_ij` on every basis entry.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPrices {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl DualPrices {
    /// Dual objective `sum a_i u_i + sum b_j v_j`; equals the primal cost at an optimum.
    pub fn value(&self, problem: &Problem) -> f64 {
        let su: f64 = self
            .u
            .iter()
            .zip(problem.supply())
            .map(|(u, a)| u * a)
            .sum();
        let sv: f64 = self
            .v
            .iter()
            .zip(problem.demand())
            .map(|(v, b)| v * b)
            .sum();
        su + sv
    }
}

/// `c_ij - u_i - v_j`.
#[inline]
pub fn relative_cost(problem: &Problem, duals: &DualPrices, row: usize, col: usize) -> f64 {
    problem.cost(row, col) - duals.u[row] - duals.v[col]
}

/// Computes dual prices from a basis with `u_0 = 0`.
///
/// Fails with [`Error::Structural`] if the basis does not reach every origin
/// and destination.
pub fn compute_duals(problem: &Problem, basis: &TransportPlan) -> Result<DualPrices> {
    let mut duals = DualPrices {
        u: vec![0.0; problem.rows()],
        v: vec![0.0; problem.cols()],
    };
    let mut scratch = TreeScratch::new(problem.rows(), problem.cols());
    solve_duals(problem, basis, &mut duals, &mut scratch)?;
    Ok(duals)
}

/// Scratch buffers for tree traversals, reused across pivots.
#[derive(Debug, Clone)]
struct TreeScratch {
    stamp: Vec<u32>,
    epoch: u32,
    pred: Vec<usize>,
    queue: VecDeque<usize>,
    stack: Vec<usize>,
}

impl TreeScratch {
    fn new(m: usize, n: usize) -> Self {
        Self {
            stamp: vec![0; m + n],
            epoch: 0,
            pred: vec![usize::MAX; m + n],
            queue: VecDeque::with_capacity(m + n),
            stack: Vec::with_capacity(m + n),
        }
    }

    fn next_epoch(&mut self) -> u32 {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.fill(0);
            self.epoch = 1;
        }
        self.epoch
    }
}

fn solve_duals(
    problem: &Problem,
    basis: &TransportPlan,
    duals: &mut DualPrices,
    scratch: &mut TreeScratch,
) -> Result<()> {
    let m = problem.rows();
    let epoch = scratch.next_epoch();
    let TreeScratch { stamp, queue, .. } = scratch;
    queue.clear();
    duals.u[0] = 0.0;
    stamp[0] = epoch;
    queue.push_back(0);
    let mut reached = 1;
    while let Some(node) = queue.pop_front() {
        if node < m {
            let ui = duals.u[node];
            for &h in basis.row(node) {
                let col = basis.entry(h).cell.col;
                if stamp[m + col] != epoch {
                    stamp[m + col] = epoch;
                    duals.v[col] = problem.cost(node, col) - ui;
                    queue.push_back(m + col);
                    reached += 1;
                }
            }
        } else {
            let col = node - m;
            let vj = duals.v[col];
            for &h in basis.col(col) {
                let row = basis.entry(h).cell.row;
                if stamp[row] != epoch {
                    stamp[row] = epoch;
                    duals.u[row] = problem.cost(row, col) - vj;
                    queue.push_back(row);
                    reached += 1;
                }
            }
        }
    }
    if reached != m + problem.cols() {
        return Err(Error::Structural(format!(
            "basis reaches {reached} of {} origins and destinations",
            m + problem.cols()
        )));
    }
    Ok(())
}

/// Entering-cell selection rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PivotStrategy {
    /// Price every cell and take the most negative.
    MatrixMostNegative,
    /// Take the first negative cell of a row-major scan.
    FirstNegative,
    /// Price whole rows starting at a persistent cursor; take the most
    /// negative cell of the first row that has any candidate.
    ModifiedRowMostNegative,
}

impl PivotStrategy {
    pub const ALL: [PivotStrategy; 3] = [
        PivotStrategy::MatrixMostNegative,
        PivotStrategy::FirstNegative,
        PivotStrategy::ModifiedRowMostNegative,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PivotStrategy::MatrixMostNegative => "matrix",
            PivotStrategy::FirstNegative => "first",
            PivotStrategy::ModifiedRowMostNegative => "modrow",
        }
    }
}

impl fmt::Display for PivotStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PivotStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PivotStrategy::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown pivot strategy `{s}`")))
    }
}

/// A pivot strategy together with its row cursor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PivotSelector {
    pub strategy: PivotStrategy,
    /// Next row to price under [`PivotStrategy::ModifiedRowMostNegative`].
    pub cursor: usize,
}

impl PivotSelector {
    pub fn new(strategy: PivotStrategy) -> Self {
        Self {
            strategy,
            cursor: 0,
        }
    }
}

/// A non-basis cell with negative relative cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub cell: Cell,
    pub relative_cost: f64,
}

/// Result of one pricing pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection {
    pub entering: Option<Candidate>,
    /// Number of relative costs evaluated.
    pub scanned: usize,
}

/// Picks an entering cell with `r_ij < -eps`, or none at optimality.
///
/// Basis cells have `r_ij = 0` up to rounding and therefore never qualify,
/// so they are priced along with everything else.
pub fn select_pivot(
    problem: &Problem,
    duals: &DualPrices,
    selector: &mut PivotSelector,
) -> Selection {
    select_with_eps(problem, duals, selector, problem.cost_epsilon())
}

fn select_with_eps(
    problem: &Problem,
    duals: &DualPrices,
    selector: &mut PivotSelector,
    eps: f64,
) -> Selection {
    let (m, n) = (problem.rows(), problem.cols());
    let threshold = -eps;
    match selector.strategy {
        PivotStrategy::MatrixMostNegative => {
            let mut best: Option<Candidate> = None;
            let mut best_r = threshold;
            for i in 0..m {
                if let Some((j, r)) = row_argmin(problem.cost_row(i), duals.u[i], &duals.v) {
                    if r < best_r {
                        best_r = r;
                        best = Some(Candidate {
                            cell: Cell::new(i, j),
                            relative_cost: r,
                        });
                    }
                }
            }
            Selection {
                entering: best,
                scanned: m * n,
            }
        }
        PivotStrategy::FirstNegative => {
            let mut scanned = 0;
            for i in 0..m {
                let ui = duals.u[i];
                for (j, (&c, &vj)) in problem.cost_row(i).iter().zip(&duals.v).enumerate() {
                    scanned += 1;
                    let r = c - ui - vj;
                    if r < threshold {
                        return Selection {
                            entering: Some(Candidate {
                                cell: Cell::new(i, j),
                                relative_cost: r,
                            }),
                            scanned,
                        };
                    }
                }
            }
            Selection {
                entering: None,
                scanned,
            }
        }
        PivotStrategy::ModifiedRowMostNegative => {
            let mut scanned = 0;
            let start = selector.cursor % m;
            for d in 0..m {
                let i = (start + d) % m;
                scanned += n;
                if let Some((j, r)) = row_argmin(problem.cost_row(i), duals.u[i], &duals.v) {
                    if r < threshold {
                        selector.cursor = (i + 1) % m;
                        return Selection {
                            entering: Some(Candidate {
                                cell: Cell::new(i, j),
                                relative_cost: r,
                            }),
                            scanned,
                        };
                    }
                }
            }
            Selection {
                entering: None,
                scanned,
            }
        }
    }
}

/// Smallest relative cost of a row (first index on ties).
#[inline]
fn row_argmin(costs: &[f64], ui: f64, v: &[f64]) -> Option<(usize, f64)> {
    let mut best = (usize::MAX, f64::INFINITY);
    for (j, (&c, &vj)) in costs.iter().zip(v).enumerate() {
        let r = c - ui - vj;
        if r < best.1 {
            best = (j, r);
        }
    }
    (best.0 != usize::MAX).then_some(best)
}

/// The cycle of changes through an entering cell.
///
/// `cells[0]` is the entering cell; even positions gain `theta`, odd
/// positions lose it. Consecutive cells alternately share a row and a
/// column, starting with the entering cell's row.
#[derive(Debug, Clone, PartialEq)]
pub struct Cycle {
    pub cells: Vec<Cell>,
    /// Basis handles of `cells[1..]`.
    handles: Vec<usize>,
    /// Amount shifted around the cycle: the smallest flow at a losing position.
    pub theta: f64,
    /// Position in `cells` of the first losing cell whose flow equals `theta`.
    pub leaving: usize,
}

impl Cycle {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn entering(&self) -> Cell {
        self.cells[0]
    }

    /// Cells losing flow, in cycle order.
    pub fn losing(&self) -> impl Iterator<Item = Cell> + '_ {
        self.cells.iter().skip(1).step_by(2).copied()
    }

    /// Cells gaining flow, in cycle order (starting with the entering cell).
    pub fn gaining(&self) -> impl Iterator<Item = Cell> + '_ {
        self.cells.iter().step_by(2).copied()
    }
}

/// Finds the cycle of changes for `entering`, which must not be in the basis.
pub fn find_cycle(basis: &TransportPlan, entering: Cell) -> Result<Cycle> {
    let mut scratch = TreeScratch::new(basis.rows(), basis.cols());
    cycle_dfs(basis, entering, &mut scratch)
}

fn cycle_dfs(basis: &TransportPlan, entering: Cell, scratch: &mut TreeScratch) -> Result<Cycle> {
    let m = basis.rows();
    if basis.contains(entering) {
        return Err(Error::Internal(format!(
            "entering cell {entering} is already in the basis"
        )));
    }
    let start = entering.row;
    let target = m + entering.col;
    let epoch = scratch.next_epoch();
    let TreeScratch {
        stamp, pred, stack, ..
    } = scratch;
    stack.clear();
    stamp[start] = epoch;
    pred[start] = usize::MAX;
    stack.push(start);
    let mut found = false;
    'dfs: while let Some(node) = stack.pop() {
        let (list, row_side) = if node < m {
            (basis.row(node), true)
        } else {
            (basis.col(node - m), false)
        };
        for &h in list {
            let cell = basis.entry(h).cell;
            let next = if row_side { m + cell.col } else { cell.row };
            if stamp[next] == epoch {
                continue;
            }
            stamp[next] = epoch;
            pred[next] = h;
            if next == target {
                found = true;
                break 'dfs;
            }
            stack.push(next);
        }
    }
    if !found {
        return Err(Error::Structural(format!(
            "no cycle through {entering}: basis is not spanning"
        )));
    }

    // Walk back from the entering column to the entering row.
    let mut handles = Vec::new();
    let mut node = target;
    while node != start {
        let h = pred[node];
        handles.push(h);
        let cell = basis.entry(h).cell;
        node = if node >= m { cell.row } else { m + cell.col };
    }
    handles.reverse();
    Ok(cycle_from_path(basis, entering, handles))
}

/// Builds the cycle from the basis path `handles`, which runs from the
/// entering row to the entering column.
fn cycle_from_path(basis: &TransportPlan, entering: Cell, handles: Vec<usize>) -> Cycle {
    let mut cells = Vec::with_capacity(handles.len() + 1);
    cells.push(entering);
    cells.extend(handles.iter().map(|&h| basis.entry(h).cell));

    let mut theta = f64::INFINITY;
    let mut leaving = 0;
    for (k, &h) in handles.iter().enumerate().step_by(2) {
        let flow = basis.entry(h).flow;
        if flow < theta {
            theta = flow;
            leaving = k + 1;
        }
    }
    Cycle {
        cells,
        handles,
        theta: theta.max(0.0),
        leaving,
    }
}

/// Shifts `theta` around the cycle, removes the leaving cell from the basis
/// and inserts the entering cell; returns the leaving cell.
///
/// The cycle must have been computed for this plan.
pub fn apply_pivot(plan: &mut TransportPlan, cycle: &Cycle) -> Result<Cell> {
    let theta = cycle.theta;
    for (k, &h) in cycle.handles.iter().enumerate() {
        let e = *plan.entry(h);
        if e.cell != cycle.cells[k + 1] {
            return Err(Error::Internal(format!(
                "cycle does not match plan at {}",
                cycle.cells[k + 1]
            )));
        }
        if k % 2 == 0 {
            let flow = e.flow - theta;
            if flow < 0.0 {
                return Err(Error::Internal(format!(
                    "flow at {} would become {flow}",
                    e.cell
                )));
            }
            plan.set_flow(h, flow);
        } else {
            plan.set_flow(h, e.flow + theta);
        }
    }
    let leaving_handle = cycle.handles[cycle.leaving - 1];
    let leaving = plan.entry(leaving_handle).cell;
    plan.relocate(leaving_handle, cycle.entering(), theta);
    Ok(leaving)
}

/// Counters for the two runtime drivers: pivots and priced cells.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub pivots: usize,
    /// Pivots with `theta = 0`.
    pub degenerate_pivots: usize,
    /// Number of relative costs evaluated.
    pub cells_scanned: usize,
}

impl SolveStats {
    pub fn merge(&mut self, other: SolveStats) {
        self.pivots += other.pivots;
        self.degenerate_pivots += other.degenerate_pivots;
        self.cells_scanned += other.cells_scanned;
    }
}

/// Outcome of a single pivot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PivotOutcome {
    pub entering: Cell,
    pub leaving: Cell,
    pub theta: f64,
    /// Change of the objective, `theta * r_entering`.
    pub objective_delta: f64,
}

/// Default cap on pivots: `5000 * (m + n)`.
pub fn default_pivot_limit(problem: &Problem) -> usize {
    50 * (problem.rows() + problem.cols()) * 100
}

/// A basis together with its dual prices, ready for pivoting.
///
/// Owns the plan exclusively; the problem is shared read-only.
#[derive(Debug, Clone)]
pub struct SimplexState<'p> {
    problem: &'p Problem,
    plan: TransportPlan,
    duals: DualPrices,
    scratch: TreeScratch,
    eps: f64,
    pub stats: SolveStats,
}

impl<'p> SimplexState<'p> {
    /// Takes ownership of a basic feasible plan (a spanning tree) and prices it.
    pub fn new(problem: &'p Problem, plan: TransportPlan) -> Result<Self> {
        let (m, n) = (problem.rows(), problem.cols());
        if plan.rows() != m || plan.cols() != n {
            return Err(Error::Shape(format!(
                "{}x{} plan for a {m}x{n} problem",
                plan.rows(),
                plan.cols()
            )));
        }
        if plan.len() + 1 != m + n {
            return Err(Error::Structural(format!(
                "basis has {} entries, expected {}",
                plan.len(),
                m + n - 1
            )));
        }
        let mut state = Self {
            problem,
            plan,
            duals: DualPrices {
                u: vec![0.0; m],
                v: vec![0.0; n],
            },
            scratch: TreeScratch::new(m, n),
            eps: problem.cost_epsilon(),
            stats: SolveStats::default(),
        };
        state.refresh_duals()?;
        Ok(state)
    }

    pub fn problem(&self) -> &'p Problem {
        self.problem
    }

    pub fn plan(&self) -> &TransportPlan {
        &self.plan
    }

    pub fn into_plan(self) -> TransportPlan {
        self.plan
    }

    pub fn duals(&self) -> &DualPrices {
        &self.duals
    }

    /// Threshold: a cell is a candidate iff its relative cost is below `-eps`.
    pub fn eps(&self) -> f64 {
        self.eps
    }

    #[inline]
    pub fn relative_cost(&self, row: usize, col: usize) -> f64 {
        self.problem.cost(row, col) - self.duals.u[row] - self.duals.v[col]
    }

    pub fn objective(&self) -> f64 {
        self.plan
            .entries()
            .iter()
            .map(|e| self.problem.cost(e.cell.row, e.cell.col) * e.flow)
            .sum()
    }

    fn refresh_duals(&mut self) -> Result<()> {
        solve_duals(self.problem, &self.plan, &mut self.duals, &mut self.scratch)
    }

    /// Prices cells under `selector`, updating the scan counter.
    pub fn select(&mut self, selector: &mut PivotSelector) -> Option<Candidate> {
        let sel = select_with_eps(self.problem, &self.duals, selector, self.eps);
        self.stats.cells_scanned += sel.scanned;
        sel.entering
    }

    /// Records `count` cell evaluations made outside [`SimplexState::select`].
    pub fn count_scanned(&mut self, count: usize) {
        self.stats.cells_scanned += count;
    }

    /// Enters `candidate` into the basis and re-prices the whole tree.
    pub fn pivot(&mut self, candidate: Candidate) -> Result<PivotOutcome> {
        let cycle = cycle_dfs(&self.plan, candidate.cell, &mut self.scratch)?;
        let leaving = apply_pivot(&mut self.plan, &cycle)?;
        self.refresh_duals()?;
        self.stats.pivots += 1;
        if cycle.theta == 0.0 {
            self.stats.degenerate_pivots += 1;
        }
        Ok(PivotOutcome {
            entering: candidate.cell,
            leaving,
            theta: cycle.theta,
            objective_delta: cycle.theta * candidate.relative_cost,
        })
    }

    /// Pivots under `selector` until no candidate remains or `limit` pivots
    /// have been made in this call.
    pub fn optimize(&mut self, selector: &mut PivotSelector, limit: usize) -> Result<()> {
        let mut made = 0;
        while let Some(candidate) = self.select(selector) {
            if made == limit {
                return Err(Error::IterationLimit { limit });
            }
            self.pivot(candidate)?;
            made += 1;
        }
        Ok(())
    }
}

/// An optimal plan with solver statistics.
#[derive(Debug, Clone)]
pub struct Solution {
    pub plan: TransportPlan,
    pub duals: DualPrices,
    pub objective: f64,
    pub stats: SolveStats,
}

/// Improves a basic feasible plan to optimality.
pub fn solve_to_optimality(
    problem: &Problem,
    initial: TransportPlan,
    strategy: PivotStrategy,
) -> Result<Solution> {
    solve_to_optimality_with_limit(problem, initial, strategy, default_pivot_limit(problem))
}

pub fn solve_to_optimality_with_limit(
    problem: &Problem,
    initial: TransportPlan,
    strategy: PivotStrategy,
    limit: usize,
) -> Result<Solution> {
    let mut state = SimplexState::new(problem, initial)?;
    state.optimize(&mut PivotSelector::new(strategy), limit)?;
    let objective = state.objective();
    Ok(Solution {
        objective,
        duals: state.duals.clone(),
        stats: state.stats,
        plan: state.plan,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::objective;

    fn small() -> Problem {
        Problem::from_rows(
            vec![3.0, 2.0],
            vec![2.0, 3.0],
            &[vec![1.0, 2.0], vec![4.0, 3.0]],
        )
        .unwrap()
    }

    fn optimal_basis() -> TransportPlan {
        TransportPlan::from_triples(2, 2, [(0, 0, 2.0), (0, 1, 1.0), (1, 1, 2.0)]).unwrap()
    }

    fn suboptimal_basis() -> TransportPlan {
        TransportPlan::from_triples(2, 2, [(0, 1, 3.0), (1, 0, 2.0), (1, 1, 0.0)]).unwrap()
    }

    #[test]
    fn duals_by_hand() {
        let d = compute_duals(&small(), &optimal_basis()).unwrap();
        assert_eq!(d.u, vec![0.0, 1.0]);
        assert_eq!(d.v, vec![1.0, 2.0]);

        let p = Problem::parse("1 1\n5\n5\n7\n").unwrap();
        let b = TransportPlan::from_triples(1, 1, [(0, 0, 5.0)]).unwrap();
        let d = compute_duals(&p, &b).unwrap();
        assert_eq!((d.u, d.v), (vec![0.0], vec![7.0]));
    }

    #[test]
    fn duals_shift_with_cost_constant() {
        let base = small();
        let shifted = Problem::from_rows(
            vec![3.0, 2.0],
            vec![2.0, 3.0],
            &[vec![11.0, 12.0], vec![14.0, 13.0]],
        )
        .unwrap();
        let a = compute_duals(&base, &optimal_basis()).unwrap();
        let b = compute_duals(&shifted, &optimal_basis()).unwrap();
        assert_eq!(a.u, b.u);
        assert_eq!(a.v.iter().map(|v| v + 10.0).collect::<Vec<_>>(), b.v);
    }

    #[test]
    fn duals_need_a_spanning_basis() {
        let b = TransportPlan::from_triples(2, 2, [(0, 0, 2.0), (1, 1, 2.0)]).unwrap();
        assert!(matches!(
            compute_duals(&small(), &b),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn relative_costs_by_hand() {
        let p = small();
        let d = compute_duals(&p, &optimal_basis()).unwrap();
        assert_eq!(relative_cost(&p, &d, 0, 0), 0.0);
        assert_eq!(relative_cost(&p, &d, 1, 0), 2.0);
        let zero = DualPrices {
            u: vec![0.0; 2],
            v: vec![0.0; 2],
        };
        assert_eq!(relative_cost(&p, &zero, 1, 0), 4.0);
    }

    #[test]
    fn optimal_basis_has_no_candidate() {
        let p = small();
        let d = compute_duals(&p, &optimal_basis()).unwrap();
        for s in PivotStrategy::ALL {
            assert_eq!(
                select_pivot(&p, &d, &mut PivotSelector::new(s)).entering,
                None
            );
        }
    }

    #[test]
    fn all_strategies_find_the_single_candidate() {
        let p = small();
        let d = compute_duals(&p, &suboptimal_basis()).unwrap();
        assert_eq!((d.u.clone(), d.v.clone()), (vec![0.0, 1.0], vec![3.0, 2.0]));
        for s in PivotStrategy::ALL {
            let c = select_pivot(&p, &d, &mut PivotSelector::new(s))
                .entering
                .unwrap();
            assert_eq!(c.cell, Cell::new(0, 0), "{s}");
            assert_eq!(c.relative_cost, -2.0);
        }
    }

    #[test]
    fn modified_row_cursor_contract() {
        // Five rows; only row 3 has negative relative costs under zero duals.
        let mut rows = vec![vec![1.0, 1.0]; 5];
        rows[3] = vec![-1.0, -2.0];
        let p = Problem::from_rows(vec![1.0; 5], vec![2.5, 2.5], &rows).unwrap();
        let duals = DualPrices {
            u: vec![0.0; 5],
            v: vec![0.0; 2],
        };
        let mut sel = PivotSelector::new(PivotStrategy::ModifiedRowMostNegative);
        let s = select_pivot(&p, &duals, &mut sel);
        assert_eq!(s.entering.unwrap().cell, Cell::new(3, 1));
        assert_eq!(sel.cursor, 4);
        assert_eq!(s.scanned, 8);
        // Resumes at row 4 and wraps around to row 3 again.
        let s = select_pivot(&p, &duals, &mut sel);
        assert_eq!(s.entering.unwrap().cell, Cell::new(3, 1));
        assert_eq!(s.scanned, 10);

        let mut first = PivotSelector::new(PivotStrategy::FirstNegative);
        let s = select_pivot(&p, &duals, &mut first);
        assert_eq!(s.entering.unwrap().cell, Cell::new(3, 0));
        assert_eq!(s.scanned, 7);
    }

    #[test]
    fn five_entry_basis_cycle() {
        // A=(0,1) B=(1,0) C=(1,1) D=(1,2) E=(2,2); F=(2,0) enters.
        let basis = TransportPlan::from_triples(
            3,
            3,
            [
                (0, 1, 1.0),
                (1, 0, 4.0),
                (1, 1, 1.0),
                (1, 2, 1.0),
                (2, 2, 3.0),
            ],
        )
        .unwrap();
        let c = find_cycle(&basis, Cell::new(2, 0)).unwrap();
        // Row-first traversal: F, E, D, B, the mirror of F, B, D, E.
        assert_eq!(
            c.cells,
            vec![
                Cell::new(2, 0),
                Cell::new(2, 2),
                Cell::new(1, 2),
                Cell::new(1, 0)
            ]
        );
        assert_eq!(
            c.losing().collect::<Vec<_>>(),
            vec![Cell::new(2, 2), Cell::new(1, 0)]
        );
        assert_eq!(c.theta, 3.0);
        assert_eq!(c.cells[c.leaving], Cell::new(2, 2));
    }

    #[test]
    fn two_by_two_cycle_and_pivot() {
        let p = small();
        let mut plan = suboptimal_basis();
        assert_eq!(objective(&p, &plan).unwrap(), 14.0);
        let c = find_cycle(&plan, Cell::new(0, 0)).unwrap();
        assert_eq!(
            c.cells,
            vec![
                Cell::new(0, 0),
                Cell::new(0, 1),
                Cell::new(1, 1),
                Cell::new(1, 0)
            ]
        );
        assert_eq!(c.theta, 2.0);
        let leaving = apply_pivot(&mut plan, &c).unwrap();
        assert_eq!(leaving, Cell::new(1, 0));
        assert_eq!(plan.flow(Cell::new(0, 0)), 2.0);
        assert_eq!(plan.flow(Cell::new(0, 1)), 1.0);
        assert_eq!(plan.flow(Cell::new(1, 1)), 2.0);
        assert!(!plan.contains(Cell::new(1, 0)));
        assert_eq!(objective(&p, &plan).unwrap(), 10.0);
        assert!(plan.is_spanning_tree());
    }

    #[test]
    fn entering_cell_in_basis_is_rejected() {
        assert!(find_cycle(&optimal_basis(), Cell::new(0, 0)).is_err());
    }

    #[test]
    fn degenerate_pivot_swaps_membership_only() {
        let p = Problem::from_rows(
            vec![2.0, 1.0],
            vec![1.0, 1.0, 1.0],
            &[vec![1.0, 1.0, 1.0], vec![1.0, 1.0, 1.0]],
        )
        .unwrap();
        let mut plan =
            TransportPlan::from_triples(2, 3, [(0, 0, 1.0), (0, 1, 1.0), (1, 1, 0.0), (1, 2, 1.0)])
                .unwrap();
        // (1,0) enters: (1,1) loses, (0,1) gains, (0,0) loses; theta = 0.
        let c = find_cycle(&plan, Cell::new(1, 0)).unwrap();
        assert_eq!(
            c.cells,
            vec![
                Cell::new(1, 0),
                Cell::new(1, 1),
                Cell::new(0, 1),
                Cell::new(0, 0)
            ]
        );
        assert_eq!(c.theta, 0.0);
        let leaving = apply_pivot(&mut plan, &c).unwrap();
        assert_eq!(leaving, Cell::new(1, 1));
        assert_eq!(plan.flow(Cell::new(1, 0)), 0.0);
        assert_eq!(plan.flow(Cell::new(0, 0)), 1.0);
        assert_eq!(plan.flow(Cell::new(0, 1)), 1.0);
        assert_eq!(plan.flow(Cell::new(1, 2)), 1.0);
        assert!(!plan.contains(Cell::new(1, 1)));
        assert!(plan.is_spanning_tree());
        assert_eq!(plan.feasibility_residual(&p), 0.0);
    }

    #[test]
    fn solve_small_instance() {
        let p = Problem::from_rows(
            vec![2.0, 2.0],
            vec![1.0, 3.0],
            &[vec![1.0, 2.0], vec![4.0, 3.0]],
        )
        .unwrap();
        for s in PivotStrategy::ALL {
            let init = crate::init::build_initial_plan(&p, crate::init::InitRule::NorthwestCorner)
                .unwrap();
            let sol = solve_to_optimality(&p, init, s).unwrap();
            assert_eq!(sol.objective, 9.0, "{s}");
            assert_eq!(sol.plan.flow(Cell::new(0, 0)), 1.0);
            assert_eq!(sol.plan.flow(Cell::new(0, 1)), 1.0);
            assert_eq!(sol.plan.flow(Cell::new(1, 1)), 2.0);
            assert_eq!(sol.duals.value(&p), 9.0);
        }
    }

    #[test]
    fn optimal_input_is_a_fixed_point() {
        let p = small();
        let sol =
            solve_to_optimality(&p, optimal_basis(), PivotStrategy::MatrixMostNegative).unwrap();
        assert_eq!(sol.stats.pivots, 0);
        assert_eq!(sol.plan, optimal_basis());
    }

    #[test]
    fn pivot_limit_aborts() {
        let p = small();
        let err =
            solve_to_optimality_with_limit(&p, suboptimal_basis(), PivotStrategy::FirstNegative, 0)
                .unwrap_err();
        assert!(matches!(err, Error::IterationLimit { limit: 0 }));
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in PivotStrategy::ALL {
            assert_eq!(s.name().parse::<PivotStrategy>().unwrap(), s);
        }
    }
}
