//! Initial basic feasible plans.
//!
//! Every rule allocates "the maximum feasible amount" `min(residual supply,
//! residual demand)` to one cell at a time, so each allocation exhausts a row
//! or a column and the raw output has at most `m + n - 1` acyclic entries.
//! [`repair_degeneracy`] then tops it up to a spanning tree with zero-flow
//! entries.
//!
//! Ties are broken by smallest row index, then smallest column index.

use std::fmt;
use std::str::FromStr;

use crate::dsu::DisjointSets;
use crate::error::{Error, Result};
use crate::problem::{Cell, Problem, TransportPlan};

/// Rule used to build the initial plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InitRule {
    NorthwestCorner,
    LeastCost,
    Houthakker,
    Vogel,
    Russell,
    ModifiedRussell,
    WeightedFrequency,
    RowMinimum,
    ModifiedRowMinimum,
    ColumnMinimum,
    ModifiedColumnMinimum,
    AlternatingRowColumn,
    TwoSmallestInRow,
}

impl InitRule {
    pub const ALL: [InitRule; 13] = [
        InitRule::NorthwestCorner,
        InitRule::LeastCost,
        InitRule::Houthakker,
        InitRule::Vogel,
        InitRule::Russell,
        InitRule::ModifiedRussell,
        InitRule::WeightedFrequency,
        InitRule::RowMinimum,
        InitRule::ModifiedRowMinimum,
        InitRule::ColumnMinimum,
        InitRule::ModifiedColumnMinimum,
        InitRule::AlternatingRowColumn,
        InitRule::TwoSmallestInRow,
    ];

    /// The short name used on the command line and in benchmark CSV files.
    pub fn name(self) -> &'static str {
        match self {
            InitRule::NorthwestCorner => "northwest",
            InitRule::LeastCost => "leastcost",
            InitRule::Houthakker => "houthakker",
            InitRule::Vogel => "vogel",
            InitRule::Russell => "russell",
            InitRule::ModifiedRussell => "modrussell",
            InitRule::WeightedFrequency => "habr",
            InitRule::RowMinimum => "rowmin",
            InitRule::ModifiedRowMinimum => "modrowmin",
            InitRule::ColumnMinimum => "colmin",
            InitRule::ModifiedColumnMinimum => "modcolmin",
            InitRule::AlternatingRowColumn => "altrowcol",
            InitRule::TwoSmallestInRow => "twosmallest",
        }
    }
}

impl fmt::Display for InitRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InitRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        InitRule::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown initialization rule `{s}`")))
    }
}

/// Row/column potential estimates used by the Russell-type and
/// weighted-frequency rules.
///
/// These only approximate simplex multipliers; they are not feasible duals.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialEstimates {
    /// Per-origin maximum cost.
    pub row_max: Vec<f64>,
    /// Per-destination maximum cost.
    pub col_max: Vec<f64>,
    pub row_mean: Vec<f64>,
    pub col_mean: Vec<f64>,
    /// `c_ij - row_max_i - col_max_j` (modified Russell) or
    /// `c_ij - row_mean_i - col_mean_j` (weighted frequency), row-major.
    pub reduced: Vec<f64>,
}

#[derive(Clone, Copy)]
enum Reduction {
    Max,
    Mean,
}

impl PotentialEstimates {
    /// Estimates over the full matrix with the reduced matrix `D = c - w - y`.
    pub fn russell(problem: &Problem) -> Self {
        Self::build(problem, Reduction::Max)
    }

    /// Estimates over the full matrix with the reduced matrix `F = c - mr - mc`.
    pub fn weighted_frequency(problem: &Problem) -> Self {
        Self::build(problem, Reduction::Mean)
    }

    fn build(problem: &Problem, reduction: Reduction) -> Self {
        let (m, n) = (problem.rows(), problem.cols());
        let mut row_max = vec![f64::NEG_INFINITY; m];
        let mut col_max = vec![f64::NEG_INFINITY; n];
        let mut row_mean = vec![0.0; m];
        let mut col_mean = vec![0.0; n];
        for i in 0..m {
            for (j, &c) in problem.cost_row(i).iter().enumerate() {
                row_max[i] = row_max[i].max(c);
                col_max[j] = col_max[j].max(c);
                row_mean[i] += c;
                col_mean[j] += c;
            }
        }
        row_mean.iter_mut().for_each(|s| *s /= n as f64);
        col_mean.iter_mut().for_each(|s| *s /= m as f64);
        let (rows, cols) = match reduction {
            Reduction::Max => (&row_max, &col_max),
            Reduction::Mean => (&row_mean, &col_mean),
        };
        let mut reduced = Vec::with_capacity(m * n);
        for (i, &w) in rows.iter().enumerate() {
            reduced.extend(problem.cost_row(i).iter().zip(cols).map(|(c, y)| c - w - y));
        }
        Self {
            row_max,
            col_max,
            row_mean,
            col_mean,
            reduced,
        }
    }
}

/// Builds the initial plan for `rule` and repairs it to a spanning tree.
///
/// The problem must be valid.
pub fn build_initial_plan(problem: &Problem, rule: InitRule) -> Result<TransportPlan> {
    repair_degeneracy(allocate(problem, rule), problem)
}

/// Runs the allocation phase of `rule` without degeneracy repair.
pub fn allocate(problem: &Problem, rule: InitRule) -> TransportPlan {
    let mut r = Residual::new(problem);
    match rule {
        InitRule::NorthwestCorner => northwest_corner(&mut r),
        InitRule::LeastCost => matrix_minimum(&mut r, problem.costs()),
        InitRule::Houthakker => houthakker(&mut r),
        InitRule::Vogel => vogel(&mut r),
        InitRule::Russell => russell(&mut r),
        InitRule::ModifiedRussell => {
            matrix_minimum(&mut r, &PotentialEstimates::russell(problem).reduced)
        }
        InitRule::WeightedFrequency => matrix_minimum(
            &mut r,
            &PotentialEstimates::weighted_frequency(problem).reduced,
        ),
        InitRule::RowMinimum => line_minimum(&mut r, Axis::Row),
        InitRule::ColumnMinimum => line_minimum(&mut r, Axis::Col),
        InitRule::ModifiedRowMinimum => modified_line_minimum(&mut r, Axis::Row, 1),
        InitRule::ModifiedColumnMinimum => modified_line_minimum(&mut r, Axis::Col, 1),
        InitRule::TwoSmallestInRow => modified_line_minimum(&mut r, Axis::Row, 2),
        InitRule::AlternatingRowColumn => alternating_row_column(&mut r),
    }
    r.plan
}

/// Completes a feasible acyclic plan with zero-flow entries until it has
/// `m + n - 1` entries forming a spanning tree.
///
/// Cells are scanned in row-major order; each cell joining two distinct
/// components of the current forest is added.
pub fn repair_degeneracy(mut plan: TransportPlan, problem: &Problem) -> Result<TransportPlan> {
    let (m, n) = (problem.rows(), problem.cols());
    if plan.rows() != m || plan.cols() != n {
        return Err(Error::Shape(format!(
            "{}x{} plan for a {m}x{n} problem",
            plan.rows(),
            plan.cols()
        )));
    }
    let target = m + n - 1;
    if plan.len() > target {
        return Err(Error::Internal(format!(
            "plan has {} entries, a basis has {target}",
            plan.len()
        )));
    }
    let mut dsu = DisjointSets::new(m + n);
    for e in plan.entries() {
        if !dsu.union(e.cell.row, m + e.cell.col) {
            return Err(Error::Internal(format!(
                "plan entries contain a cycle through {}",
                e.cell
            )));
        }
    }
    'scan: for i in 0..m {
        for j in 0..n {
            if plan.len() == target {
                break 'scan;
            }
            if dsu.union(i, m + j) {
                plan.push(Cell::new(i, j), 0.0);
            }
        }
    }
    Ok(plan)
}

/// Residual supplies and demands plus the plan under construction.
struct Residual<'a> {
    problem: &'a Problem,
    supply: Vec<f64>,
    demand: Vec<f64>,
    rows_open: usize,
    cols_open: usize,
    snap: f64,
    plan: TransportPlan,
}

impl<'a> Residual<'a> {
    fn new(problem: &'a Problem) -> Self {
        Self {
            problem,
            supply: problem.supply().to_vec(),
            demand: problem.demand().to_vec(),
            rows_open: problem.rows(),
            cols_open: problem.cols(),
            // Residues below this are rounding leftovers of a balanced problem.
            snap: problem.mass_tolerance(),
            plan: TransportPlan::new(problem.rows(), problem.cols()),
        }
    }

    #[inline]
    fn row_open(&self, i: usize) -> bool {
        self.supply[i] > 0.0
    }

    #[inline]
    fn col_open(&self, j: usize) -> bool {
        self.demand[j] > 0.0
    }

    fn done(&self) -> bool {
        self.rows_open == 0 || self.cols_open == 0
    }

    /// Ships the maximum feasible amount through `(i, j)`; returns which of
    /// the row and the column became exhausted.
    fn allocate(&mut self, i: usize, j: usize) -> (bool, bool) {
        debug_assert!(self.row_open(i) && self.col_open(j));
        let amount = self.supply[i].min(self.demand[j]);
        self.plan.push(Cell::new(i, j), amount);
        self.supply[i] -= amount;
        self.demand[j] -= amount;
        if self.supply[i] <= self.snap {
            self.supply[i] = 0.0;
        }
        if self.demand[j] <= self.snap {
            self.demand[j] = 0.0;
        }
        let row_done = !self.row_open(i);
        let col_done = !self.col_open(j);
        self.rows_open -= usize::from(row_done);
        self.cols_open -= usize::from(col_done);
        (row_done, col_done)
    }

    fn open_rows(&self) -> Vec<usize> {
        (0..self.supply.len())
            .filter(|&i| self.row_open(i))
            .collect()
    }

    fn open_cols(&self) -> Vec<usize> {
        (0..self.demand.len())
            .filter(|&j| self.col_open(j))
            .collect()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Axis {
    Row,
    Col,
}

impl Residual<'_> {
    fn lines(&self, axis: Axis) -> usize {
        match axis {
            Axis::Row => self.supply.len(),
            Axis::Col => self.demand.len(),
        }
    }

    fn line_open(&self, axis: Axis, line: usize) -> bool {
        match axis {
            Axis::Row => self.row_open(line),
            Axis::Col => self.col_open(line),
        }
    }

    fn cell(axis: Axis, line: usize, cross: usize) -> (usize, usize) {
        match axis {
            Axis::Row => (line, cross),
            Axis::Col => (cross, line),
        }
    }

    /// The two cheapest open cells of a line as cross indices, ordered by
    /// `(cost, index)`.
    fn two_cheapest(&self, axis: Axis, line: usize) -> (Option<usize>, Option<usize>) {
        let mut best: Option<(f64, usize)> = None;
        let mut second: Option<(f64, usize)> = None;
        let cross_len = self.lines(match axis {
            Axis::Row => Axis::Col,
            Axis::Col => Axis::Row,
        });
        for k in 0..cross_len {
            let open = match axis {
                Axis::Row => self.col_open(k),
                Axis::Col => self.row_open(k),
            };
            if !open {
                continue;
            }
            let (i, j) = Self::cell(axis, line, k);
            let c = self.problem.cost(i, j);
            match best {
                Some((bc, _)) if c >= bc => {
                    if second.is_none_or(|(sc, _)| c < sc) {
                        second = Some((c, k));
                    }
                }
                _ => {
                    second = best;
                    best = Some((c, k));
                }
            }
        }
        (best.map(|b| b.1), second.map(|s| s.1))
    }

    fn allocate_on(&mut self, axis: Axis, line: usize, cross: usize) -> (bool, bool) {
        let (i, j) = Self::cell(axis, line, cross);
        let (row_done, col_done) = self.allocate(i, j);
        match axis {
            Axis::Row => (row_done, col_done),
            Axis::Col => (col_done, row_done),
        }
    }
}

fn northwest_corner(r: &mut Residual) {
    let (m, n) = (r.supply.len(), r.demand.len());
    let (mut i, mut j) = (0, 0);
    while i < m && j < n {
        let (row_done, col_done) = r.allocate(i, j);
        i += usize::from(row_done);
        j += usize::from(col_done);
    }
}

/// Least-cost allocation driven by an arbitrary key matrix: cells are sorted
/// once by `(key, row, col)` and visited in that order.
fn matrix_minimum(r: &mut Residual, keys: &[f64]) {
    let n = r.demand.len();
    assert!(
        keys.len() <= u32::MAX as usize,
        "cost matrix too large for 32-bit cell indices"
    );
    let mut order: Vec<(f64, u32)> = keys
        .iter()
        .enumerate()
        .map(|(k, &c)| (c, k as u32))
        .collect();
    order.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    for (_, k) in order {
        let (i, j) = (k as usize / n, k as usize % n);
        if r.row_open(i) && r.col_open(j) {
            r.allocate(i, j);
            if r.done() {
                break;
            }
        }
    }
}

fn houthakker(r: &mut Residual) {
    let p = r.problem;
    while !r.done() {
        let rows = r.open_rows();
        let cols = r.open_cols();
        let mut row_min = vec![f64::INFINITY; p.rows()];
        let mut col_min = vec![f64::INFINITY; p.cols()];
        for &i in &rows {
            for &j in &cols {
                let c = p.cost(i, j);
                row_min[i] = row_min[i].min(c);
                col_min[j] = col_min[j].min(c);
            }
        }
        let mut progressed = false;
        for &i in &rows {
            for &j in &cols {
                let c = p.cost(i, j);
                if c == row_min[i] && c == col_min[j] && r.row_open(i) && r.col_open(j) {
                    r.allocate(i, j);
                    progressed = true;
                }
            }
        }
        // The overall residual minimum is always mutually preferred.
        debug_assert!(progressed);
        if !progressed {
            break;
        }
    }
}

fn vogel(r: &mut Residual) {
    while !r.done() {
        // (penalty, axis, line, cross index of the cheapest cell)
        let mut pick: Option<(f64, Axis, usize, usize)> = None;
        for axis in [Axis::Row, Axis::Col] {
            for line in 0..r.lines(axis) {
                if !r.line_open(axis, line) {
                    continue;
                }
                let (Some(b), second) = r.two_cheapest(axis, line) else {
                    continue;
                };
                let cost = |k: usize| {
                    let (i, j) = Residual::cell(axis, line, k);
                    r.problem.cost(i, j)
                };
                let penalty = match second {
                    Some(s) => cost(s) - cost(b),
                    None => cost(b),
                };
                if pick.is_none_or(|(best, ..)| penalty > best) {
                    pick = Some((penalty, axis, line, b));
                }
            }
        }
        let Some((_, axis, line, cross)) = pick else {
            break;
        };
        r.allocate_on(axis, line, cross);
    }
}

fn russell(r: &mut Residual) {
    let p = r.problem;
    while !r.done() {
        let rows = r.open_rows();
        let cols = r.open_cols();
        let mut w = vec![f64::NEG_INFINITY; p.rows()];
        let mut y = vec![f64::NEG_INFINITY; p.cols()];
        for &i in &rows {
            for &j in &cols {
                let c = p.cost(i, j);
                w[i] = w[i].max(c);
                y[j] = y[j].max(c);
            }
        }
        let mut best: Option<(f64, usize, usize)> = None;
        for &i in &rows {
            for &j in &cols {
                let d = p.cost(i, j) - w[i] - y[j];
                if best.is_none_or(|(b, ..)| d < b) {
                    best = Some((d, i, j));
                }
            }
        }
        let Some((_, i, j)) = best else { break };
        r.allocate(i, j);
    }
}

fn line_minimum(r: &mut Residual, axis: Axis) {
    for line in 0..r.lines(axis) {
        while r.line_open(axis, line) {
            let (Some(k), _) = r.two_cheapest(axis, line) else {
                break;
            };
            r.allocate_on(axis, line, k);
        }
    }
}

/// Cyclic sweeps over the lines of `axis`, making at most `per_visit`
/// allocations (to the cheapest open cells) on each visit.
fn modified_line_minimum(r: &mut Residual, axis: Axis, per_visit: usize) {
    debug_assert!((1..=2).contains(&per_visit));
    while !r.done() {
        let mut progressed = false;
        for line in 0..r.lines(axis) {
            if r.done() {
                break;
            }
            if !r.line_open(axis, line) {
                continue;
            }
            let (first, second) = r.two_cheapest(axis, line);
            let Some(k) = first else { continue };
            let (line_done, _) = r.allocate_on(axis, line, k);
            progressed = true;
            if per_visit == 2 && !line_done {
                if let Some(k2) = second {
                    r.allocate_on(axis, line, k2);
                }
            }
        }
        if !progressed {
            break;
        }
    }
}

fn alternating_row_column(r: &mut Residual) {
    let (m, n) = (r.supply.len(), r.demand.len());
    let (mut row_cursor, mut col_cursor) = (0, 0);
    let next_open = |r: &Residual, axis: Axis, from: usize, len: usize| {
        (0..len)
            .map(|d| (from + d) % len)
            .find(|&l| r.line_open(axis, l))
    };
    while !r.done() {
        if let Some(i) = next_open(r, Axis::Row, row_cursor, m) {
            if let (Some(j), _) = r.two_cheapest(Axis::Row, i) {
                r.allocate(i, j);
            }
            row_cursor = (i + 1) % m;
        }
        if r.done() {
            break;
        }
        if let Some(j) = next_open(r, Axis::Col, col_cursor, n) {
            if let (Some(i), _) = r.two_cheapest(Axis::Col, j) {
                r.allocate(i, j);
            }
            col_cursor = (j + 1) % n;
        }
    }
}
