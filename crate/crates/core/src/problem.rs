//! The balanced transportation problem, transport plans, and the plain-text
//! instance format.
//!
//! Costs are stored dense and row-major, so an `m x n` instance needs
//! `8 * m * n` bytes for the cost matrix alone (about 1.3 GB at 12 800 x
//! 12 800).

use std::fmt;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Relative tolerance used for the balance check and for feasibility residuals.
pub const MASS_RELATIVE_TOLERANCE: f64 = 1e-9;

/// Relative tolerance on reduced costs, scaled by `max(1, max |c_ij|)`.
pub const COST_RELATIVE_TOLERANCE: f64 = 1e-9;

/// A cell `(row, col)` of the cost matrix; rows are origins, columns destinations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

/// A balanced transportation problem with `m` origins and `n` destinations.
///
/// Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    supply: Vec<f64>,
    demand: Vec<f64>,
    cost: Vec<f64>,
}

/// One violated problem invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Empty,
    NonPositiveSupply { index: usize, value: f64 },
    NonPositiveDemand { index: usize, value: f64 },
    NonFiniteSupply { index: usize },
    NonFiniteDemand { index: usize },
    NonFiniteCost { row: usize, col: usize },
    Unbalanced { supply: f64, demand: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => write!(f, "need at least one origin and one destination"),
            Violation::NonPositiveSupply { index, .. } => write!(f, "supply[{index}] not > 0"),
            Violation::NonPositiveDemand { index, .. } => write!(f, "demand[{index}] not > 0"),
            Violation::NonFiniteSupply { index } => write!(f, "supply[{index}] not finite"),
            Violation::NonFiniteDemand { index } => write!(f, "demand[{index}] not finite"),
            Violation::NonFiniteCost { row, col } => write!(f, "cost[{row}][{col}] not finite"),
            Violation::Unbalanced { supply, demand } => {
                write!(f, "unbalanced: {supply} \u{2260} {demand}")
            }
        }
    }
}

impl Problem {
    /// Builds a problem and checks every invariant.
    pub fn new(supply: Vec<f64>, demand: Vec<f64>, cost: Vec<f64>) -> Result<Self> {
        let problem = Self::from_raw(supply, demand, cost)?;
        problem.ensure_valid()?;
        Ok(problem)
    }

    /// Builds a problem from a row-per-origin cost matrix and checks every invariant.
    pub fn from_rows(supply: Vec<f64>, demand: Vec<f64>, rows: &[Vec<f64>]) -> Result<Self> {
        if rows.len() != supply.len() {
            return Err(Error::Shape(format!(
                "{} cost rows for {} origins",
                rows.len(),
                supply.len()
            )));
        }
        if let Some(row) = rows.iter().find(|r| r.len() != demand.len()) {
            return Err(Error::Shape(format!(
                "cost row of length {} for {} destinations",
                row.len(),
                demand.len()
            )));
        }
        Self::new(supply, demand, rows.concat())
    }

    /// Builds a problem checking only that the cost matrix has `m * n` entries.
    ///
    /// The result may violate the problem invariants; see [`Problem::validate`].
    pub fn from_raw(supply: Vec<f64>, demand: Vec<f64>, cost: Vec<f64>) -> Result<Self> {
        let expected = supply.len() * demand.len();
        if cost.len() != expected {
            return Err(Error::Shape(format!(
                "expected {expected} cost entries, got {}",
                cost.len()
            )));
        }
        Ok(Self {
            supply,
            demand,
            cost,
        })
    }

    /// Number of origins.
    #[inline]
    pub fn rows(&self) -> usize {
        self.supply.len()
    }

    /// Number of destinations.
    #[inline]
    pub fn cols(&self) -> usize {
        self.demand.len()
    }

    #[inline]
    pub fn supply(&self) -> &[f64] {
        &self.supply
    }

    #[inline]
    pub fn demand(&self) -> &[f64] {
        &self.demand
    }

    #[inline]
    pub fn cost(&self, row: usize, col: usize) -> f64 {
        self.cost[row * self.demand.len() + col]
    }

    /// The costs of one origin, indexed by destination.
    #[inline]
    pub fn cost_row(&self, row: usize) -> &[f64] {
        let n = self.demand.len();
        &self.cost[row * n..(row + 1) * n]
    }

    /// The full row-major cost matrix.
    #[inline]
    pub fn costs(&self) -> &[f64] {
        &self.cost
    }

    pub fn total_supply(&self) -> f64 {
        self.supply.iter().sum()
    }

    pub fn total_demand(&self) -> f64 {
        self.demand.iter().sum()
    }

    pub fn max_abs_cost(&self) -> f64 {
        self.cost.iter().fold(0.0, |acc, c| acc.max(c.abs()))
    }

    /// Absolute tolerance for mass balance and row/column sums.
    pub fn mass_tolerance(&self) -> f64 {
        MASS_RELATIVE_TOLERANCE * self.total_supply().max(1.0)
    }

    /// Threshold below which a reduced cost counts as negative.
    pub fn cost_epsilon(&self) -> f64 {
        COST_RELATIVE_TOLERANCE * self.max_abs_cost().max(1.0)
    }

    /// Every violated invariant; empty iff the problem is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.supply.is_empty() || self.demand.is_empty() {
            out.push(Violation::Empty);
        }
        for (index, &value) in self.supply.iter().enumerate() {
            // Also catches NaN.
            if value.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
                out.push(Violation::NonPositiveSupply { index, value });
            } else if !value.is_finite() {
                out.push(Violation::NonFiniteSupply { index });
            }
        }
        for (index, &value) in self.demand.iter().enumerate() {
            if value.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
                out.push(Violation::NonPositiveDemand { index, value });
            } else if !value.is_finite() {
                out.push(Violation::NonFiniteDemand { index });
            }
        }
        let n = self.cols();
        for (k, c) in self.cost.iter().enumerate() {
            if !c.is_finite() {
                out.push(Violation::NonFiniteCost {
                    row: k / n,
                    col: k % n,
                });
            }
        }
        let (supply, demand) = (self.total_supply(), self.total_demand());
        if supply.is_finite()
            && demand.is_finite()
            && (supply - demand).abs() > MASS_RELATIVE_TOLERANCE * supply.max(1.0)
        {
            out.push(Violation::Unbalanced { supply, demand });
        }
        out
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidProblem(violations))
        }
    }

    /// Reads a problem in the plain-text instance format.
    ///
    /// Line 1 holds `m n`; the following tokens are the `m` supplies, the `n`
    /// demands and the `m * n` costs in row-major order. Any whitespace
    /// separates tokens after the header.
    pub fn parse(text: &str) -> Result<Self> {
        parse_problem(text.as_bytes())
    }

    pub fn read_from(reader: impl BufRead) -> Result<Self> {
        parse_problem(reader)
    }

    /// Writes the problem in the instance format with shortest round-trip decimals.
    pub fn write_to(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "{} {}", self.rows(), self.cols())?;
        write_line(&mut out, &self.supply)?;
        write_line(&mut out, &self.demand)?;
        for row in 0..self.rows() {
            write_line(&mut out, self.cost_row(row))?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("instance text is ASCII")
    }
}

fn write_line(out: &mut impl Write, values: &[f64]) -> std::io::Result<()> {
    let mut first = true;
    for v in values {
        if !first {
            out.write_all(b" ")?;
        }
        first = false;
        write!(out, "{v}")?;
    }
    out.write_all(b"\n")
}

fn parse_problem(reader: impl BufRead) -> Result<Problem> {
    let mut lines = reader.lines().enumerate();

    let (header_line, header) = loop {
        match lines.next() {
            Some((no, line)) => {
                let line = line?;
                if !line.trim().is_empty() {
                    break (no + 1, line);
                }
            }
            None => {
                return Err(Error::Parse {
                    line: 1,
                    message: "missing header `m n`".into(),
                })
            }
        }
    };
    let dims: Vec<&str> = header.split_whitespace().collect();
    let malformed = || Error::Parse {
        line: header_line,
        message: format!("malformed header `{}`, expected `m n`", header.trim()),
    };
    if dims.len() != 2 {
        return Err(malformed());
    }
    let m: usize = dims[0].parse().map_err(|_| malformed())?;
    let n: usize = dims[1].parse().map_err(|_| malformed())?;
    if m == 0 || n == 0 {
        return Err(malformed());
    }

    let mut supply = Vec::with_capacity(m);
    let mut demand = Vec::with_capacity(n);
    let mut cost = Vec::with_capacity(m.saturating_mul(n));
    let mut last_line = header_line;

    for (no, line) in lines {
        let line = line?;
        last_line = no + 1;
        for token in line.split_whitespace() {
            let value: f64 = token.parse().map_err(|_| Error::Parse {
                line: no + 1,
                message: format!("invalid number `{token}`"),
            })?;
            if supply.len() < m {
                supply.push(value);
            } else if demand.len() < n {
                demand.push(value);
            } else if cost.len() < m * n {
                cost.push(value);
            } else {
                return Err(Error::Parse {
                    line: no + 1,
                    message: format!("unexpected trailing token `{token}`"),
                });
            }
        }
    }

    let short = |what: &str, want: usize, got: usize| Error::Parse {
        line: last_line,
        message: format!("expected {want} {what} entries, got {got}"),
    };
    if supply.len() < m {
        return Err(short("supply", m, supply.len()));
    }
    if demand.len() < n {
        return Err(short("demand", n, demand.len()));
    }
    if cost.len() < m * n {
        return Err(short("cost", m * n, cost.len()));
    }
    Problem::from_raw(supply, demand, cost)
}

/// One basis (or plan) entry: a cell and the amount shipped through it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry {
    pub cell: Cell,
    pub flow: f64,
}

/// A transport plan stored as a list of entries plus per-row and per-column
/// lists of entry handles (indices into [`TransportPlan::entries`]).
///
/// When used as a simplex basis it holds exactly `m + n - 1` entries forming
/// a spanning tree of the bipartite origin/destination graph; zero flows are
/// allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    entries: Vec<Entry>,
    row_index: Vec<Vec<usize>>,
    col_index: Vec<Vec<usize>>,
}

impl TransportPlan {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self {
            entries: Vec::with_capacity(rows + cols),
            row_index: vec![Vec::new(); rows],
            col_index: vec![Vec::new(); cols],
        }
    }

    /// Builds a plan from `(row, col, flow)` triples.
    pub fn from_triples(
        rows: usize,
        cols: usize,
        triples: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut plan = Self::new(rows, cols);
        for (row, col, flow) in triples {
            plan.try_push(Cell::new(row, col), flow)?;
        }
        Ok(plan)
    }

    pub fn rows(&self) -> usize {
        self.row_index.len()
    }

    pub fn cols(&self) -> usize {
        self.col_index.len()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn entry(&self, handle: usize) -> &Entry {
        &self.entries[handle]
    }

    /// Handles of the entries in `row`.
    pub fn row(&self, row: usize) -> &[usize] {
        &self.row_index[row]
    }

    /// Handles of the entries in `col`.
    pub fn col(&self, col: usize) -> &[usize] {
        &self.col_index[col]
    }

    /// Handle of the entry at `cell`, if present.
    pub fn find(&self, cell: Cell) -> Option<usize> {
        let by_row = &self.row_index[cell.row];
        let by_col = &self.col_index[cell.col];
        let list = if by_row.len() <= by_col.len() {
            by_row
        } else {
            by_col
        };
        list.iter().copied().find(|&h| self.entries[h].cell == cell)
    }

    pub fn contains(&self, cell: Cell) -> bool {
        self.find(cell).is_some()
    }

    pub fn flow(&self, cell: Cell) -> f64 {
        self.find(cell).map_or(0.0, |h| self.entries[h].flow)
    }

    /// Adds an entry and returns its handle.
    ///
    /// Panics if the cell is out of range.
    pub fn push(&mut self, cell: Cell, flow: f64) -> usize {
        let handle = self.entries.len();
        self.entries.push(Entry { cell, flow });
        self.row_index[cell.row].push(handle);
        self.col_index[cell.col].push(handle);
        handle
    }

    pub fn try_push(&mut self, cell: Cell, flow: f64) -> Result<usize> {
        if cell.row >= self.rows() || cell.col >= self.cols() {
            return Err(Error::IndexOutOfRange {
                row: cell.row,
                col: cell.col,
                rows: self.rows(),
                cols: self.cols(),
            });
        }
        Ok(self.push(cell, flow))
    }

    pub(crate) fn set_flow(&mut self, handle: usize, flow: f64) {
        self.entries[handle].flow = flow;
    }

    /// Moves the entry at `handle` to `cell` with the given flow, keeping the handle.
    pub(crate) fn relocate(&mut self, handle: usize, cell: Cell, flow: f64) {
        let old = self.entries[handle].cell;
        detach(&mut self.row_index[old.row], handle);
        detach(&mut self.col_index[old.col], handle);
        self.entries[handle] = Entry { cell, flow };
        self.row_index[cell.row].push(handle);
        self.col_index[cell.col].push(handle);
    }

    pub fn row_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.rows()];
        for e in &self.entries {
            sums[e.cell.row] += e.flow;
        }
        sums
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.cols()];
        for e in &self.entries {
            sums[e.cell.col] += e.flow;
        }
        sums
    }

    /// Largest deviation of a row sum from its supply or a column sum from its demand.
    pub fn feasibility_residual(&self, problem: &Problem) -> f64 {
        let rows = self
            .row_sums()
            .iter()
            .zip(problem.supply())
            .map(|(s, a)| (s - a).abs())
            .fold(0.0, f64::max);
        let cols = self
            .col_sums()
            .iter()
            .zip(problem.demand())
            .map(|(s, b)| (s - b).abs())
            .fold(0.0, f64::max);
        let negative = self
            .entries
            .iter()
            .map(|e| (-e.flow).max(0.0))
            .fold(0.0, f64::max);
        rows.max(cols).max(negative)
    }

    /// Whether the entries form a spanning tree of the bipartite graph:
    /// `m + n - 1` entries and no cycle.
    pub fn is_spanning_tree(&self) -> bool {
        let (m, n) = (self.rows(), self.cols());
        if self.entries.len() + 1 != m + n {
            return false;
        }
        let mut dsu = crate::dsu::DisjointSets::new(m + n);
        self.entries
            .iter()
            .all(|e| dsu.union(e.cell.row, m + e.cell.col))
    }

    /// Writes the plan as one `row col flow` line per entry (0-based indices).
    pub fn write_to(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "{} {} {}", self.rows(), self.cols(), self.len())?;
        for e in &self.entries {
            writeln!(out, "{} {} {}", e.cell.row, e.cell.col, e.flow)?;
        }
        Ok(())
    }

    /// Reads a plan written by [`TransportPlan::write_to`].
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (hno, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing plan header `m n count`".into(),
        })?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse {
                line: hno + 1,
                message: format!("malformed plan header `{}`", header.trim()),
            })?;
        let [m, n, count] = dims[..] else {
            return Err(Error::Parse {
                line: hno + 1,
                message: format!("malformed plan header `{}`", header.trim()),
            });
        };
        let mut plan = Self::new(m, n);
        for (no, line) in lines {
            let bad = |message: String| Error::Parse {
                line: no + 1,
                message,
            };
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let [r, c, x] = tokens[..] else {
                return Err(bad(format!(
                    "expected `row col flow`, got `{}`",
                    line.trim()
                )));
            };
            let row = r.parse().map_err(|_| bad(format!("invalid row `{r}`")))?;
            let col = c
                .parse()
                .map_err(|_| bad(format!("invalid column `{c}`")))?;
            let flow = x
                .parse()
                .map_err(|_| bad(format!("invalid number `{x}`")))?;
            plan.try_push(Cell::new(row, col), flow)
                .map_err(|e| bad(e.to_string()))?;
        }
        if plan.len() != count {
            return Err(Error::Parse {
                line: hno + 1,
                message: format!("expected {count} plan entries, got {}", plan.len()),
            });
        }
        Ok(plan)
    }
}

fn detach(list: &mut Vec<usize>, handle: usize) {
    if let Some(pos) = list.iter().position(|&h| h == handle) {
        list.swap_remove(pos);
    }
}

/// Total cost `sum c_ij * x_ij` over the plan entries.
pub fn objective(problem: &Problem, plan: &TransportPlan) -> Result<f64> {
    let (m, n) = (problem.rows(), problem.cols());
    let mut total = 0.0;
    for e in plan.entries() {
        let Cell { row, col } = e.cell;
        if row >= m || col >= n {
            return Err(Error::IndexOutOfRange {
                row,
                col,
                rows: m,
                cols: n,
            });
        }
        total += problem.cost(row, col) * e.flow;
    }
    Ok(total)
}
