//! Correctness instruments that do not share code paths with the solvers:
//! a dual optimality certificate and an exhaustive basis enumeration for
//! tiny instances.

use std::collections::HashSet;

use crate::dsu::DisjointSets;
use crate::error::{Error, Result};
use crate::problem::{Cell, Problem, TransportPlan};

/// Optimality and feasibility evidence for a basic plan.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    /// Smallest relative cost over all non-basis cells; `+inf` if there are none.
    pub min_relative_cost: f64,
    /// Cell attaining `min_relative_cost`.
    pub worst_cell: Option<Cell>,
    /// Largest row/column sum deviation or negative flow.
    pub feasibility_residual: f64,
    /// Dual objective of the prices used for the check.
    pub dual_objective: f64,
}

impl Certificate {
    /// Optimal at the default tolerances of `problem`.
    pub fn is_optimal(&self, problem: &Problem) -> bool {
        self.is_optimal_within(problem.cost_epsilon(), problem.mass_tolerance())
    }

    pub fn is_optimal_within(&self, cost_eps: f64, mass_tol: f64) -> bool {
        self.min_relative_cost >= -cost_eps && self.feasibility_residual <= mass_tol
    }
}

/// Checks a basic plan: recomputes dual prices from its entries alone and
/// reports the smallest relative cost over every non-basis cell.
pub fn check_certificate(problem: &Problem, plan: &TransportPlan) -> Result<Certificate> {
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
            "plan has {} entries, a basis has {}",
            plan.len(),
            m + n - 1
        )));
    }
    let cells: Vec<Cell> = plan.entries().iter().map(|e| e.cell).collect();
    let (u, v) = prices_by_relaxation(problem, &cells)?;

    let basis: HashSet<Cell> = cells.iter().copied().collect();
    let mut min_relative_cost = f64::INFINITY;
    let mut worst_cell = None;
    for (i, &ui) in u.iter().enumerate() {
        for (j, &vj) in v.iter().enumerate() {
            if basis.contains(&Cell::new(i, j)) {
                continue;
            }
            let r = problem.cost(i, j) - ui - vj;
            if r < min_relative_cost {
                min_relative_cost = r;
                worst_cell = Some(Cell::new(i, j));
            }
        }
    }
    let dual_objective = u
        .iter()
        .zip(problem.supply())
        .map(|(x, a)| x * a)
        .sum::<f64>()
        + v.iter()
            .zip(problem.demand())
            .map(|(x, b)| x * b)
            .sum::<f64>();
    Ok(Certificate {
        min_relative_cost,
        worst_cell,
        feasibility_residual: plan.feasibility_residual(problem),
        dual_objective,
    })
}

/// Solves `u_i + v_j = c_ij` on the given cells by repeated sweeps, fixing
/// `u_0 = 0`.
fn prices_by_relaxation(problem: &Problem, cells: &[Cell]) -> Result<(Vec<f64>, Vec<f64>)> {
    let (m, n) = (problem.rows(), problem.cols());
    let mut u: Vec<Option<f64>> = vec![None; m];
    let mut v: Vec<Option<f64>> = vec![None; n];
    u[0] = Some(0.0);
    let mut pending: Vec<Cell> = cells.to_vec();
    while !pending.is_empty() {
        let before = pending.len();
        pending.retain(|&Cell { row, col }| {
            let c = problem.cost(row, col);
            match (u[row], v[col]) {
                (Some(ui), None) => {
                    v[col] = Some(c - ui);
                    false
                }
                (None, Some(vj)) => {
                    u[row] = Some(c - vj);
                    false
                }
                (Some(_), Some(_)) => false,
                (None, None) => true,
            }
        });
        if pending.len() == before {
            break;
        }
    }
    let u: Option<Vec<f64>> = u.into_iter().collect();
    let v: Option<Vec<f64>> = v.into_iter().collect();
    match (u, v) {
        (Some(u), Some(v)) => Ok((u, v)),
        _ => Err(Error::Structural(
            "basis does not span all origins and destinations".into(),
        )),
    }
}

/// Largest instance the enumeration accepts, measured in spanning trees.
pub const BRUTE_FORCE_TREE_LIMIT: f64 = 1e6;

/// Number of spanning trees of the complete bipartite graph `K_{m,n}`.
pub fn spanning_tree_count(m: usize, n: usize) -> f64 {
    (m as f64).powi(n as i32 - 1) * (n as f64).powi(m as i32 - 1)
}

/// Optimal objective by enumerating every basis (spanning tree of `K_{m,n}`)
/// and keeping the cheapest one whose flows are all non-negative.
///
/// Only for tiny instances: at most [`BRUTE_FORCE_TREE_LIMIT`] trees.
pub fn brute_force_optimum(problem: &Problem) -> Result<f64> {
    let (m, n) = (problem.rows(), problem.cols());
    let trees = spanning_tree_count(m, n);
    if trees > BRUTE_FORCE_TREE_LIMIT {
        return Err(Error::TooLarge { trees });
    }
    let edges: Vec<Cell> = (0..m)
        .flat_map(|i| (0..n).map(move |j| Cell::new(i, j)))
        .collect();
    let mut search = TreeSearch {
        problem,
        edges: &edges,
        chosen: Vec::with_capacity(m + n - 1),
        best: f64::INFINITY,
    };
    search.extend(0, &DisjointSets::new(m + n));
    if search.best.is_finite() {
        Ok(search.best)
    } else {
        Err(Error::Internal("no feasible basis found".into()))
    }
}

struct TreeSearch<'a> {
    problem: &'a Problem,
    edges: &'a [Cell],
    chosen: Vec<Cell>,
    best: f64,
}

impl TreeSearch<'_> {
    fn extend(&mut self, next: usize, components: &DisjointSets) {
        let (m, n) = (self.problem.rows(), self.problem.cols());
        let need = m + n - 1 - self.chosen.len();
        if need == 0 {
            if let Some(cost) = tree_cost(self.problem, &self.chosen) {
                self.best = self.best.min(cost);
            }
            return;
        }
        if self.edges.len() - next < need {
            return;
        }
        let edge = self.edges[next];
        let mut with = components.clone();
        if with.union(edge.row, m + edge.col) {
            self.chosen.push(edge);
            self.extend(next + 1, &with);
            self.chosen.pop();
        }
        self.extend(next + 1, components);
    }
}

/// Flows on a spanning tree by stripping leaves; `None` if any flow is negative.
fn tree_cost(problem: &Problem, tree: &[Cell]) -> Option<f64> {
    let (m, n) = (problem.rows(), problem.cols());
    let mut residual: Vec<f64> = problem
        .supply()
        .iter()
        .chain(problem.demand())
        .copied()
        .collect();
    let mut degree = vec![0usize; m + n];
    for c in tree {
        degree[c.row] += 1;
        degree[m + c.col] += 1;
    }
    let mut used = vec![false; tree.len()];
    let mut cost = 0.0;
    for _ in 0..tree.len() {
        let (k, leaf_is_row) = tree.iter().enumerate().find_map(|(k, c)| {
            if used[k] {
                None
            } else if degree[c.row] == 1 {
                Some((k, true))
            } else if degree[m + c.col] == 1 {
                Some((k, false))
            } else {
                None
            }
        })?;
        let c = tree[k];
        let (leaf, other) = if leaf_is_row {
            (c.row, m + c.col)
        } else {
            (m + c.col, c.row)
        };
        let flow = residual[leaf];
        if flow < -1e-12 {
            return None;
        }
        residual[leaf] = 0.0;
        residual[other] -= flow;
        degree[leaf] -= 1;
        degree[other] -= 1;
        used[k] = true;
        cost += problem.cost(c.row, c.col) * flow;
    }
    Some(cost)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Problem {
        Problem::from_rows(
            vec![3.0, 2.0],
            vec![2.0, 3.0],
            &[vec![1.0, 2.0], vec![4.0, 3.0]],
        )
        .unwrap()
    }

    #[test]
    fn certificate_of_optimal_plan() {
        let plan =
            TransportPlan::from_triples(2, 2, [(0, 0, 2.0), (0, 1, 1.0), (1, 1, 2.0)]).unwrap();
        let cert = check_certificate(&small(), &plan).unwrap();
        assert_eq!(cert.min_relative_cost, 2.0);
        assert_eq!(cert.worst_cell, Some(Cell::new(1, 0)));
        assert_eq!(cert.feasibility_residual, 0.0);
        assert_eq!(cert.dual_objective, 10.0);
        assert!(cert.is_optimal(&small()));
    }

    #[test]
    fn certificate_of_suboptimal_plan() {
        let plan =
            TransportPlan::from_triples(2, 2, [(0, 1, 3.0), (1, 0, 2.0), (1, 1, 0.0)]).unwrap();
        let cert = check_certificate(&small(), &plan).unwrap();
        assert_eq!(cert.min_relative_cost, -2.0);
        assert_eq!(cert.worst_cell, Some(Cell::new(0, 0)));
        assert!(!cert.is_optimal(&small()));
    }

    #[test]
    fn certificate_single_cell_is_vacuous() {
        let p = Problem::parse("1 1\n5\n5\n7\n").unwrap();
        let plan = TransportPlan::from_triples(1, 1, [(0, 0, 5.0)]).unwrap();
        let cert = check_certificate(&p, &plan).unwrap();
        assert_eq!(cert.min_relative_cost, f64::INFINITY);
        assert_eq!(cert.worst_cell, None);
        assert!(cert.is_optimal(&p));
    }

    #[test]
    fn certificate_rejects_non_basis() {
        let plan = TransportPlan::from_triples(2, 2, [(0, 0, 2.0), (1, 1, 2.0)]).unwrap();
        assert!(matches!(
            check_certificate(&small(), &plan),
            Err(Error::Structural(_))
        ));
        // Right size but disconnected: (0,0),(0,1) and a duplicate of (0,0).
        let plan =
            TransportPlan::from_triples(2, 2, [(0, 0, 1.0), (0, 1, 1.0), (0, 0, 1.0)]).unwrap();
        assert!(matches!(
            check_certificate(&small(), &plan),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn brute_force_small_values() {
        let p = Problem::from_rows(
            vec![2.0, 2.0],
            vec![1.0, 3.0],
            &[vec![1.0, 2.0], vec![4.0, 3.0]],
        )
        .unwrap();
        assert_eq!(brute_force_optimum(&p).unwrap(), 9.0);

        let zero = Problem::from_rows(
            vec![1.0, 2.0],
            vec![2.0, 1.0],
            &[vec![0.0; 2], vec![0.0; 2]],
        )
        .unwrap();
        assert_eq!(brute_force_optimum(&zero).unwrap(), 0.0);

        let row =
            Problem::from_rows(vec![6.0], vec![1.0, 2.0, 3.0], &[vec![5.0, 1.0, 3.0]]).unwrap();
        assert_eq!(brute_force_optimum(&row).unwrap(), 5.0 + 2.0 + 9.0);
    }

    #[test]
    fn brute_force_refuses_large_instances() {
        let p = Problem::from_rows(vec![1.0; 8], vec![1.0; 8], &vec![vec![0.0; 8]; 8]).unwrap();
        assert!(matches!(
            brute_force_optimum(&p),
            Err(Error::TooLarge { .. })
        ));
        assert_eq!(spanning_tree_count(4, 4), 4096.0);
        assert_eq!(spanning_tree_count(2, 3), 12.0);
    }

    #[test]
    fn enumeration_visits_every_tree() {
        // All-zero costs: every tree with non-negative flows has cost 0, and the
        // search must find at least one; count trees on K_{3,3} directly.
        struct Counter(usize);
        fn count(edges: &[Cell], next: usize, chosen: usize, d: &DisjointSets, c: &mut Counter) {
            if chosen == 5 {
                c.0 += 1;
                return;
            }
            if next == edges.len() {
                return;
            }
            let mut w = d.clone();
            if w.union(edges[next].row, 3 + edges[next].col) {
                count(edges, next + 1, chosen + 1, &w, c);
            }
            count(edges, next + 1, chosen, d, c);
        }
        let edges: Vec<Cell> = (0..3)
            .flat_map(|i| (0..3).map(move |j| Cell::new(i, j)))
            .collect();
        let mut c = Counter(0);
        count(&edges, 0, 0, &DisjointSets::new(6), &mut c);
        assert_eq!(c.0 as f64, spanning_tree_count(3, 3));
    }
}
