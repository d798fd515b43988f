//! Exact solver for the balanced transportation problem, and therefore for
//! the earth mover's distance between two discrete distributions.
//!
//! The solver is the transportation form of the revised simplex method:
//!
//! * [`init`] builds a starting basis with one of thirteen classic rules,
//! * [`simplex`] improves it with one of three pivot strategies,
//! * [`shortlist`] implements the shortlist method, which restricts most of
//!   the pricing to the cheapest destinations of each origin,
//! * [`verify`] checks optimality certificates and solves tiny instances by
//!   enumeration,
//! * [`bench`] generates random instances, times methods, and fits runtime
//!   power laws,
//! * [`cli`] is the command-line front end.
//!
//! ```
//! use tpsolve::{build_initial_plan, solve_to_optimality, InitRule, PivotStrategy, Problem};
//!
//! let problem = Problem::from_rows(
//!     vec![3.0, 2.0],
//!     vec![2.0, 3.0],
//!     &[vec![1.0, 4.0], vec![3.0, 2.0]],
//! )?;
//! let start = build_initial_plan(&problem, InitRule::NorthwestCorner)?;
//! let solution = solve_to_optimality(&problem, start, PivotStrategy::MatrixMostNegative)?;
//! assert_eq!(solution.objective, 2.0 + 4.0 + 4.0);
//! # Ok::<(), tpsolve::Error>(())
//! ```

mod dsu;

pub mod bench;
pub mod cli;
pub mod error;
pub mod init;
pub mod problem;
pub mod shortlist;
pub mod simplex;
pub mod verify;

pub use error::{Error, Result};
pub use init::{build_initial_plan, InitRule};
pub use problem::{objective, Cell, Entry, Problem, TransportPlan, Violation};
pub use shortlist::{default_params, solve_shortlist, solve_shortlist_with, ShortlistParams};
pub use simplex::{solve_to_optimality, DualPrices, PivotStrategy, Solution, SolveStats};
pub use verify::{brute_force_optimum, check_certificate, Certificate};
