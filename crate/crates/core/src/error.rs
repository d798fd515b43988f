use thiserror::Error;

use crate::problem::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid problem: {}", join_violations(.0))]
    InvalidProblem(Vec<Violation>),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("cell ({row}, {col}) out of range for a {rows}x{cols} problem")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },

    /// The basis is not a spanning tree of the origin/destination graph.
    #[error("structural error: {0}")]
    Structural(String),

    /// An invariant the solver maintains itself was broken.
    #[error("internal error: {0}")]
    Internal(String),

    #[error("iteration limit of {limit} pivots exceeded (suspected cycling)")]
    IterationLimit { limit: usize },

    #[error("instance too large for enumeration: {trees:.3e} spanning trees")]
    TooLarge { trees: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("power-law fit: {0}")]
    Fit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
