use thiserror::Error;

use crate::rational::Rational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("firm {0:?} has zero capacity; omit it from the market instead")]
    ZeroCapacity(String),
    #[error("duplicate id {0:?}")]
    DuplicateId(String),
    #[error("id {0:?} uses the reserved dummy prefix")]
    ReservedId(String),
    #[error("negative entry {value} at row {row}, column {col}")]
    NegativeEntry {
        row: usize,
        col: usize,
        value: Box<Rational>,
    },
    #[error("matrix shape mismatch: expected {expected_rows}x{expected_cols}, found {found}")]
    Shape {
        expected_rows: usize,
        expected_cols: usize,
        found: String,
    },
    #[error("index {index} out of range for {what} (size {size})")]
    OutOfRange {
        what: &'static str,
        index: usize,
        size: usize,
    },
    #[error("invalid matching: {0}")]
    InvalidMatching(String),
    #[error("matching is not optimal: value {found}, optimum {optimum}")]
    NotOptimal {
        found: Box<Rational>,
        optimum: Box<Rational>,
    },
    #[error("{what} limit exceeded: size {size} > limit {limit}")]
    LimitExceeded {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("vector has {found} entries, expected {expected}")]
    Dimension { expected: usize, found: usize },
    #[error("salary vector is not in the core")]
    NotInCore,
    #[error("payoff vector is not an imputation")]
    NotImputation,
    #[error("market is not capacity-balanced (total capacity {capacity}, workers {workers})")]
    NotBalanced { capacity: usize, workers: usize },
    #[error("market does not have a dominant diagonal")]
    NotDominantDiagonal,
    #[error("firm {0} is not matched under the optimal matching")]
    UnmatchedFirm(usize),
    #[error("tau-value undefined: {0}")]
    TauUndefined(&'static str),
    #[error("decrease must be non-negative")]
    NegativeDecrease,
    #[error("linear program failed: {0}")]
    Lp(#[from] crate::lp::LpError),
    #[error("invalid order: {0}")]
    InvalidOrder(String),
}
