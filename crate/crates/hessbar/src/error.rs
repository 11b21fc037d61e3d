//! Error type shared by the kernel, direction, step-size, and solver modules.

use thiserror::Error;

/// Errors surfaced by kernel evaluation, KKT solves, and the descent loops.
#[derive(Debug, Error)]
pub enum Error {
    /// A point was queried outside the open domain of a kernel.
    #[error("point outside kernel domain: {0}")]
    OutsideDomain(String),

    /// Vector or matrix dimensions do not agree.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// A construction or configuration parameter is invalid.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Shape data admits no strictly interior point.
    #[error("empty interior: {0}")]
    EmptyInterior(String),

    /// The constraint matrix does not have full row rank.
    #[error("constraint matrix rank {rank} is below its {rows} rows")]
    RankDeficient { rank: usize, rows: usize },

    /// A linear system that should be positive definite failed to factor.
    #[error("linear system numerically singular: {0}")]
    SingularSystem(String),

    /// A step-size or divergence argument left its admissible range.
    #[error("step argument outside admissible range: {0}")]
    StepDomain(String),

    /// Phase-1 found no strictly feasible point.
    #[error("no strictly feasible point: {0}")]
    Infeasible(String),

    /// The barrier minimization diverged instead of settling at a center.
    #[error("analytic center diverged: barrier appears unbounded below on the feasible set")]
    UnboundedCenter,

    /// The adaptive line search exhausted its doubling budget.
    #[error("smoothness line search exceeded {0} doublings; the pair is not smooth for any reasonable constant")]
    SmoothnessViolation(u32),

    /// A numerical invariant broke down mid-computation.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// Input data could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
