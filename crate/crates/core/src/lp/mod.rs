//! Self-contained linear programming: model building, a two-phase dense
//! simplex with Bland's anti-cycling rule, dual extraction and certificates
//! for infeasible or unbounded models.
//!
//! Models are generic over [`Scalar`](crate::scalar::Scalar): `f64` for the
//! everyday path and `BigRational` for exact optima on small instances.

mod duality;
mod export;
mod model;
mod simplex;

pub use duality::{strong_duality_check, verify_farkas, DualityReport};
pub use export::to_lp_format;
pub use model::{Constraint, LinearProgram, Relation, RowId, Sense, VarId, Variable};
pub use simplex::{solve, solve_with, LpSolution, LpStatus, SolveOptions, SolveStats};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("model has no variables")]
    Empty,
    #[error("non-finite coefficient in {0}")]
    NonFinite(String),
    #[error("variable index {0} out of range")]
    BadVariable(usize),
    #[error("iteration limit {0} reached")]
    IterationLimit(usize),
    #[error("numerical breakdown: {0}")]
    Numerical(String),
}
