//! Finitely supported marginal laws and the operations on them.

mod calls;
mod discrete;
mod order;
mod peacock;
mod perturb;
mod wasserstein;

pub use calls::{call_prices, marginals_from_calls, measure_from_call_knots, CallQuoteCurve};
pub use discrete::DiscreteMeasure;
pub use order::{check_convex_order, strassen_feasible, strassen_lp, OrderCertificate, OrderWitness};
pub use peacock::{close_peacock, Peacock};
pub use perturb::{perturb_in_w1, perturb_peacock, PerturbOutcome, RepairStatus};
pub use wasserstein::w1_distance;

use crate::lp::LpError;

/// Weight sums must match 1 to this precision.
pub const WEIGHT_TOL: f64 = 1e-12;
/// Barycenters are compared to this precision.
pub const MEAN_TOL: f64 = 1e-10;
/// Call-function comparisons in the one-dimensional order test.
pub const ORDER_TOL: f64 = 1e-10;

#[derive(Debug, thiserror::Error)]
pub enum MeasureError {
    #[error("measure has no atoms")]
    Empty,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite coordinate or weight")]
    NonFinite,
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("duplicate support point {0:?}")]
    DuplicatePoint(Vec<f64>),
    #[error("arbitrage in quotes at strikes ({}, {}, {}): {reason}", .strikes[0], .strikes[1], .strikes[2])]
    Arbitrage { strikes: [f64; 3], reason: String },
    #[error("invalid quote curve: {0}")]
    InvalidQuotes(String),
    #[error("invalid time grid: {0}")]
    InvalidTimes(String),
    #[error("laws at times {s} and {t} are not in convex order: {witness}")]
    NotPeacock { s: f64, t: f64, witness: OrderWitness },
    #[error("query time {0} lies beyond the last listed time")]
    QueryOutOfRange(f64),
    #[error("negative radius {0}")]
    NegativeRadius(f64),
    #[error(transparent)]
    Lp(#[from] LpError),
}
