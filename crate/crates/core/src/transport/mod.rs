//! Martingale optimal transport on finite supports and lattice trees:
//! primal solvers, dual certificates, pathwise verification, the tree
//! superhedging recursion, plan construction and stability sweeps.

mod bhr;
mod certificate;
mod construct;
mod dp;
mod freeze;
mod integral;
mod interval;
mod lattice_lp;
mod marginal;
mod plan;
mod stability;

pub use bhr::{bhr_residual, bhr_tail_hedge, tail_cost_bound};
pub use certificate::{
    adversarial_search, verify_superhedge, DualCertificate, DynamicLeg, PrefixEntry, StaticLeg, VerifyReport,
};
pub use construct::construct_plan;
pub use dp::{leaf_values, tree_superhedge_dp, tree_superhedge_dp_values, DpResult};
pub use freeze::{freeze_drift_bound, freeze_pushforward};
pub use integral::{riemann_stieltjes_sum, stochastic_integral, Strategy};
pub use interval::{price_interval, Arith, PriceInterval, SolverConfig};
pub use lattice_lp::{
    extract_dual_lattice, minimal_relaxation, project_peacock, solve_primal_lattice, LatticeSolution, MarginalMode,
};
pub use marginal::{extract_dual_d1, solve_primal_marginal, DualExtraction, MarginalSolution};
pub use plan::{PlanReport, TransportPlan};
pub use stability::{stability_sweep, StabilityReport, StabilityRow};

use crate::lattice::LatticeError;
use crate::lp::LpError;
use crate::measures::MeasureError;
use crate::pathspace::PathError;

/// Absolute tolerance for plan residuals and certificate checks.
pub const PLAN_TOL: f64 = 1e-8;

#[derive(Debug, thiserror::Error)]
pub enum TransportError {
    #[error("payoff is not a function of the marginal values")]
    NotMarginal,
    #[error("no martingale transport plan: {0}")]
    Infeasible(String),
    #[error("exact grid marginals are infeasible on this tree; smallest total W1 relaxation is {relaxation}")]
    LatticeInfeasible { relaxation: f64 },
    #[error("no martingale measure on tree")]
    NoMartingaleMeasure,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("invalid instance: {0}")]
    BadInstance(String),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Lp(#[from] LpError),
}
