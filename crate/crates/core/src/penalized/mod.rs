//! Penalized approximate-martingale problem on lattice trees: expected
//! payoff minus `n` times the expected conditional drift, the drift
//! compensator of a tree measure and the sweep over penalty levels.

mod compensator;
mod experiment;
mod solve;

pub use compensator::{compensator, pathwise_expected_drift, Compensator};
pub use experiment::{dn_convergence_experiment, DnRow, DnTable};
pub use solve::{expected_drift, solve_penalized, solve_penalized_values, NodeDrift, PenalizedSolution};
