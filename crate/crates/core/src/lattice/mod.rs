//! Dyadic time-space lattice: value and time grids, the discretization
//! stopping times, the lifting map onto lattice paths and finite trees of
//! lattice path prefixes.

mod discretize;
mod grid;
mod lift;
mod membership;
mod path;
mod tree;

pub use discretize::{discretize_times, Discretization};
pub use grid::{
    b_unit, grid_box, grid_coords, grid_project, grid_project_capped, in_a, in_b, rat, rat_to_f64, snap_below,
    unit_factor,
};
pub use lift::{lift, LiftOptions, Lifted};
pub use membership::{check_membership, MembershipFailure};
pub use path::LatticePath;
pub use tree::{enumerate_tree, LatticeParams, LatticeTree, NodeDump, TreeDump, TreeNode};

use crate::pathspace::PathError;

/// Default cap on discretization steps per path.
pub const DEFAULT_MAX_STEPS: usize = 1 << 14;

#[derive(Debug, thiserror::Error)]
pub enum LatticeError {
    #[error("lattice values must be nonnegative and finite, got {0}")]
    NegativeValue(f64),
    #[error("path norm {norm} exceeds the value cap {cap}; truncate first")]
    ExceedsCap { norm: f64, cap: f64 },
    #[error("resolution too coarse: time unit {unit} is not below the grid gap {gap}")]
    ResolutionTooCoarse { unit: f64, gap: f64 },
    #[error("discretization of block {block} exceeded {limit} steps")]
    StepLimit { block: usize, limit: usize },
    #[error("tree would have {attempted} nodes, budget is {budget}")]
    Budget { attempted: u128, budget: usize },
    #[error("invalid lattice parameters: {0}")]
    BadParams(String),
    #[error("not a lattice path: {0}")]
    NotMember(MembershipFailure),
    #[error(transparent)]
    Path(#[from] PathError),
}
