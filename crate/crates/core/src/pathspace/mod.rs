//! Piecewise-constant càdlàg paths on `[0, 1]` and the operations on them:
//! payoffs, time changes, the Skorokhod-type metric and fixture families.

mod fixtures;
mod path;
mod payoff;
mod shift;
mod skorokhod;

pub use fixtures::{closeness, example_fixture, sko_stopo, sko_stopo_family, WeightedPaths};
pub use path::{dist, euclid, Jump, StepPath};
pub use payoff::{chi, MarginalFn, Normalization, Payoff, TableRow};
pub use shift::{apply_time_change, dilate, ShiftVector, TimeChange, TimeGrid};
pub use skorokhod::{j1_distance, rho_t};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PathError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite path value or time")]
    NonFinite,
    #[error("jump times must increase strictly within (0, {horizon}]; got {t}")]
    BadJumpTime { t: f64, horizon: f64 },
    #[error("invalid time grid: {0}")]
    BadGrid(String),
    #[error("shift norm {norm} is not below the smallest grid gap {gap}")]
    ShiftTooLarge { norm: f64, gap: f64 },
    #[error("invalid shift: {0}")]
    BadShift(String),
    #[error("payoff evaluation failed: {0}")]
    Payoff(String),
    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),
    #[error("invalid parameter: {0}")]
    BadParameter(String),
}
