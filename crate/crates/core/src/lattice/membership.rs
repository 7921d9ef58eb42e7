use std::fmt;

use num_rational::BigRational;
use serde::Serialize;

use super::grid::{in_a, in_b};
use super::LatticePath;

/// First violated condition of lattice-path membership.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum MembershipFailure {
    NotAPartition { index: usize },
    MissingMarginalTime { i: usize },
    EmptyBlock { i: usize },
    NegativeValue { index: usize },
    MarginalValueOffGrid { i: usize, level: u32 },
    ValueOffGrid { index: usize, level: u32 },
    IncrementOffGrid { index: usize, level: u32 },
    LastIntervalMismatch { i: usize },
}

impl fmt::Display for MembershipFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NotAPartition { index } => write!(f, "partition breaks at index {index}"),
            Self::MissingMarginalTime { i } => write!(f, "marginal time t_{i} is not a partition point"),
            Self::EmptyBlock { i } => write!(f, "block {i} has no interior partition point"),
            Self::NegativeValue { index } => write!(f, "negative value at partition index {index}"),
            Self::MarginalValueOffGrid { i, level } => {
                write!(f, "value at t_{i} is off the level-{level} value grid")
            }
            Self::ValueOffGrid { index, level } => {
                write!(f, "value at partition index {index} is off the level-{level} value grid")
            }
            Self::IncrementOffGrid { index, level } => {
                write!(f, "time step ending at index {index} is off the level-{level} time grid")
            }
            Self::LastIntervalMismatch { i } => {
                write!(f, "last interval of block {i} does not carry the value at t_{}", i + 1)
            }
        }
    }
}

/// Checks that `p` belongs to the level-`n` lattice path space over the
/// marginal times `grid`.
///
/// Within block `i` (from `t_i` to `t_{i+1}`), the partition point at offset
/// `j >= 1` carries a value on `A^(n+j)` and is reached by a step in
/// `B^(n+j)`; the last interval before `t_{i+1}` already carries
/// `omega_{t_{i+1}}`, which lies on `A^(n)`.
pub fn check_membership(
    p: &LatticePath,
    grid: &[BigRational],
    n: u32,
) -> Result<(), MembershipFailure> {
    let dim = p.dim();
    let last = p.times.len() - 1;
    if p.times.is_empty() || p.values.len() != p.times.len() {
        return Err(MembershipFailure::NotAPartition { index: 0 });
    }
    for k in 1..p.times.len() {
        if p.times[k] <= p.times[k - 1] {
            return Err(MembershipFailure::NotAPartition { index: k });
        }
    }
    if p.times[0] != grid[0] || p.times[last] != *grid.last().unwrap() {
        return Err(MembershipFailure::NotAPartition { index: last });
    }
    if p.marginal_idx.len() != grid.len() {
        return Err(MembershipFailure::MissingMarginalTime { i: p.marginal_idx.len() });
    }
    for (i, (&k, t)) in p.marginal_idx.iter().zip(grid).enumerate() {
        if p.times.get(k) != Some(t) {
            return Err(MembershipFailure::MissingMarginalTime { i });
        }
    }
    for (index, v) in p.values.iter().enumerate() {
        if v.iter().any(|x| *x < 0.0) {
            return Err(MembershipFailure::NegativeValue { index });
        }
    }
    for (i, &k) in p.marginal_idx.iter().enumerate() {
        if !in_a(&p.values[k], n) {
            return Err(MembershipFailure::MarginalValueOffGrid { i, level: n });
        }
    }
    for i in 0..grid.len() - 1 {
        let (start, end) = (p.marginal_idx[i], p.marginal_idx[i + 1]);
        if end < start + 2 {
            return Err(MembershipFailure::EmptyBlock { i });
        }
        for k in start + 1..end {
            let level = n + (k - start) as u32;
            if !in_a(&p.values[k], level) {
                return Err(MembershipFailure::ValueOffGrid { index: k, level });
            }
            let dt = &p.times[k] - &p.times[k - 1];
            if !in_b(&dt, dim, level) {
                return Err(MembershipFailure::IncrementOffGrid { index: k, level });
            }
        }
        if p.values[end - 1] != p.values[end] {
            return Err(MembershipFailure::LastIntervalMismatch { i });
        }
    }
    Ok(())
}
