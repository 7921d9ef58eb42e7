use serde::Serialize;

use super::solve::solve_penalized_values;
use crate::exec::ExecMode;
use crate::lattice::LatticeTree;
use crate::transport::{tree_superhedge_dp_values, TransportError};

#[derive(Clone, Debug, Serialize)]
pub struct DnRow {
    pub n: f64,
    pub value: f64,
    pub expected_drift: f64,
    pub gap_to_v0: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DnTable {
    pub v0: f64,
    pub rows: Vec<DnRow>,
    /// Values never increase with `n` (up to `tol`).
    pub monotone: bool,
    /// Every value is at least `V_0` (up to `tol`).
    pub above_v0: bool,
    /// Smallest `n` from which every later gap stays within `tol`.
    pub n_star: Option<f64>,
    /// Largest hedge ratio of the tree recursion; the penalty is exact, so
    /// `D(n) = V_0` for every `n` at or above it.
    pub hedge_bound: f64,
}

/// Penalized values `D(n)` for each `n` in `ns` (sorted ascending) against
/// the superhedging value `V_0` from the tree recursion. Leaf values must
/// lie in `[0, 1]`.
pub fn dn_convergence_experiment(
    tree: &LatticeTree,
    leaf_vals: &[f64],
    ns: &[f64],
    tol: f64,
    exec: ExecMode,
) -> Result<DnTable, TransportError> {
    let dp = tree_superhedge_dp_values(tree, leaf_vals)?;
    let v0 = dp.v0;
    let hedge_bound = dp.hedges.iter().flatten().flatten().fold(0.0f64, |m, h| m.max(h.abs()));
    let mut ns = ns.to_vec();
    ns.sort_by(f64::total_cmp);
    let solved = exec.map(&ns, |&n| solve_penalized_values(tree, leaf_vals, n));
    let mut rows = Vec::with_capacity(ns.len());
    for s in solved {
        let s = s?;
        rows.push(DnRow { n: s.n, value: s.value, expected_drift: s.expected_drift, gap_to_v0: s.value - v0 });
    }
    let monotone = rows.windows(2).all(|w| w[1].value <= w[0].value + tol);
    let above_v0 = rows.iter().all(|r| r.gap_to_v0 >= -tol);
    let mut n_star = None;
    for r in rows.iter().rev() {
        if r.gap_to_v0.abs() > tol {
            break;
        }
        n_star = Some(r.n);
    }
    Ok(DnTable { v0, rows, monotone, above_v0, n_star, hedge_bound })
}
