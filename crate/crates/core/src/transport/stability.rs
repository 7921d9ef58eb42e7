use serde::Serialize;

use super::interval::{price_interval, SolverConfig};
use super::TransportError;
use crate::exec::ExecMode;
use crate::measures::{perturb_peacock, Peacock, RepairStatus};
use crate::pathspace::Payoff;

#[derive(Clone, Debug, Serialize)]
pub struct StabilityRow {
    pub radius: f64,
    pub seed: u64,
    pub status: RepairStatus,
    pub w1_shift: f64,
    pub lower: f64,
    pub upper: f64,
    /// `max(upper - base upper, base lower - lower, 0)`.
    pub escape: f64,
    /// Hausdorff distance between the perturbed and base intervals.
    pub gap: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityReport {
    pub base_lower: f64,
    pub base_upper: f64,
    pub rows: Vec<StabilityRow>,
    /// `(radius, largest escape over seeds)`, radii in decreasing order.
    pub eps: Vec<(f64, f64)>,
    /// Escapes never grow as the radius shrinks, up to `tol`.
    pub monotone: bool,
}

/// Prices randomly perturbed copies of `p` and reports how far the price
/// interval escapes the unperturbed one. Rejected perturbations are kept as
/// rows with `NaN` prices and ignored by the summary.
pub fn stability_sweep(
    p: &Peacock,
    xi: &Payoff,
    cfg: &SolverConfig,
    radii: &[f64],
    seeds: &[u64],
    tol: f64,
    exec: ExecMode,
) -> Result<StabilityReport, TransportError> {
    let base = price_interval(p, xi, cfg)?;
    let jobs: Vec<(f64, u64)> = radii.iter().flat_map(|&r| seeds.iter().map(move |&s| (r, s))).collect();
    let rows = exec.map(&jobs, |&(radius, seed)| -> Result<StabilityRow, TransportError> {
        let out = perturb_peacock(p, radius, seed)?;
        let Some(q) = out.peacock else {
            return Ok(StabilityRow {
                radius,
                seed,
                status: out.status,
                w1_shift: f64::NAN,
                lower: f64::NAN,
                upper: f64::NAN,
                escape: f64::NAN,
                gap: f64::NAN,
            });
        };
        let iv = price_interval(&q, xi, cfg)?;
        Ok(StabilityRow {
            radius,
            seed,
            status: out.status,
            w1_shift: out.w1_shift,
            lower: iv.lower,
            upper: iv.upper,
            escape: (iv.upper - base.upper).max(base.lower - iv.lower).max(0.0),
            gap: (iv.upper - base.upper).abs().max((iv.lower - base.lower).abs()),
        })
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut sorted: Vec<f64> = radii.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    sorted.dedup();
    let eps: Vec<(f64, f64)> = sorted
        .iter()
        .map(|&r| {
            let e = rows
                .iter()
                .filter(|row| row.radius == r && row.escape.is_finite())
                .map(|row| row.escape)
                .fold(0.0, f64::max);
            (r, e)
        })
        .collect();
    let monotone = eps.windows(2).all(|w| w[1].1 <= w[0].1 + tol);
    Ok(StabilityReport { base_lower: base.lower, base_upper: base.upper, rows, eps, monotone })
}
