use super::certificate::{DualCertificate, DynamicLeg, StaticLeg};
use super::TransportError;
use crate::lp::Sense;
use crate::measures::DiscreteMeasure;
use crate::pathspace::{Normalization, StepPath};
use crate::scalar::Scalar;

/// Superhedge of `1{ sup_t X_t[coord] >= R }` on nonnegative paths: hold
/// `(X_1[coord] - K)^+ / (R - K)` calls and go short `1 / (R - K)` units
/// once the coordinate first reaches `R`.
pub fn bhr_tail_hedge(radius: f64, strike: f64, coord: usize, dim: usize) -> Result<DualCertificate, TransportError> {
    if !(strike > 0.0 && strike < radius) || !radius.is_finite() {
        return Err(TransportError::BadInstance(format!("need 0 < K < R, got K = {strike}, R = {radius}")));
    }
    if coord >= dim {
        return Err(TransportError::BadInstance(format!("coordinate {coord} out of range")));
    }
    let units = 1.0 / (radius - strike);
    Ok(DualCertificate {
        sense: Sense::Maximize,
        dim,
        static_legs: vec![StaticLeg::Call { time: 1.0, coord, strike, units }],
        dynamic: DynamicLeg::FirstHit { coord, level: radius, units: -units },
        normalization: Normalization::IDENTITY,
    })
}

/// Residual of the tail hedge against the indicator, in the arithmetic `S`.
///
/// Every float is converted exactly, so with rationals the residual is the
/// exact value for the path as given.
pub fn bhr_residual<S: Scalar>(radius: f64, strike: f64, coord: usize, w: &StepPath) -> S {
    let r = S::from_f64(radius);
    let k = S::from_f64(strike);
    let denom = r.clone() - k.clone();
    let x1 = S::from_f64(w.value_at(1.0)[coord]);
    let call = (x1.clone() - k).positive_part() / denom.clone();
    let first = std::iter::once(w.t0_value()).chain(w.jumps().iter().map(|j| j.value.as_slice()));
    let hit = first.map(|v| S::from_f64(v[coord])).find(|v| *v >= r);
    match hit {
        // short from the hitting value down to the terminal value
        Some(x_hit) => call + (x_hit - x1) / denom - S::one(),
        None => call,
    }
}

/// `(1 / (R - K)) E_mu[(x[coord] - K)^+]` summed over coordinates, the cost
/// of hedging every coordinate's tail.
pub fn tail_cost_bound(terminal: &DiscreteMeasure, radius: f64, strike: f64) -> f64 {
    (0..terminal.dim())
        .map(|c| terminal.call_value(c, strike) / (radius - strike))
        .sum()
}
