use serde::{Deserialize, Serialize};

use super::{DiscreteMeasure, MeasureError};

/// Undiscounted call quotes for one maturity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CallQuoteCurve {
    pub maturity: f64,
    pub strikes: Vec<f64>,
    pub prices: Vec<f64>,
    pub spot: f64,
}

const QUOTE_TOL: f64 = 1e-12;

/// `E[(X - K)^+]` for each strike of a one-dimensional measure.
pub fn call_prices(m: &DiscreteMeasure, strikes: &[f64]) -> Vec<f64> {
    strikes.iter().map(|&k| m.call_value(0, k)).collect()
}

/// Recovers the law whose call function is the piecewise-linear interpolant
/// of the quotes.
///
/// Atoms sit on the strikes; residual mass beyond the last strike is placed
/// in one tail atom so that the mean equals the spot.
pub fn marginals_from_calls(curve: &CallQuoteCurve) -> Result<DiscreteMeasure, MeasureError> {
    let CallQuoteCurve {
        strikes,
        prices,
        spot,
        ..
    } = curve;
    if strikes.is_empty() || strikes.len() != prices.len() {
        return Err(MeasureError::InvalidQuotes(format!(
            "{} strikes and {} prices",
            strikes.len(),
            prices.len()
        )));
    }
    if !spot.is_finite() || *spot < 0.0 {
        return Err(MeasureError::InvalidQuotes(format!("spot {spot}")));
    }
    if strikes.iter().chain(prices).any(|x| !x.is_finite()) {
        return Err(MeasureError::NonFinite);
    }
    if strikes[0] < 0.0 {
        return Err(MeasureError::InvalidQuotes(format!("negative strike {}", strikes[0])));
    }
    if let Some(w) = strikes.windows(2).find(|w| w[1] <= w[0]) {
        return Err(MeasureError::InvalidQuotes(format!(
            "strikes not increasing at {} -> {}",
            w[0], w[1]
        )));
    }
    if let Some(p) = prices.iter().find(|&&p| p < 0.0) {
        return Err(MeasureError::InvalidQuotes(format!("negative price {p}")));
    }
    let (mut knots, mut values) = (strikes.clone(), prices.clone());
    if strikes[0] > 0.0 {
        knots.insert(0, 0.0);
        values.insert(0, *spot);
    } else if (prices[0] - spot).abs() > 1e-9 * (1.0 + spot) {
        return Err(MeasureError::InvalidQuotes(format!(
            "price {} at strike 0 differs from spot {spot}",
            prices[0]
        )));
    }
    measure_from_call_knots(&knots, &values)
}

/// Measure whose call function interpolates `values` linearly between
/// `knots`, has slope -1 to the left of the first knot and, past the last
/// knot, keeps the last slope until it reaches zero.
///
/// Masses are slope increments; the first knot must lie at or left of the
/// intended support.
pub fn measure_from_call_knots(knots: &[f64], values: &[f64]) -> Result<DiscreteMeasure, MeasureError> {
    let n = knots.len();
    let mut slopes = Vec::with_capacity(n);
    slopes.push(-1.0);
    for j in 0..n.saturating_sub(1) {
        slopes.push((values[j + 1] - values[j]) / (knots[j + 1] - knots[j]));
    }
    let triple = |j: usize| {
        let a = knots[j.saturating_sub(1)];
        let c = knots[(j + 1).min(n - 1)];
        [a, knots[j], c]
    };
    // slopes[j] is the slope left of knot j
    for j in 1..slopes.len() {
        if slopes[j] > QUOTE_TOL {
            return Err(MeasureError::Arbitrage {
                strikes: triple(j - 1),
                reason: format!("price increases with slope {}", slopes[j]),
            });
        }
        if slopes[j] < slopes[j - 1] - QUOTE_TOL {
            return Err(MeasureError::Arbitrage {
                strikes: triple(j - 1),
                reason: format!("convexity fails: slope {} after {}", slopes[j], slopes[j - 1]),
            });
        }
    }
    let mut atoms: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    for j in 0..n - 1 {
        atoms.push((vec![knots[j]], (slopes[j + 1] - slopes[j]).max(0.0)));
    }
    let last = values[n - 1];
    let tail_slope = slopes[n - 1];
    if last > QUOTE_TOL {
        let p = -tail_slope;
        if p <= QUOTE_TOL {
            return Err(MeasureError::Arbitrage {
                strikes: triple(n - 1),
                reason: format!("flat positive price {last} beyond the last strike"),
            });
        }
        atoms.push((vec![knots[n - 1] + last / p], p));
    } else {
        atoms.push((vec![knots[n - 1]], (-tail_slope).max(0.0)));
    }
    DiscreteMeasure::from_atoms(1, atoms)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(strikes: &[f64], prices: &[f64], spot: f64) -> CallQuoteCurve {
        CallQuoteCurve {
            maturity: 1.0,
            strikes: strikes.to_vec(),
            prices: prices.to_vec(),
            spot,
        }
    }

    #[test]
    fn symmetric_split_recovered() {
        let m = marginals_from_calls(&curve(&[0.0, 1.0, 2.0], &[1.0, 0.5, 0.0], 1.0)).unwrap();
        assert_eq!(m, DiscreteMeasure::on_line(&[0.0, 2.0], &[0.5, 0.5]).unwrap());
    }

    #[test]
    fn zero_variance_curve_is_dirac() {
        let m = marginals_from_calls(&curve(&[0.0], &[1.5], 1.5)).unwrap();
        assert_eq!(m, DiscreteMeasure::dirac(vec![1.5]));
    }

    #[test]
    fn tail_atom_restores_mean() {
        let c = curve(&[1.0, 2.0], &[0.7, 0.3], 1.2);
        let m = marginals_from_calls(&c).unwrap();
        assert!((m.mean()[0] - 1.2).abs() < 1e-12);
        for (k, p) in c.strikes.iter().zip(&c.prices) {
            assert!((m.call_value(0, *k) - p).abs() < 1e-9);
        }
    }

    #[test]
    fn convexity_violation_names_triple() {
        let err = marginals_from_calls(&curve(&[0.0, 1.0, 2.0], &[1.0, 0.6, 0.0], 1.0)).unwrap_err();
        match err {
            MeasureError::Arbitrage { strikes, .. } => assert_eq!(strikes, [0.0, 1.0, 2.0]),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn increasing_prices_rejected() {
        assert!(marginals_from_calls(&curve(&[0.0, 1.0], &[1.0, 1.2], 1.0)).is_err());
    }
}
