use std::fmt;

use serde::Serialize;

use super::{DiscreteMeasure, MeasureError, MEAN_TOL, ORDER_TOL};
use crate::lp::{self, LinearProgram, LpError, LpStatus, Relation, Sense};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum OrderWitness {
    /// Barycenters differ in coordinate `coord`.
    Mean { coord: usize, lhs: f64, rhs: f64 },
    /// `E_mu[(X-K)^+] > E_nu[(X-K)^+]` at this strike.
    CallStrike { strike: f64, lhs: f64, rhs: f64 },
    /// The martingale coupling LP is infeasible; `margin` is the positive
    /// gap of its Farkas certificate.
    StrassenInfeasible { margin: f64 },
}

impl fmt::Display for OrderWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Mean { coord, lhs, rhs } => {
                write!(f, "means differ in coordinate {coord}: {lhs} vs {rhs}")
            }
            Self::CallStrike { strike, lhs, rhs } => {
                write!(f, "call value at strike {strike} drops from {lhs} to {rhs}")
            }
            Self::StrassenInfeasible { margin } => {
                write!(f, "no martingale coupling exists (Farkas margin {margin})")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum OrderCertificate {
    Holds,
    Violated(OrderWitness),
}

impl OrderCertificate {
    pub fn holds(&self) -> bool {
        matches!(self, Self::Holds)
    }
}

/// Decides `mu <= nu` in convex order.
///
/// In one dimension potential functions are piecewise linear with kinks on
/// the supports, so comparing means and call values at the union of both
/// supports is exact. In higher dimensions the martingale coupling LP is
/// solved instead.
pub fn check_convex_order(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
) -> Result<OrderCertificate, MeasureError> {
    mu.check_dim(nu)?;
    let (m1, m2) = (mu.mean(), nu.mean());
    for (coord, (a, b)) in m1.iter().zip(&m2).enumerate() {
        if (a - b).abs() > MEAN_TOL {
            return Ok(OrderCertificate::Violated(OrderWitness::Mean {
                coord,
                lhs: *a,
                rhs: *b,
            }));
        }
    }
    if mu.dim() == 1 {
        let mut strikes: Vec<f64> = mu.line_points();
        strikes.extend(nu.line_points());
        strikes.sort_by(f64::total_cmp);
        strikes.dedup();
        for k in strikes {
            let (lhs, rhs) = (mu.call_value(0, k), nu.call_value(0, k));
            if lhs > rhs + ORDER_TOL {
                return Ok(OrderCertificate::Violated(OrderWitness::CallStrike {
                    strike: k,
                    lhs,
                    rhs,
                }));
            }
        }
        return Ok(OrderCertificate::Holds);
    }
    let model = strassen_lp::<f64>(mu, nu);
    let sol = lp::solve(&model)?;
    Ok(match sol.status {
        LpStatus::Infeasible => {
            let margin = sol
                .farkas
                .as_ref()
                .map_or(f64::NAN, |y| lp::verify_farkas(&model, y));
            OrderCertificate::Violated(OrderWitness::StrassenInfeasible { margin })
        }
        _ => OrderCertificate::Holds,
    })
}

/// Feasibility LP for a one-step martingale coupling of `mu` and `nu`.
///
/// Variable `i * nu.len() + j` is the mass moved from `mu`'s atom `i` to
/// `nu`'s atom `j`. Rows: `mu` marginals, `nu` marginals, then one
/// barycenter row per (`mu` atom, coordinate).
pub fn strassen_lp<S: Scalar>(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> LinearProgram<S> {
    let (n, m) = (mu.len(), nu.len());
    let mut model = LinearProgram::new(Sense::Minimize);
    let vars: Vec<_> = (0..n * m).map(|k| model.add_nonneg(format!("pi{k}"))).collect();
    for (i, (_, w)) in mu.atoms().enumerate() {
        let row = (0..m).map(|j| (vars[i * m + j], S::one())).collect();
        model.add_constraint(format!("mu{i}"), row, Relation::Eq, S::from_data(w));
    }
    for (j, (_, w)) in nu.atoms().enumerate() {
        let row = (0..n).map(|i| (vars[i * m + j], S::one())).collect();
        model.add_constraint(format!("nu{j}"), row, Relation::Eq, S::from_data(w));
    }
    for (i, (x, _)) in mu.atoms().enumerate() {
        for k in 0..mu.dim() {
            let row = nu
                .atoms()
                .enumerate()
                .map(|(j, (y, _))| (vars[i * m + j], S::from_data(y[k]) - S::from_data(x[k])))
                .collect();
            model.add_constraint(format!("bary{i}_{k}"), row, Relation::Eq, S::zero());
        }
    }
    model
}

/// Solves [`strassen_lp`] in the chosen arithmetic and reports feasibility.
pub fn strassen_feasible<S: Scalar>(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<bool, LpError> {
    let sol = lp::solve(&strassen_lp::<S>(mu, nu))?;
    Ok(sol.status == LpStatus::Optimal)
}
