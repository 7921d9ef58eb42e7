use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::certificate::DualCertificate;
use super::lattice_lp::{extract_dual_lattice, solve_primal_lattice, MarginalMode};
use super::marginal::{extract_dual_d1, solve_primal_marginal};
use super::plan::TransportPlan;
use super::TransportError;
use crate::lattice::{enumerate_tree, LatticeParams};
use crate::lp::Sense;
use crate::measures::Peacock;
use crate::pathspace::Payoff;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arith {
    Float,
    Rational,
}

/// Which primal problem prices the payoff.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "solver", rename_all = "snake_case")]
pub enum SolverConfig {
    /// Joint laws of the marginal values; payoff must be marginal.
    Marginal { arith: Arith },
    /// Martingale measures on a lattice tree.
    Lattice { params: LatticeParams, mode: MarginalMode },
}

/// `[inf, sup]` of `E[xi]` over calibrated martingale models.
#[derive(Clone, Debug, Serialize)]
pub struct PriceInterval {
    pub lower: f64,
    pub upper: f64,
    pub solver: SolverConfig,
    /// Summed W1 distance of the optimal laws to the marginals, per bound.
    pub relaxation: (f64, f64),
    pub lower_plan: TransportPlan,
    pub upper_plan: TransportPlan,
    pub lower_certificate: DualCertificate,
    pub upper_certificate: DualCertificate,
}

struct Bound {
    value: f64,
    relaxation: f64,
    plan: TransportPlan,
    cert: DualCertificate,
}

fn marginal_bound<S: Scalar>(p: &Peacock, xi: &Payoff, sense: Sense) -> Result<Bound, TransportError> {
    let sol = solve_primal_marginal::<S>(p, xi, sense)?;
    let ex = extract_dual_d1(&sol)?;
    Ok(Bound { value: sol.value_f64(), relaxation: 0.0, plan: sol.plan, cert: ex.certificate })
}

/// Solves both senses with the configured solver and attaches plans and
/// certificates.
pub fn price_interval(p: &Peacock, xi: &Payoff, cfg: &SolverConfig) -> Result<PriceInterval, TransportError> {
    let bound = |sense: Sense| -> Result<Bound, TransportError> {
        match cfg {
            SolverConfig::Marginal { arith: Arith::Float } => marginal_bound::<f64>(p, xi, sense),
            SolverConfig::Marginal { arith: Arith::Rational } => marginal_bound::<BigRational>(p, xi, sense),
            SolverConfig::Lattice { params, mode } => {
                let tree = enumerate_tree(params)?;
                let sol = solve_primal_lattice(p, xi, &tree, *mode, sense)?;
                let cert = extract_dual_lattice(&sol, &tree)?;
                Ok(Bound {
                    value: sol.value,
                    relaxation: sol.marginal_w1.iter().sum(),
                    plan: sol.plan,
                    cert,
                })
            }
        }
    };
    let hi = bound(Sense::Maximize)?;
    let lo = bound(Sense::Minimize)?;
    Ok(PriceInterval {
        lower: lo.value,
        upper: hi.value,
        solver: cfg.clone(),
        relaxation: (lo.relaxation, hi.relaxation),
        lower_plan: lo.plan,
        upper_plan: hi.plan,
        lower_certificate: lo.cert,
        upper_certificate: hi.cert,
    })
}
