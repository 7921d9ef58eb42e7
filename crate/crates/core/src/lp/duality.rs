use super::model::{LinearProgram, Relation, Sense};
use super::simplex::LpSolution;
use crate::scalar::Scalar;

/// Outcome of [`strong_duality_check`]. All quantities are absolute and
/// converted to `f64`; in exact mode they are exactly zero for a correct pair.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct DualityReport {
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub gap: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub complementarity: f64,
    pub rhs_norm: f64,
}

impl DualityReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.primal_residual <= tol * (1.0 + self.rhs_norm)
            && self.dual_residual <= tol
            && self.gap <= tol * (1.0 + self.primal_objective.abs())
            && self.complementarity <= tol * (1.0 + self.primal_objective.abs())
    }
}

/// Largest violation of rows and bounds at `x`.
pub(crate) fn primal_residual<S: Scalar>(lp: &LinearProgram<S>, x: &[S]) -> f64 {
    let mut worst = S::zero();
    for (i, c) in lp.constraints.iter().enumerate() {
        let r = lp.row_activity(i, x) - c.rhs.clone();
        let viol = match c.relation {
            Relation::Le => r.positive_part(),
            Relation::Ge => (-r).positive_part(),
            Relation::Eq => r.abs(),
        };
        worst = S::max_of(worst, viol);
    }
    for (v, xj) in lp.variables.iter().zip(x) {
        if let Some(l) = &v.lower {
            worst = S::max_of(worst, (l.clone() - xj.clone()).positive_part());
        }
        if let Some(u) = &v.upper {
            worst = S::max_of(worst, (xj.clone() - u.clone()).positive_part());
        }
    }
    worst.to_f64()
}

/// Dual objective of the bounded-variable dual at multipliers `y`, together
/// with the largest dual sign violation.
///
/// For a maximization every sign-feasible `y` yields an upper bound on the
/// primal value; for a minimization a lower bound.
pub fn dual_objective<S: Scalar>(lp: &LinearProgram<S>, y: &[S]) -> (S, S) {
    let maximize = lp.sense == Sense::Maximize;
    let mut value = S::zero();
    let mut viol = S::zero();
    for (c, yi) in lp.constraints.iter().zip(y) {
        value = value + yi.clone() * c.rhs.clone();
        let wrong = match (c.relation, maximize) {
            (Relation::Le, true) | (Relation::Ge, false) => (-yi.clone()).positive_part(),
            (Relation::Ge, true) | (Relation::Le, false) => yi.positive_part(),
            (Relation::Eq, _) => S::zero(),
        };
        viol = S::max_of(viol, wrong);
    }
    let d = reduced_costs(lp, y);
    for (v, dj) in lp.variables.iter().zip(&d) {
        // bound that attains sup (max) or inf (min) of d_j * x_j
        let use_upper = (dj.is_pos() && maximize) || (dj.is_neg() && !maximize);
        let use_lower = (dj.is_neg() && maximize) || (dj.is_pos() && !maximize);
        let bound = if use_upper {
            v.upper.as_ref()
        } else if use_lower {
            v.lower.as_ref()
        } else {
            None
        };
        match bound {
            Some(b) => value = value + dj.clone() * b.clone(),
            None if use_upper || use_lower => viol = S::max_of(viol, dj.abs()),
            None => {
                // negligible reduced cost: contributes at whichever bound is finite
                if let Some(b) = v.lower.as_ref().or(v.upper.as_ref()) {
                    value = value + dj.clone() * b.clone();
                } else {
                    viol = S::max_of(viol, dj.abs());
                }
            }
        }
    }
    (value, viol)
}

fn reduced_costs<S: Scalar>(lp: &LinearProgram<S>, y: &[S]) -> Vec<S> {
    let mut d = lp.objective_dense();
    for (c, yi) in lp.constraints.iter().zip(y) {
        if yi.is_zero() {
            continue;
        }
        for (j, a) in &c.coeffs {
            d[*j] = d[*j].clone() - yi.clone() * a.clone();
        }
    }
    d
}

/// Recomputes both objectives, residuals and complementary slackness for an
/// optimal solution.
pub fn strong_duality_check<S: Scalar>(lp: &LinearProgram<S>, sol: &LpSolution<S>) -> DualityReport {
    let rhs_norm = lp
        .constraints
        .iter()
        .map(|c| c.rhs.to_f64().abs())
        .fold(0.0, f64::max);
    let primal = lp.objective_value(&sol.x);
    let (dual, dual_viol) = dual_objective(lp, &sol.duals);
    let mut comp = S::zero();
    for (i, (c, yi)) in lp.constraints.iter().zip(&sol.duals).enumerate() {
        let slack = (lp.row_activity(i, &sol.x) - c.rhs.clone()).abs();
        comp = S::max_of(comp, yi.abs() * slack);
    }
    let d = reduced_costs(lp, &sol.duals);
    for ((v, dj), xj) in lp.variables.iter().zip(&d).zip(&sol.x) {
        if dj.is_zero() {
            continue;
        }
        let dist_l = v.lower.as_ref().map(|l| (xj.clone() - l.clone()).abs());
        let dist_u = v.upper.as_ref().map(|u| (u.clone() - xj.clone()).abs());
        let dist = match (dist_l, dist_u) {
            (Some(a), Some(b)) => S::min_of(a, b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => S::one(),
        };
        comp = S::max_of(comp, dj.abs() * dist);
    }
    DualityReport {
        primal_objective: primal.to_f64(),
        dual_objective: dual.to_f64(),
        gap: (primal - dual).abs().to_f64(),
        primal_residual: primal_residual(lp, &sol.x),
        dual_residual: dual_viol.to_f64(),
        complementarity: comp.to_f64(),
        rhs_norm,
    }
}

/// Checks a Farkas certificate: returns `y.b - max_{x in bounds} (y^T A) x`,
/// which is positive exactly when `y` proves infeasibility. Sign-infeasible
/// multipliers or an unbounded box maximum give `-inf`.
pub fn verify_farkas<S: Scalar>(lp: &LinearProgram<S>, y: &[S]) -> f64 {
    let tol = if S::EXACT { S::zero() } else { S::from_f64(1e-9) };
    let mut yb = S::zero();
    let mut g = vec![S::zero(); lp.num_vars()];
    for (c, yi) in lp.constraints.iter().zip(y) {
        let sign_ok = match c.relation {
            Relation::Le => *yi <= tol,
            Relation::Ge => *yi >= -tol.clone(),
            Relation::Eq => true,
        };
        if !sign_ok {
            return f64::NEG_INFINITY;
        }
        yb = yb + yi.clone() * c.rhs.clone();
        for (j, a) in &c.coeffs {
            g[*j] = g[*j].clone() + yi.clone() * a.clone();
        }
    }
    let mut box_max = S::zero();
    for (v, gj) in lp.variables.iter().zip(&g) {
        if gj.abs() <= tol {
            continue;
        }
        let bound = if *gj > S::zero() { &v.upper } else { &v.lower };
        match bound {
            Some(b) => box_max = box_max + gj.clone() * b.clone(),
            None => return f64::NEG_INFINITY,
        }
    }
    (yb - box_max).to_f64()
}
