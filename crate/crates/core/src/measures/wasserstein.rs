use super::{DiscreteMeasure, MeasureError};
use crate::lp::{self, LinearProgram, LpStatus, Relation, Sense};

/// Wasserstein-1 distance with Euclidean ground cost.
///
/// One-dimensional inputs use `int |F_mu - F_nu| dx`, which equals the
/// quantile-coupling cost. Otherwise the transport LP is solved.
pub fn w1_distance(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<f64, MeasureError> {
    mu.check_dim(nu)?;
    if mu.dim() == 1 {
        return Ok(w1_line(mu, nu));
    }
    let (n, m) = (mu.len(), nu.len());
    let mut model = LinearProgram::<f64>::new(Sense::Minimize);
    let vars: Vec<_> = (0..n * m).map(|k| model.add_nonneg(format!("g{k}"))).collect();
    for (i, (_, w)) in mu.atoms().enumerate() {
        let row = (0..m).map(|j| (vars[i * m + j], 1.0)).collect();
        model.add_constraint(format!("mu{i}"), row, Relation::Eq, w);
    }
    for (j, (_, w)) in nu.atoms().enumerate() {
        let row = (0..n).map(|i| (vars[i * m + j], 1.0)).collect();
        model.add_constraint(format!("nu{j}"), row, Relation::Eq, w);
    }
    let mut cost = Vec::with_capacity(n * m);
    for (i, (x, _)) in mu.atoms().enumerate() {
        for (j, (y, _)) in nu.atoms().enumerate() {
            let d = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            cost.push((vars[i * m + j], d));
        }
    }
    model.set_objective(cost);
    let sol = lp::solve(&model)?;
    debug_assert_eq!(sol.status, LpStatus::Optimal);
    Ok(sol.objective.max(0.0))
}

fn w1_line(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
    // Merge the sorted supports and integrate |F_mu - F_nu| between breakpoints.
    let (a, b) = (mu.points(), nu.points());
    let (wa, wb) = (mu.weights(), nu.weights());
    let (mut i, mut j) = (0, 0);
    let (mut fa, mut fb) = (0.0f64, 0.0f64);
    let mut prev: Option<f64> = None;
    let mut total = 0.0;
    while i < a.len() || j < b.len() {
        let x = match (a.get(i), b.get(j)) {
            (Some(p), Some(q)) => p[0].min(q[0]),
            (Some(p), None) => p[0],
            (None, Some(q)) => q[0],
            (None, None) => unreachable!(),
        };
        if let Some(p) = prev {
            total += (fa - fb).abs() * (x - p);
        }
        while i < a.len() && a[i][0] == x {
            fa += wa[i];
            i += 1;
        }
        while j < b.len() && b[j][0] == x {
            fb += wb[j];
            j += 1;
        }
        prev = Some(x);
    }
    total
}
