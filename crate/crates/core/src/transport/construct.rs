use super::plan::TransportPlan;
use super::TransportError;
use crate::lp::{self, LpStatus, VarId};
use crate::measures::{strassen_lp, DiscreteMeasure, Peacock};
use crate::pathspace::dist;

/// Transition kernel of the one-step coupling moving the least expected
/// distance among martingale couplings of `mu` and `nu`.
fn one_step(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<Option<Vec<Vec<f64>>>, TransportError> {
    let m = nu.len();
    let mut model = strassen_lp::<f64>(mu, nu);
    let objective = mu
        .points()
        .iter()
        .enumerate()
        .flat_map(|(i, x)| nu.points().iter().enumerate().map(move |(j, y)| (VarId(i * m + j), dist(x, y))))
        .collect();
    model.set_objective(objective);
    let sol = lp::solve(&model)?;
    if sol.status != LpStatus::Optimal {
        return Ok(None);
    }
    Ok(Some(
        mu.weights()
            .iter()
            .enumerate()
            .map(|(i, w)| (0..m).map(|j| (sol.x[i * m + j] / w).max(0.0)).collect())
            .collect(),
    ))
}

/// Markov martingale plan chaining, for each consecutive pair of marginals,
/// the martingale coupling of least expected displacement.
pub fn construct_plan(p: &Peacock) -> Result<TransportPlan, TransportError> {
    if p.laws().iter().all(|l| l.len() == 1) {
        let tuple: Vec<Vec<f64>> = p.laws().iter().map(|l| l.points()[0].clone()).collect();
        return TransportPlan::from_tuples(p.times(), &[tuple], vec![1.0]);
    }
    let mut kernels = Vec::with_capacity(p.len() - 1);
    for k in 1..p.len() {
        let kernel = one_step(p.law(k - 1), p.law(k))?.ok_or_else(|| {
            TransportError::Infeasible(format!(
                "no martingale coupling between times {} and {}",
                p.times()[k - 1],
                p.times()[k]
            ))
        })?;
        kernels.push(kernel);
    }
    let mut frontier: Vec<(Vec<usize>, f64)> =
        p.first().weights().iter().enumerate().map(|(i, w)| (vec![i], *w)).collect();
    for kernel in &kernels {
        let mut next = Vec::new();
        for (idx, mass) in frontier {
            let last = *idx.last().unwrap();
            for (j, q) in kernel[last].iter().enumerate() {
                if *q > 1e-15 {
                    let mut t = idx.clone();
                    t.push(j);
                    next.push((t, mass * q));
                }
            }
        }
        frontier = next;
    }
    let total: f64 = frontier.iter().map(|f| f.1).sum();
    let tuples: Vec<Vec<Vec<f64>>> = frontier
        .iter()
        .map(|(idx, _)| idx.iter().enumerate().map(|(i, &k)| p.law(i).points()[k].clone()).collect())
        .collect();
    let probs = frontier.iter().map(|f| f.1 / total).collect();
    TransportPlan::from_tuples(p.times(), &tuples, probs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forced_split() {
        let p = Peacock::new(
            vec![0.0, 1.0],
            vec![DiscreteMeasure::dirac(vec![1.0]), DiscreteMeasure::on_line(&[0.0, 2.0], &[0.5, 0.5]).unwrap()],
        )
        .unwrap();
        let plan = construct_plan(&p).unwrap();
        assert_eq!(plan.len(), 2);
        assert!(plan.report(&p).unwrap().passes(1e-9, 0.0));
    }

    #[test]
    fn constant_peacock_stays_put() {
        let law = DiscreteMeasure::on_line(&[0.5, 1.5], &[0.5, 0.5]).unwrap();
        let p = Peacock::new(vec![0.0, 0.5, 1.0], vec![law.clone(), law.clone(), law]).unwrap();
        let plan = construct_plan(&p).unwrap();
        assert_eq!(plan.len(), 2);
        assert!(plan.support.iter().all(|w| w.jumps().is_empty()));
    }
}
