use super::plan::TransportPlan;
use super::TransportError;
use crate::pathspace::{apply_time_change, Payoff, ShiftVector, TimeChange, TimeGrid};

/// Pushes every support path through the time change `f_eps`, which holds
/// the value reached at `t_{i-1}` until `t_{i-1} + eps_i` and fixes every
/// grid time.
pub fn freeze_pushforward(
    plan: &TransportPlan,
    grid: &TimeGrid,
    eps: &ShiftVector,
) -> Result<TransportPlan, TransportError> {
    let f = TimeChange::forward(grid, eps);
    Ok(TransportPlan {
        times: plan.times.clone(),
        support: plan.support.iter().map(|w| apply_time_change(w, &f)).collect(),
        probs: plan.probs.clone(),
    })
}

/// Payoff drift between a plan and its frozen image together with the
/// modulus bound `L |eps| (1 + (m + 2) E|X_1|)`; `None` for payoffs without
/// a declared modulus.
pub fn freeze_drift_bound(
    plan: &TransportPlan,
    grid: &TimeGrid,
    eps: &ShiftVector,
    xi: &Payoff,
) -> Result<Option<(f64, f64)>, TransportError> {
    let Some(slope) = xi.shift_modulus(grid) else { return Ok(None) };
    let frozen = freeze_pushforward(plan, grid, eps)?;
    let base = plan.expect(|w| Ok(xi.eval(w)?))?;
    let moved = frozen.expect(|w| Ok(xi.eval(w)?))?;
    let e_abs = plan.expect(|w| Ok(crate::pathspace::euclid(w.value_at(1.0))))?;
    let m = grid.intervals() as f64;
    Ok(Some(((base - moved).abs(), slope * eps.norm() * (1.0 + (m + 2.0) * e_abs))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan() -> TransportPlan {
        let tuples = vec![
            vec![vec![1.0], vec![0.5], vec![0.0]],
            vec![vec![1.0], vec![0.5], vec![1.0]],
            vec![vec![1.0], vec![1.5], vec![1.0]],
            vec![vec![1.0], vec![1.5], vec![2.0]],
        ];
        TransportPlan::from_tuples_with_offsets(&[0.0, 0.5, 1.0], &tuples, vec![0.25; 4], Some(&[0.3, 0.6])).unwrap()
    }

    #[test]
    fn zero_shift_is_identity() {
        let g = TimeGrid::new(vec![0.0, 0.5, 1.0]).unwrap();
        let f = freeze_pushforward(&plan(), &g, &ShiftVector::zero(&g)).unwrap();
        for (a, b) in f.support.iter().zip(&plan().support) {
            assert_eq!(a.jumps(), b.jumps());
        }
    }

    #[test]
    fn marginals_and_martingale_kept() {
        let g = TimeGrid::new(vec![0.0, 0.5, 1.0]).unwrap();
        let eps = ShiftVector::new(vec![0.1, 0.2], &g).unwrap();
        let f = freeze_pushforward(&plan(), &g, &eps).unwrap();
        for t in g.times() {
            assert_eq!(f.law_at(*t).unwrap(), plan().law_at(*t).unwrap());
        }
        assert_eq!(f.martingale_residual(), 0.0);
        let (drift, bound) = freeze_drift_bound(&plan(), &g, &eps, &Payoff::Asian { coord: None }).unwrap().unwrap();
        assert!(drift > 0.0 && drift <= bound);
    }
}
