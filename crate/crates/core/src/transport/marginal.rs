use super::certificate::{DualCertificate, DynamicLeg, PrefixEntry, StaticLeg};
use super::plan::TransportPlan;
use super::TransportError;
use crate::lp::{self, strong_duality_check, DualityReport, LinearProgram, LpSolution, LpStatus, Relation, Sense};
use crate::measures::{check_convex_order, OrderCertificate, Peacock};
use crate::pathspace::{Normalization, Payoff};
use crate::scalar::Scalar;

/// Optimal multi-marginal martingale transport on the product of supports.
#[derive(Clone, Debug)]
pub struct MarginalSolution<S> {
    pub sense: Sense,
    /// Optimal value in payoff units.
    pub value: S,
    pub times: Vec<f64>,
    pub supports: Vec<Vec<Vec<f64>>>,
    /// Support indices of every tuple, in lexicographic order.
    pub tuples: Vec<Vec<usize>>,
    pub probs: Vec<S>,
    pub payoffs: Vec<f64>,
    pub plan: TransportPlan,
    pub normalization: Normalization,
    pub lp: LinearProgram<S>,
    pub lp_solution: LpSolution<S>,
    weights: Vec<Vec<S>>,
    marginal_rows: Vec<Vec<usize>>,
    /// `(length, prefix indices, first row or None when trivially zero)`.
    prefix_rows: Vec<(Vec<usize>, Option<usize>)>,
}

/// Certificate read off the optimal duals.
#[derive(Clone, Debug)]
pub struct DualExtraction<S> {
    pub certificate: DualCertificate,
    /// `sum_i mu_i(lambda_i)` in the solver's arithmetic.
    pub cost: S,
    /// Smallest hedging residual over the support tuples, in the solver's
    /// arithmetic.
    pub min_support_residual: S,
}

fn odometer(sizes: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = sizes.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut cur = vec![0usize; sizes.len()];
    for _ in 0..total {
        out.push(cur.clone());
        for k in (0..sizes.len()).rev() {
            cur[k] += 1;
            if cur[k] < sizes[k] {
                break;
            }
            cur[k] = 0;
        }
    }
    out
}

/// Maximizes or minimizes `E[xi]` over martingale laws of
/// `(X_{t_0}, ..., X_{t_m})` with the given marginals.
///
/// Variables are tuple probabilities. Each marginal contributes one row per
/// atom, and each prefix `(x_0, ..., x_i)` with `i < m` one row per coordinate
/// forcing `E[X_{t_{i+1}} - X_{t_i} | prefix] = 0`. The payoff is solved in
/// `[0, 1]` units and mapped back.
pub fn solve_primal_marginal<S: Scalar>(
    p: &Peacock,
    xi: &Payoff,
    sense: Sense,
) -> Result<MarginalSolution<S>, TransportError> {
    let times = p.times().to_vec();
    if !xi.is_marginal(&times) {
        return Err(TransportError::NotMarginal);
    }
    let d = p.dim();
    let supports: Vec<Vec<Vec<f64>>> = p.laws().iter().map(|l| l.points().to_vec()).collect();
    let weights: Vec<Vec<S>> = p
        .laws()
        .iter()
        .map(|l| l.weights().iter().map(|&w| S::from_data(w)).collect())
        .collect();
    let sizes: Vec<usize> = supports.iter().map(Vec::len).collect();
    let tuples = odometer(&sizes);
    let tuple_values: Vec<Vec<Vec<f64>>> = tuples
        .iter()
        .map(|t| t.iter().enumerate().map(|(i, &k)| supports[i][k].clone()).collect())
        .collect();
    let all_paths = TransportPlan::from_tuples(&times, &tuple_values, vec![0.0; tuples.len()])?;
    let payoffs = all_paths
        .support
        .iter()
        .map(|w| xi.eval(w))
        .collect::<Result<Vec<f64>, _>>()?;
    let lo = payoffs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = payoffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let normalization = Normalization::from_range(lo, hi);
    let (s_lo, s_scale) = (S::from_data(normalization.offset), S::from_data(normalization.scale));

    let mut model = LinearProgram::<S>::new(sense);
    let vars: Vec<_> = (0..tuples.len()).map(|k| model.add_nonneg(format!("p{k}"))).collect();
    model.set_objective(
        vars.iter()
            .zip(&payoffs)
            .map(|(v, &x)| (*v, (S::from_data(x) - s_lo.clone()) / s_scale.clone()))
            .collect(),
    );
    let mut marginal_rows = Vec::with_capacity(supports.len());
    for (i, w) in weights.iter().enumerate() {
        let mut rows = Vec::with_capacity(w.len());
        for (s, ws) in w.iter().enumerate() {
            let coeffs = tuples
                .iter()
                .zip(&vars)
                .filter(|(t, _)| t[i] == s)
                .map(|(_, v)| (*v, S::one()))
                .collect();
            rows.push(model.add_constraint(format!("mu{i}_{s}"), coeffs, Relation::Eq, ws.clone()).0);
        }
        marginal_rows.push(rows);
    }
    let mut prefix_rows = Vec::new();
    for i in 0..supports.len() - 1 {
        let block: usize = sizes[i + 1..].iter().product();
        for (b, chunk) in tuples.chunks(block).enumerate() {
            let prefix = chunk[0][..=i].to_vec();
            let x_now = &supports[i][prefix[i]];
            let trivial = chunk.iter().all(|t| supports[i + 1][t[i + 1]] == *x_now);
            if trivial {
                prefix_rows.push((prefix, None));
                continue;
            }
            let first = model.num_constraints();
            for c in 0..d {
                let coeffs = chunk
                    .iter()
                    .enumerate()
                    .map(|(k, t)| {
                        let x_next = supports[i + 1][t[i + 1]][c];
                        (vars[b * block + k], S::from_data(x_next) - S::from_data(x_now[c]))
                    })
                    .collect();
                model.add_constraint(format!("mg{i}_{b}_{c}"), coeffs, Relation::Eq, S::zero());
            }
            prefix_rows.push((prefix, Some(first)));
        }
    }

    let sol = lp::solve(&model)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Unbounded => return Err(TransportError::Unbounded),
        LpStatus::Infeasible => {
            for k in 1..p.len() {
                if let OrderCertificate::Violated(w) = check_convex_order(p.law(k - 1), p.law(k))? {
                    return Err(TransportError::Infeasible(format!(
                        "marginals at {} and {} are not in convex order: {w}",
                        times[k - 1],
                        times[k]
                    )));
                }
            }
            return Err(TransportError::Infeasible("martingale constraints admit no solution".into()));
        }
    }
    let value = sol.objective.clone() * s_scale + s_lo;
    let probs: Vec<S> = sol.x.clone();
    let float_probs: Vec<f64> = probs.iter().map(|q| q.to_f64().max(0.0)).collect();
    let plan = TransportPlan { times: times.clone(), support: all_paths.support, probs: float_probs }.pruned();
    Ok(MarginalSolution {
        sense,
        value,
        times,
        supports,
        tuples,
        probs,
        payoffs,
        plan,
        normalization,
        lp: model,
        lp_solution: sol,
        weights,
        marginal_rows,
        prefix_rows,
    })
}

impl<S: Scalar> MarginalSolution<S> {
    pub fn value_f64(&self) -> f64 {
        self.value.to_f64()
    }

    /// Primal/dual agreement of the underlying LP in normalized units.
    pub fn duality_report(&self) -> DualityReport {
        strong_duality_check(&self.lp, &self.lp_solution)
    }
}

/// Reads `lambda_i` from the marginal-row duals and `H` from the
/// martingale-row duals; `sum lambda_i(x_i) + sum H_i (x_{i+1} - x_i)`
/// dominates (or, for minimization, is dominated by) the payoff on every
/// support tuple and costs exactly the optimal value.
pub fn extract_dual_d1<S: Scalar>(sol: &MarginalSolution<S>) -> Result<DualExtraction<S>, TransportError> {
    if !sol.lp_solution.is_optimal() {
        return Err(TransportError::BadInstance("certificate requires an optimal solution".into()));
    }
    let y = &sol.lp_solution.duals;
    let s_lo = S::from_data(sol.normalization.offset);
    let s_scale = S::from_data(sol.normalization.scale);
    let d = sol.supports[0][0].len();
    let lambdas: Vec<Vec<S>> = sol
        .marginal_rows
        .iter()
        .enumerate()
        .map(|(i, rows)| {
            rows.iter()
                .map(|&r| {
                    let v = y[r].clone() * s_scale.clone();
                    if i == 0 {
                        v + s_lo.clone()
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    let hs: Vec<Vec<S>> = sol
        .prefix_rows
        .iter()
        .map(|(_, row)| match row {
            Some(r) => (0..d).map(|c| y[r + c].clone() * s_scale.clone()).collect(),
            None => vec![S::zero(); d],
        })
        .collect();
    let mut cost = S::zero();
    for (lam, w) in lambdas.iter().zip(&sol.weights) {
        for (l, wi) in lam.iter().zip(w) {
            cost = cost + l.clone() * wi.clone();
        }
    }
    // prefix entries are stored by length, then lexicographically
    let sizes: Vec<usize> = sol.supports.iter().map(Vec::len).collect();
    let mut offsets = vec![0usize];
    for i in 0..sizes.len().saturating_sub(1) {
        let count: usize = sizes[..=i].iter().product();
        offsets.push(offsets[i] + count);
    }
    let mut min_res: Option<S> = None;
    for (t, xi) in sol.tuples.iter().zip(&sol.payoffs) {
        let mut pay = S::zero();
        for (i, &k) in t.iter().enumerate() {
            pay = pay + lambdas[i][k].clone();
        }
        for i in 0..t.len() - 1 {
            let flat = t[..=i].iter().zip(&sizes[..=i]).fold(0usize, |acc, (k, n)| acc * n + k);
            let h = &hs[offsets[i] + flat];
            for c in 0..d {
                let inc = S::from_data(sol.supports[i + 1][t[i + 1]][c]) - S::from_data(sol.supports[i][t[i]][c]);
                pay = pay + h[c].clone() * inc;
            }
        }
        let r = match sol.sense {
            Sense::Maximize => pay - S::from_data(*xi),
            Sense::Minimize => S::from_data(*xi) - pay,
        };
        min_res = Some(match min_res {
            None => r,
            Some(m) => S::min_of(m, r),
        });
    }
    let static_legs = sol
        .times
        .iter()
        .zip(&sol.supports)
        .zip(&lambdas)
        .map(|((t, pts), lam)| StaticLeg::Table {
            time: *t,
            points: pts.clone(),
            values: lam.iter().map(Scalar::to_f64).collect(),
        })
        .collect();
    let entries = sol
        .prefix_rows
        .iter()
        .zip(&hs)
        .map(|((prefix, _), h)| PrefixEntry {
            prefix: prefix.iter().enumerate().map(|(i, &k)| sol.supports[i][k].clone()).collect(),
            h: h.iter().map(Scalar::to_f64).collect(),
        })
        .collect();
    let certificate = DualCertificate {
        sense: sol.sense,
        dim: d,
        static_legs,
        dynamic: DynamicLeg::Prefix { checkpoints: sol.times.clone(), entries, hold_between: false },
        normalization: sol.normalization,
    };
    Ok(DualExtraction { certificate, cost, min_support_residual: min_res.unwrap_or_else(S::zero) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::DiscreteMeasure;
    use crate::pathspace::MarginalFn;
    use num_rational::BigRational;

    fn forced() -> Peacock {
        Peacock::new(
            vec![0.0, 1.0],
            vec![DiscreteMeasure::dirac(vec![1.0]), DiscreteMeasure::on_line(&[0.0, 2.0], &[0.5, 0.5]).unwrap()],
        )
        .unwrap()
    }

    fn abs_inc() -> Payoff {
        Payoff::MarginalGrid { times: vec![0.0, 1.0], func: MarginalFn::AbsIncrement { from: 0, to: 1 } }
    }

    #[test]
    fn forced_coupling_exact() {
        for sense in [Sense::Maximize, Sense::Minimize] {
            let sol = solve_primal_marginal::<BigRational>(&forced(), &abs_inc(), sense).unwrap();
            assert_eq!(sol.value, BigRational::from_integer(1.into()));
            let ex = extract_dual_d1(&sol).unwrap();
            assert_eq!(ex.cost, sol.value);
            assert!(ex.min_support_residual >= BigRational::from_integer(0.into()));
        }
    }

    #[test]
    fn constant_payoff() {
        let sol = solve_primal_marginal::<f64>(&forced(), &Payoff::Constant { value: 2.5 }, Sense::Minimize).unwrap();
        assert!((sol.value - 2.5).abs() < 1e-12);
        let ex = extract_dual_d1(&sol).unwrap();
        assert!((ex.certificate.cost(&forced()).unwrap() - 2.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_path_dependent_payoff() {
        let r = solve_primal_marginal::<f64>(&forced(), &Payoff::LookbackMax { coord: None }, Sense::Maximize);
        assert!(matches!(r, Err(TransportError::NotMarginal)));
    }

    #[test]
    fn plan_passes_invariants() {
        let sol = solve_primal_marginal::<f64>(&forced(), &abs_inc(), Sense::Maximize).unwrap();
        let rep = sol.plan.report(&forced()).unwrap();
        assert!(rep.passes(1e-8, 0.0), "{rep:?}");
    }
}
