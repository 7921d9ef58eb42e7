use serde::Serialize;

use crate::lattice::LatticeTree;
use crate::lp::{self, LinearProgram, LpStatus, Relation, Sense};
use crate::pathspace::Payoff;
use crate::transport::{leaf_values, TransportError};

/// Mass-weighted drift `sum_c Q(c) (x_v - x_c)` at one node.
#[derive(Clone, Debug, Serialize)]
pub struct NodeDrift {
    pub node: usize,
    pub mass: f64,
    pub drift: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PenalizedSolution {
    pub n: f64,
    pub value: f64,
    pub leaf_probs: Vec<f64>,
    pub node_drift: Vec<NodeDrift>,
    /// `sum_v || sum_c Q(c) (x_v - x_c) ||_1`.
    pub expected_drift: f64,
    /// Largest hedge ratio magnitude implied by the penalty rows' duals.
    pub max_hedge: f64,
}

/// `sum_v || sum_c Q(c) (x_v - x_c) ||_1` for leaf probabilities `q`.
pub fn expected_drift(tree: &LatticeTree, q: &[f64]) -> f64 {
    node_drifts(tree, q).iter().map(|d| d.drift.iter().map(|x| x.abs()).sum::<f64>()).sum()
}

fn node_drifts(tree: &LatticeTree, q: &[f64]) -> Vec<NodeDrift> {
    tree.node_leaf_terms()
        .into_iter()
        .map(|(node, terms)| {
            let xv = &tree.nodes[node].value;
            let mut drift = vec![0.0; xv.len()];
            let mut mass = 0.0;
            for (l, c) in terms {
                mass += q[l];
                for (k, d) in drift.iter_mut().enumerate() {
                    *d += q[l] * (xv[k] - tree.nodes[c].value[k]);
                }
            }
            NodeDrift { node, mass, drift }
        })
        .collect()
}

/// `sup_Q E_Q[zeta] - n sum_v || sum_c Q(c) (x_v - x_c) ||_1` over all
/// probability measures on the leaves, for `zeta` valued in `[0, 1]`.
pub fn solve_penalized(tree: &LatticeTree, zeta: &Payoff, n: f64) -> Result<PenalizedSolution, TransportError> {
    let vals = leaf_values(tree, zeta)?;
    if vals.iter().any(|v| !(-1e-12..=1.0 + 1e-12).contains(v)) {
        return Err(TransportError::BadInstance("payoff must take values in [0, 1] on the tree".into()));
    }
    solve_penalized_values(tree, &vals, n)
}

/// [`solve_penalized`] from leaf values in the order of `tree.leaves`.
///
/// One auxiliary variable per node and coordinate bounds the absolute
/// drift from above, which makes the concave objective linear.
pub fn solve_penalized_values(tree: &LatticeTree, vals: &[f64], n: f64) -> Result<PenalizedSolution, TransportError> {
    if tree.leaves.is_empty() {
        return Err(TransportError::BadInstance("empty tree".into()));
    }
    if !(n >= 0.0) {
        return Err(TransportError::BadInstance(format!("penalty level {n}")));
    }
    let d = tree.params.dim;
    let mut model = LinearProgram::<f64>::new(Sense::Maximize);
    let q: Vec<_> = (0..tree.leaves.len()).map(|k| model.add_nonneg(format!("q{k}"))).collect();
    model.set_objective(q.iter().zip(vals).map(|(v, z)| (*v, *z)).collect());
    model.add_constraint("mass", q.iter().map(|v| (*v, 1.0)).collect(), Relation::Eq, 1.0);
    let mut pen_rows = Vec::new();
    for (node, terms) in tree.node_leaf_terms() {
        if tree.is_static(node) {
            continue;
        }
        let xv = &tree.nodes[node].value;
        for c in 0..d {
            let s = model.add_nonneg(format!("s{node}_{c}"));
            model.add_objective_term(s, -n);
            let lin: Vec<_> = terms.iter().map(|(l, ch)| (q[*l], xv[c] - tree.nodes[*ch].value[c])).collect();
            let mut up = vec![(s, 1.0)];
            up.extend(lin.iter().map(|(v, a)| (*v, -a)));
            let r_up = model.add_constraint(format!("up{node}_{c}"), up, Relation::Ge, 0.0).0;
            let mut dn = vec![(s, 1.0)];
            dn.extend(lin.iter().map(|(v, a)| (*v, *a)));
            let r_dn = model.add_constraint(format!("dn{node}_{c}"), dn, Relation::Ge, 0.0).0;
            pen_rows.push((r_up, r_dn));
        }
    }
    let sol = lp::solve(&model)?;
    if sol.status != LpStatus::Optimal {
        return Err(TransportError::BadInstance(format!("penalized problem ended {:?}", sol.status)));
    }
    let leaf_probs: Vec<f64> = q.iter().map(|v| sol.x[v.0].max(0.0)).collect();
    let node_drift = node_drifts(tree, &leaf_probs);
    let expected = node_drift.iter().map(|nd| nd.drift.iter().map(|x| x.abs()).sum::<f64>()).sum();
    let max_hedge = pen_rows
        .iter()
        .map(|(a, b)| (sol.duals[*a] - sol.duals[*b]).abs())
        .fold(0.0, f64::max);
    Ok(PenalizedSolution { n, value: sol.objective, leaf_probs, node_drift, expected_drift: expected, max_hedge })
}
