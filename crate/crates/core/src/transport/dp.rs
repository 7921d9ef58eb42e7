use super::certificate::{DualCertificate, DynamicLeg, PrefixEntry, StaticLeg};
use super::TransportError;
use crate::lattice::{rat_to_f64, LatticeTree};
use crate::lp::{self, LinearProgram, LpStatus, Relation, Sense};
use crate::pathspace::{Normalization, Payoff};

/// Backward-induction value of a tree.
#[derive(Clone, Debug)]
pub struct DpResult {
    pub v0: f64,
    /// Node values; `-inf` marks nodes without a martingale continuation.
    pub values: Vec<f64>,
    /// Hedge ratio at each internal node that survived pruning.
    pub hedges: Vec<Option<Vec<f64>>>,
}

impl DpResult {
    /// `V_0` plus the node hedges: a pathwise superhedge on unpruned tree paths.
    pub fn certificate(&self, tree: &LatticeTree) -> DualCertificate {
        let entries = tree
            .nodes
            .iter()
            .filter_map(|n| {
                let h = self.hedges[n.id].clone()?;
                let chain = tree.ancestry(n.id);
                Some(PrefixEntry { prefix: chain.iter().map(|&a| tree.nodes[a].value.clone()).collect(), h })
            })
            .collect();
        DualCertificate {
            sense: Sense::Maximize,
            dim: tree.params.dim,
            static_legs: vec![StaticLeg::Table {
                time: rat_to_f64(&tree.times[0]),
                points: vec![tree.nodes[0].value.clone()],
                values: vec![self.v0],
            }],
            dynamic: DynamicLeg::Prefix {
                checkpoints: tree.times.iter().map(rat_to_f64).collect(),
                entries,
                hold_between: true,
            },
            normalization: Normalization::IDENTITY,
        }
    }
}

/// Largest `sum q_c v_c` over probability vectors on the children with
/// barycenter `x`, with the hedge ratio from the barycenter duals.
fn node_step(x: &[f64], children: &[(&[f64], f64)]) -> Result<Option<(f64, Vec<f64>)>, TransportError> {
    let d = x.len();
    if children.iter().all(|(c, _)| *c == x) {
        let best = children.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
        return Ok(Some((best, vec![0.0; d])));
    }
    let mut model = LinearProgram::<f64>::new(Sense::Maximize);
    let q: Vec<_> = (0..children.len()).map(|k| model.add_nonneg(format!("q{k}"))).collect();
    model.set_objective(q.iter().zip(children).map(|(v, c)| (*v, c.1)).collect());
    model.add_constraint("mass", q.iter().map(|v| (*v, 1.0)).collect(), Relation::Eq, 1.0);
    for k in 0..d {
        let coeffs = q.iter().zip(children).map(|(v, c)| (*v, c.0[k] - x[k])).collect();
        model.add_constraint(format!("bary{k}"), coeffs, Relation::Eq, 0.0);
    }
    let sol = lp::solve(&model)?;
    if sol.status != LpStatus::Optimal {
        return Ok(None);
    }
    Ok(Some((sol.objective, sol.duals[1..].to_vec())))
}

/// `V(leaf) = zeta(path)`, `V(node) = max { sum q_c V(c) : q a probability on
/// the children, sum q_c x_c = x_node }`. The root value is the largest
/// expectation of `zeta` over martingale measures on the tree.
pub fn tree_superhedge_dp(tree: &LatticeTree, zeta: &Payoff) -> Result<DpResult, TransportError> {
    tree_superhedge_dp_values(tree, &leaf_values(tree, zeta)?)
}

/// Payoff on every leaf path, in the order of `tree.leaves`.
pub fn leaf_values(tree: &LatticeTree, zeta: &Payoff) -> Result<Vec<f64>, TransportError> {
    tree.leaves
        .iter()
        .map(|&leaf| Ok(zeta.eval(&tree.path_to(leaf).to_step_path()?)?))
        .collect()
}

/// [`tree_superhedge_dp`] from leaf values given in the order of `tree.leaves`.
pub fn tree_superhedge_dp_values(tree: &LatticeTree, leaf_vals: &[f64]) -> Result<DpResult, TransportError> {
    let n = tree.nodes.len();
    let mut values = vec![f64::NEG_INFINITY; n];
    let mut hedges: Vec<Option<Vec<f64>>> = vec![None; n];
    for (&leaf, &v) in tree.leaves.iter().zip(leaf_vals) {
        if !v.is_finite() {
            return Err(TransportError::BadInstance("payoff is unbounded on the tree".into()));
        }
        values[leaf] = v;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&id| std::cmp::Reverse(tree.nodes[id].depth));
    for id in order {
        let node = &tree.nodes[id];
        if node.children.is_empty() {
            continue;
        }
        let live: Vec<(&[f64], f64)> = node
            .children
            .iter()
            .filter(|&&c| values[c].is_finite())
            .map(|&c| (tree.nodes[c].value.as_slice(), values[c]))
            .collect();
        if live.is_empty() {
            continue;
        }
        if let Some((v, h)) = node_step(&node.value, &live)? {
            values[id] = v;
            hedges[id] = Some(h);
        }
    }
    if !values[0].is_finite() {
        return Err(TransportError::NoMartingaleMeasure);
    }
    Ok(DpResult { v0: values[0], values, hedges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{rat, LatticeParams};

    fn two_leaf(v0: f64, v2: f64) -> (LatticeTree, Payoff) {
        let times = vec![rat(0.0), rat(0.5), rat(1.0)];
        let p = LatticeParams::new(1, 1, vec![0.0, 1.0], 2.0, 1);
        let spec = vec![
            (None, vec![1.0]),
            (Some(0), vec![0.0]),
            (Some(0), vec![2.0]),
            (Some(1), vec![0.0]),
            (Some(2), vec![2.0]),
        ];
        let tree = LatticeTree::from_nodes(p, times, vec![0, 2], spec).unwrap();
        let zeta = Payoff::custom("two-leaf", true, move |w| Ok(if w.value_at(1.0)[0] > 1.0 { v2 } else { v0 }));
        (tree, zeta)
    }

    #[test]
    fn forced_weights() {
        let (tree, zeta) = two_leaf(0.0, 2.0);
        assert!((tree_superhedge_dp(&tree, &zeta).unwrap().v0 - 1.0).abs() < 1e-12);
        let (tree, zeta) = two_leaf(0.3, 0.9);
        assert!((tree_superhedge_dp(&tree, &zeta).unwrap().v0 - 0.6).abs() < 1e-12);
    }

    #[test]
    fn hedge_dominates_on_leaves() {
        let (tree, zeta) = two_leaf(0.3, 0.9);
        let dp = tree_superhedge_dp(&tree, &zeta).unwrap();
        let cert = dp.certificate(&tree);
        let paths: Vec<_> = tree.leaf_paths().iter().map(|p| p.to_step_path().unwrap()).collect();
        let rep = super::super::verify_superhedge(&cert, &zeta, &paths, 1e-12).unwrap();
        assert!(rep.pass && rep.checked == 2);
    }

    #[test]
    fn one_sided_children_are_pruned() {
        let times = vec![rat(0.0), rat(0.5), rat(1.0)];
        let p = LatticeParams::new(1, 1, vec![0.0, 1.0], 2.0, 1);
        let spec = vec![(None, vec![1.0]), (Some(0), vec![2.0]), (Some(1), vec![2.0])];
        let tree = LatticeTree::from_nodes(p, times, vec![0, 2], spec).unwrap();
        let r = tree_superhedge_dp(&tree, &Payoff::Constant { value: 1.0 });
        assert!(matches!(r, Err(TransportError::NoMartingaleMeasure)));
    }
}
