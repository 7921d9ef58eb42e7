use serde::Serialize;

use crate::lattice::LatticeTree;
use crate::scalar::Scalar;

/// Doob-type split `X = M - A` of the coordinate process under a leaf
/// measure: `A` accumulates the one-step drifts `x_v - E[x_next | v]`.
#[derive(Clone, Debug, Serialize)]
pub struct Compensator<S> {
    /// Probability of passing through each node.
    pub node_mass: Vec<S>,
    /// `A` at each node; `None` off the support.
    pub a: Vec<Option<Vec<S>>>,
    /// Largest `|sum_c Q(c) (M_c - M_v)|` over internal nodes.
    pub martingale_residual: S,
    /// `E |A_1|_1`.
    pub expected_abs_a1: S,
}

impl<S: Scalar> Compensator<S> {
    /// `M = X + A` at a node on the support.
    pub fn martingale_at(&self, tree: &LatticeTree, id: usize) -> Option<Vec<S>> {
        let a = self.a[id].as_ref()?;
        Some(tree.nodes[id].value.iter().zip(a).map(|(x, a)| S::from_f64(*x) + a.clone()).collect())
    }
}

fn masses<S: Scalar>(tree: &LatticeTree, q: &[S]) -> Vec<S> {
    let mut mass = vec![S::zero(); tree.nodes.len()];
    for (&leaf, p) in tree.leaves.iter().zip(q) {
        for v in tree.ancestry(leaf) {
            mass[v] = mass[v].clone() + p.clone();
        }
    }
    mass
}

/// Conditional mean of the next value given node `v`, or `None` for leaves
/// and nodes of zero mass.
fn next_mean<S: Scalar>(tree: &LatticeTree, mass: &[S], v: usize) -> Option<Vec<S>> {
    let node = &tree.nodes[v];
    if node.children.is_empty() || !mass[v].is_pos() {
        return None;
    }
    let mut m = vec![S::zero(); node.value.len()];
    for &c in &node.children {
        for (k, acc) in m.iter_mut().enumerate() {
            *acc = acc.clone() + mass[c].clone() * S::from_f64(tree.nodes[c].value[k]);
        }
    }
    Some(m.into_iter().map(|x| x / mass[v].clone()).collect())
}

/// Compensator of the coordinate process under leaf probabilities `q`
/// (ordered as `tree.leaves`). Exact in rational arithmetic.
pub fn compensator<S: Scalar>(tree: &LatticeTree, q: &[S]) -> Compensator<S> {
    let mass = masses(tree, q);
    let d = tree.params.dim;
    let mut a: Vec<Option<Vec<S>>> = vec![None; tree.nodes.len()];
    if mass.first().is_some_and(|m| m.is_pos()) {
        a[0] = Some(vec![S::zero(); d]);
    }
    // Parents precede children in node order.
    for v in 0..tree.nodes.len() {
        let (Some(av), Some(mean)) = (a[v].clone(), next_mean(tree, &mass, v)) else { continue };
        let next: Vec<S> = (0..d)
            .map(|k| av[k].clone() + S::from_f64(tree.nodes[v].value[k]) - mean[k].clone())
            .collect();
        for &c in &tree.nodes[v].children {
            if mass[c].is_pos() {
                a[c] = Some(next.clone());
            }
        }
    }
    let mut comp = Compensator { node_mass: mass, a, martingale_residual: S::zero(), expected_abs_a1: S::zero() };
    for v in 0..tree.nodes.len() {
        let Some(mv) = comp.martingale_at(tree, v) else { continue };
        if tree.nodes[v].children.is_empty() {
            continue;
        }
        for k in 0..d {
            let mut r = S::zero();
            for &c in &tree.nodes[v].children {
                if let Some(mc) = comp.martingale_at(tree, c) {
                    r = r + comp.node_mass[c].clone() * (mc[k].clone() - mv[k].clone());
                }
            }
            comp.martingale_residual = S::max_of(comp.martingale_residual.clone(), r.abs());
        }
    }
    for (&leaf, p) in tree.leaves.iter().zip(q) {
        if let Some(al) = &comp.a[leaf] {
            let norm = al.iter().fold(S::zero(), |s, x| s + x.abs());
            comp.expected_abs_a1 = comp.expected_abs_a1.clone() + p.clone() * norm;
        }
    }
    comp
}

/// Expected total conditional drift computed path by path:
/// `sum_l q_l sum_k |x_{v_k} - E[x_next | v_k]|_1` along each leaf's
/// ancestry, with conditional laws `Q(c) / Q(v)`.
pub fn pathwise_expected_drift(tree: &LatticeTree, q: &[f64]) -> f64 {
    let mass = masses(tree, q);
    let means: Vec<Option<Vec<f64>>> = (0..tree.nodes.len()).map(|v| next_mean(tree, &mass, v)).collect();
    let mut total = 0.0;
    for (&leaf, &p) in tree.leaves.iter().zip(q) {
        if p <= 0.0 {
            continue;
        }
        let mut along = 0.0;
        for v in tree.ancestry(leaf) {
            if let Some(m) = &means[v] {
                along += tree.nodes[v].value.iter().zip(m).map(|(x, e)| (x - e).abs()).sum::<f64>();
            }
        }
        total += p * along;
    }
    total
}
