use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::certificate::{DualCertificate, DynamicLeg, PrefixEntry, StaticLeg};
use super::plan::TransportPlan;
use super::TransportError;
use crate::lattice::{grid_project, rat_to_f64, LatticeTree};
use crate::lp::{self, LinearProgram, LpSolution, LpStatus, Relation, Sense};
use crate::measures::{w1_distance, DiscreteMeasure, Peacock};
use crate::pathspace::{dist, Normalization, Payoff, StepPath};

/// How the marginal laws enter the lattice problem.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum MarginalMode {
    /// Law at every `t_i` equals the grid-projected marginal.
    Exact,
    /// `c` times the summed W1 distances is charged against the objective.
    Penalized { c: f64 },
    /// No marginal constraint beyond the root value.
    Free,
}

#[derive(Clone, Debug)]
pub struct LatticeSolution {
    pub mode: MarginalMode,
    pub sense: Sense,
    /// Optimal objective, penalty included, in payoff units.
    pub value: f64,
    /// `E[xi]` under the optimal tree measure.
    pub expected_payoff: f64,
    /// W1 distance of the optimal law at each `t_i` to the projected marginal.
    pub marginal_w1: Vec<f64>,
    pub leaf_probs: Vec<f64>,
    pub leaf_paths: Vec<StepPath>,
    pub plan: TransportPlan,
    pub normalization: Normalization,
    pub lp_solution: LpSolution<f64>,
    mass_row: usize,
    node_rows: Vec<(usize, usize)>,
    lambda_rows: Vec<(usize, Vec<(Vec<f64>, usize)>)>,
    tree_times: Vec<f64>,
    marginal_times: Vec<f64>,
}

/// Pushes every marginal onto the level-`n` value grid.
pub fn project_peacock(p: &Peacock, n: u32) -> Result<Peacock, TransportError> {
    let laws = p
        .laws()
        .iter()
        .map(|l| {
            let atoms = l
                .atoms()
                .map(|(x, w)| Ok((grid_project(x, n)?, w)))
                .collect::<Result<Vec<_>, TransportError>>()?;
            Ok(DiscreteMeasure::from_atoms(l.dim(), atoms)?)
        })
        .collect::<Result<Vec<_>, TransportError>>()?;
    Ok(Peacock::from_parts(p.times().to_vec(), laws)?)
}

struct Layout {
    leaf_paths: Vec<StepPath>,
    /// Leaf indices of every node's subtree together with the child taken.
    node_terms: BTreeMap<usize, Vec<(usize, usize)>>,
    /// Distinct values at each marginal depth and the leaves reaching them.
    marginal_values: Vec<Vec<(Vec<f64>, Vec<usize>)>>,
}

fn layout(tree: &LatticeTree) -> Result<Layout, TransportError> {
    let node_terms = tree.node_leaf_terms();
    let mut marginal_values: Vec<BTreeMap<Vec<u64>, (Vec<f64>, Vec<usize>)>> =
        vec![BTreeMap::new(); tree.marginal_depths.len()];
    let mut leaf_paths = Vec::with_capacity(tree.leaves.len());
    for (li, &leaf) in tree.leaves.iter().enumerate() {
        let chain = tree.ancestry(leaf);
        for (i, &depth) in tree.marginal_depths.iter().enumerate() {
            let v = &tree.nodes[chain[depth]].value;
            let key = super::plan::bits_key(std::slice::from_ref(v));
            marginal_values[i].entry(key).or_insert_with(|| (v.clone(), Vec::new())).1.push(li);
        }
        leaf_paths.push(tree.path_to(leaf).to_step_path()?);
    }
    let mut marginal_values: Vec<Vec<(Vec<f64>, Vec<usize>)>> =
        marginal_values.into_iter().map(|m| m.into_values().collect()).collect();
    for m in &mut marginal_values {
        m.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    }
    Ok(Layout { leaf_paths, node_terms, marginal_values })
}

fn check_times(tree: &LatticeTree, p: &Peacock) -> Result<(), TransportError> {
    if p.times() != tree.params.times.as_slice() {
        return Err(TransportError::BadInstance(format!(
            "peacock times {:?} differ from tree times {:?}",
            p.times(),
            tree.params.times
        )));
    }
    if p.dim() != tree.params.dim {
        return Err(TransportError::BadInstance("peacock and tree dimensions differ".into()));
    }
    Ok(())
}

/// Optimizes `E[xi]` over martingale measures on the leaves of `tree`.
///
/// Leaf probabilities are the variables; every node whose children move
/// carries one martingale row per coordinate. Marginals are the
/// grid-projected laws of `p`: matched exactly, charged through W1 couplings,
/// or ignored, depending on `mode`.
pub fn solve_primal_lattice(
    p: &Peacock,
    xi: &Payoff,
    tree: &LatticeTree,
    mode: MarginalMode,
    sense: Sense,
) -> Result<LatticeSolution, TransportError> {
    check_times(tree, p)?;
    let proj = project_peacock(p, tree.params.n)?;
    let lay = layout(tree)?;
    let payoffs = lay.leaf_paths.iter().map(|w| xi.eval(w)).collect::<Result<Vec<f64>, _>>()?;
    let lo = payoffs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = payoffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let norm = Normalization::from_range(lo, hi);
    let d = tree.params.dim;

    if mode == MarginalMode::Exact {
        for (i, law) in proj.laws().iter().enumerate() {
            let reach = &lay.marginal_values[i];
            if law.points().iter().any(|x| !reach.iter().any(|(v, _)| v == x)) {
                let relaxation = minimal_relaxation(p, tree)?;
                return Err(TransportError::LatticeInfeasible { relaxation });
            }
        }
    }

    let mut model = LinearProgram::<f64>::new(sense);
    let q: Vec<_> = (0..lay.leaf_paths.len()).map(|k| model.add_nonneg(format!("q{k}"))).collect();
    for (v, x) in q.iter().zip(&payoffs) {
        model.add_objective_term(*v, norm.apply(*x));
    }
    let mass_row = model.add_constraint("mass", q.iter().map(|v| (*v, 1.0)).collect(), Relation::Eq, 1.0).0;
    let mut node_rows = Vec::new();
    for (&node, terms) in &lay.node_terms {
        let xv = &tree.nodes[node].value;
        if tree.is_static(node) {
            continue;
        }
        let first = model.num_constraints();
        for c in 0..d {
            let coeffs = terms.iter().map(|(l, ch)| (q[*l], tree.nodes[*ch].value[c] - xv[c])).collect();
            model.add_constraint(format!("mg{node}_{c}"), coeffs, Relation::Eq, 0.0);
        }
        node_rows.push((node, first));
    }
    let mut lambda_rows = Vec::new();
    match mode {
        MarginalMode::Free => {}
        MarginalMode::Exact => {
            for (i, law) in proj.laws().iter().enumerate().skip(1) {
                let mut rows = Vec::new();
                for (g, leaves) in &lay.marginal_values[i] {
                    let rhs = law.index_of(g).map_or(0.0, |k| law.weights()[k]);
                    let coeffs = leaves.iter().map(|l| (q[*l], 1.0)).collect();
                    rows.push((g.clone(), model.add_constraint(format!("mu{i}"), coeffs, Relation::Eq, rhs).0));
                }
                lambda_rows.push((i, rows));
            }
        }
        MarginalMode::Penalized { c } => {
            if !(c >= 0.0) {
                return Err(TransportError::BadInstance(format!("penalty weight {c}")));
            }
            let weight = c / norm.scale;
            let signed = if sense == Sense::Maximize { -weight } else { weight };
            for (i, law) in proj.laws().iter().enumerate() {
                let values = &lay.marginal_values[i];
                let pi: Vec<Vec<_>> = values
                    .iter()
                    .enumerate()
                    .map(|(gi, (g, _))| {
                        law.points()
                            .iter()
                            .enumerate()
                            .map(|(si, s)| {
                                let v = model.add_nonneg(format!("pi{i}_{gi}_{si}"));
                                model.add_objective_term(v, signed * dist(g, s));
                                v
                            })
                            .collect()
                    })
                    .collect();
                let mut rows = Vec::new();
                for (gi, (g, leaves)) in values.iter().enumerate() {
                    let mut coeffs: Vec<_> = leaves.iter().map(|l| (q[*l], 1.0)).collect();
                    coeffs.extend(pi[gi].iter().map(|v| (*v, -1.0)));
                    rows.push((g.clone(), model.add_constraint(format!("link{i}"), coeffs, Relation::Eq, 0.0).0));
                }
                for (si, w) in law.weights().iter().enumerate() {
                    let coeffs = pi.iter().map(|row| (row[si], 1.0)).collect();
                    model.add_constraint(format!("mu{i}_{si}"), coeffs, Relation::Eq, *w);
                }
                lambda_rows.push((i, rows));
            }
        }
    }

    let sol = lp::solve(&model)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Unbounded => return Err(TransportError::Unbounded),
        LpStatus::Infeasible => {
            return Err(match mode {
                MarginalMode::Exact => TransportError::LatticeInfeasible { relaxation: minimal_relaxation(p, tree)? },
                _ => TransportError::NoMartingaleMeasure,
            })
        }
    }
    let leaf_probs: Vec<f64> = q.iter().map(|v| sol.x[v.0].max(0.0)).collect();
    let expected_payoff: f64 = leaf_probs.iter().zip(&payoffs).map(|(a, b)| a * b).sum();
    let plan = TransportPlan { times: p.times().to_vec(), support: lay.leaf_paths.clone(), probs: leaf_probs.clone() };
    let mut marginal_w1 = Vec::with_capacity(p.len());
    for (t, law) in proj.times().iter().zip(proj.laws()) {
        marginal_w1.push(w1_distance(&plan.law_at(*t)?, law)?);
    }
    Ok(LatticeSolution {
        mode,
        sense,
        value: norm.scale * sol.objective + norm.offset,
        expected_payoff,
        marginal_w1,
        leaf_probs,
        leaf_paths: lay.leaf_paths,
        plan: plan.pruned(),
        normalization: norm,
        lp_solution: sol,
        mass_row,
        node_rows,
        lambda_rows,
        tree_times: tree.times.iter().map(rat_to_f64).collect(),
        marginal_times: p.times().to_vec(),
    })
}

/// Smallest summed W1 distance between the laws of a martingale tree
/// measure and the projected marginals.
pub fn minimal_relaxation(p: &Peacock, tree: &LatticeTree) -> Result<f64, TransportError> {
    let zero = Payoff::Constant { value: 0.0 };
    let sol = solve_primal_lattice(p, &zero, tree, MarginalMode::Penalized { c: 1.0 }, Sense::Minimize)?;
    Ok(sol.value)
}

/// Semi-static hedge read off the lattice duals. Static legs sit on the grid
/// values reachable at each `t_i`; positions are held between partition
/// times, so the domain is the set of tree paths.
pub fn extract_dual_lattice(sol: &LatticeSolution, tree: &LatticeTree) -> Result<DualCertificate, TransportError> {
    if !sol.lp_solution.is_optimal() {
        return Err(TransportError::BadInstance("certificate requires an optimal solution".into()));
    }
    let y = &sol.lp_solution.duals;
    let norm = sol.normalization;
    let d = tree.params.dim;
    let root = tree.nodes[0].value.clone();
    let mut base = norm.scale * y[sol.mass_row] + norm.offset;
    let mut static_legs = Vec::new();
    for (i, rows) in &sol.lambda_rows {
        let mut points = Vec::new();
        let mut values = Vec::new();
        for (g, r) in rows {
            points.push(g.clone());
            values.push(norm.scale * y[*r]);
        }
        if *i == 0 {
            // the root is the only value at t_0
            base += values[0];
            continue;
        }
        static_legs.push(StaticLeg::Table { time: sol.marginal_times[*i], points, values });
    }
    static_legs.insert(0, StaticLeg::Table { time: sol.marginal_times[0], points: vec![root], values: vec![base] });
    let rows: BTreeMap<usize, usize> = sol.node_rows.iter().copied().collect();
    let entries = tree
        .nodes
        .iter()
        .filter(|n| !n.children.is_empty())
        .map(|n| {
            let chain = tree.ancestry(n.id);
            PrefixEntry {
                prefix: chain.iter().map(|&a| tree.nodes[a].value.clone()).collect(),
                h: match rows.get(&n.id) {
                    Some(&r) => (0..d).map(|c| norm.scale * y[r + c]).collect(),
                    None => vec![0.0; d],
                },
            }
        })
        .collect();
    Ok(DualCertificate {
        sense: sol.sense,
        dim: d,
        static_legs,
        dynamic: DynamicLeg::Prefix { checkpoints: sol.tree_times.clone(), entries, hold_between: true },
        normalization: norm,
    })
}
