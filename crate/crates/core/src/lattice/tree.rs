use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::grid::{grid_box, grid_coords, in_a, rat, snap_below};
use super::{LatticeError, LatticePath};
use crate::pathspace::TimeGrid;

/// Truncation parameters of a lattice tree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeParams {
    pub n: u32,
    pub dim: usize,
    /// Marginal times, from 0 to 1.
    pub times: Vec<f64>,
    /// Coordinatewise value cap.
    pub radius: f64,
    /// Spatial moves allowed per marginal interval.
    pub j_max: usize,
    /// Largest node count that will be built.
    pub budget: usize,
    /// Value at time 0; the all-ones vector when absent.
    #[serde(default)]
    pub root: Option<Vec<f64>>,
}

impl LatticeParams {
    pub fn new(n: u32, dim: usize, times: Vec<f64>, radius: f64, j_max: usize) -> Self {
        Self { n, dim, times, radius, j_max, budget: 1_000_000, root: None }
    }

    pub fn root_value(&self) -> Vec<f64> {
        self.root.clone().unwrap_or_else(|| vec![1.0; self.dim])
    }

    /// Interior partition points per block.
    pub fn levels_per_block(&self) -> usize {
        self.j_max.max(1)
    }

    fn validate(&self) -> Result<TimeGrid, LatticeError> {
        if self.n == 0 {
            return Err(LatticeError::BadParams("n must be at least 1".into()));
        }
        if self.dim == 0 {
            return Err(LatticeError::BadParams("dim must be positive".into()));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(LatticeError::BadParams("radius must be positive".into()));
        }
        let root = self.root_value();
        if root.len() != self.dim || !in_a(&root, self.n) || root.iter().any(|x| *x > self.radius) {
            return Err(LatticeError::BadParams("root value must lie on the level-n grid inside the box".into()));
        }
        Ok(TimeGrid::new(self.times.clone())?)
    }

    /// Node count the enumeration would produce, saturating.
    pub fn node_count(&self) -> u128 {
        let big_n = self.levels_per_block();
        let side = |level: u32| -> u128 {
            let per = (self.radius * (level as f64).exp2()).floor() as u128 + 1;
            per.checked_pow(self.dim as u32).unwrap_or(u128::MAX)
        };
        let blocks = self.times.len().saturating_sub(1);
        let mut width: u128 = 1;
        let mut total: u128 = 1;
        for _ in 0..blocks {
            for j in 1..=big_n {
                let level = self.value_level(j, big_n);
                width = if self.j_max == 0 { width } else { width.saturating_mul(side(level)) };
                total = total.saturating_add(width);
            }
            total = total.saturating_add(width);
        }
        total
    }

    fn value_level(&self, j: usize, big_n: usize) -> u32 {
        if j < big_n {
            self.n + j as u32
        } else {
            self.n
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TreeNode {
    pub id: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub time: BigRational,
    pub value: Vec<f64>,
    /// Resolution of the value grid the node lives on.
    pub level: u32,
    /// Partition index along any root-to-node path.
    pub depth: usize,
    /// Repeats its parent's value at a marginal time.
    pub is_copy: bool,
}

/// Complete finite tree of lattice path prefixes, nodes in BFS order.
#[derive(Clone, Debug)]
pub struct LatticeTree {
    pub params: LatticeParams,
    pub nodes: Vec<TreeNode>,
    pub leaves: Vec<usize>,
    /// Partition depth of each marginal time.
    pub marginal_depths: Vec<usize>,
    pub times: Vec<BigRational>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NodeDump {
    pub id: usize,
    pub parent: Option<usize>,
    pub time_num: String,
    pub time_den: String,
    pub value_q: Vec<i64>,
    pub level: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TreeDump {
    pub params: LatticeParams,
    pub node_count: usize,
    pub leaf_count: usize,
    pub nodes: Vec<NodeDump>,
}

/// Builds every lattice path prefix with values in `[0, R]^d`.
///
/// Each marginal block gets `max(J_max, 1)` interior levels whose time steps
/// are the largest `B` grid points below an even split of the block, so all
/// paths share one partition. Interior level `j` carries values on the
/// level `n + j` grid except the last, which is on the level `n` grid and is
/// repeated by a copy node at the block end. With `J_max = 0` no value moves.
pub fn enumerate_tree(params: &LatticeParams) -> Result<LatticeTree, LatticeError> {
    let grid = params.validate()?;
    let attempted = params.node_count();
    if attempted > params.budget as u128 {
        return Err(LatticeError::Budget { attempted, budget: params.budget });
    }
    let big_n = params.levels_per_block();
    let ends: Vec<BigRational> = grid.times().iter().map(|&t| rat(t)).collect();

    let mut times = vec![ends[0].clone()];
    let mut marginal_depths = vec![0];
    for i in 0..grid.intervals() {
        let gap = &ends[i + 1] - &ends[i];
        let split = gap / BigRational::from_integer((big_n as i64 + 1).into());
        let mut t = ends[i].clone();
        for j in 1..=big_n {
            t = &t + snap_below(&split, params.dim, params.n + j as u32);
            times.push(t.clone());
        }
        times.push(ends[i + 1].clone());
        marginal_depths.push(times.len() - 1);
    }

    let boxes: Vec<Vec<Vec<f64>>> = (1..=big_n)
        .map(|j| grid_box(params.dim, params.value_level(j, big_n), params.radius))
        .collect();

    let mut nodes = vec![TreeNode {
        id: 0,
        parent: None,
        children: Vec::new(),
        time: times[0].clone(),
        value: params.root_value(),
        level: params.n,
        depth: 0,
        is_copy: false,
    }];
    let mut frontier = vec![0usize];
    for depth in 1..times.len() {
        let block_end = marginal_depths.contains(&depth);
        let j = depth - marginal_depths.iter().filter(|&&d| d < depth).last().copied().unwrap_or(0);
        let mut next = Vec::new();
        for &p in &frontier {
            let candidates: Vec<(Vec<f64>, u32, bool)> = if block_end || params.j_max == 0 {
                vec![(nodes[p].value.clone(), if block_end { params.n } else { params.value_level(j, big_n) }, block_end)]
            } else {
                let level = params.value_level(j, big_n);
                boxes[j - 1].iter().map(|v| (v.clone(), level, false)).collect()
            };
            for (value, level, is_copy) in candidates {
                let id = nodes.len();
                nodes.push(TreeNode {
                    id,
                    parent: Some(p),
                    children: Vec::new(),
                    time: times[depth].clone(),
                    value,
                    level,
                    depth,
                    is_copy,
                });
                nodes[p].children.push(id);
                next.push(id);
            }
        }
        frontier = next;
    }
    Ok(LatticeTree { params: params.clone(), nodes, leaves: frontier, marginal_depths, times })
}

impl LatticeTree {
    /// Tree from explicit nodes given as `(parent, value)` in BFS order with
    /// the root first. Depths follow from the parents; every leaf must sit at
    /// the last partition time, and marginal depths index `times`.
    pub fn from_nodes(
        params: LatticeParams,
        times: Vec<BigRational>,
        marginal_depths: Vec<usize>,
        spec: Vec<(Option<usize>, Vec<f64>)>,
    ) -> Result<Self, LatticeError> {
        let bad = |m: &str| LatticeError::BadParams(m.to_string());
        if spec.is_empty() || spec[0].0.is_some() {
            return Err(bad("first node must be the root"));
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(bad("partition times must increase"));
        }
        if marginal_depths.first() != Some(&0) || marginal_depths.last() != Some(&(times.len() - 1)) {
            return Err(bad("marginal depths must start at 0 and end at the last time"));
        }
        let mut nodes: Vec<TreeNode> = Vec::with_capacity(spec.len());
        for (id, (parent, value)) in spec.into_iter().enumerate() {
            if value.len() != params.dim || value.iter().any(|x| !(*x >= 0.0)) {
                return Err(bad("node values must be nonnegative vectors of the tree dimension"));
            }
            let depth = match parent {
                None if id == 0 => 0,
                Some(p) if p < id => nodes[p].depth + 1,
                _ => return Err(bad("parents must precede children")),
            };
            if depth >= times.len() {
                return Err(bad("node deeper than the partition"));
            }
            let is_copy = match parent {
                Some(p) => marginal_depths.contains(&depth) && nodes[p].value == value,
                None => false,
            };
            if let Some(p) = parent {
                nodes[p].children.push(id);
            }
            nodes.push(TreeNode {
                id,
                parent,
                children: Vec::new(),
                time: times[depth].clone(),
                value,
                level: params.n,
                depth,
                is_copy,
            });
        }
        let last = times.len() - 1;
        let leaves: Vec<usize> = nodes.iter().filter(|n| n.children.is_empty()).map(|n| n.id).collect();
        if leaves.iter().any(|&l| nodes[l].depth != last) {
            return Err(bad("every leaf must sit at the final time"));
        }
        Ok(Self { params, nodes, leaves, marginal_depths, times })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: usize) -> &TreeNode {
        &self.nodes[id]
    }

    /// Node ids from the root down to `id`.
    pub fn ancestry(&self, id: usize) -> Vec<usize> {
        let mut out = vec![id];
        let mut cur = id;
        while let Some(p) = self.nodes[cur].parent {
            out.push(p);
            cur = p;
        }
        out.reverse();
        out
    }

    /// Lattice path through the root-to-leaf chain ending at `leaf`.
    pub fn path_to(&self, leaf: usize) -> LatticePath {
        let chain = self.ancestry(leaf);
        LatticePath {
            times: chain.iter().map(|&id| self.nodes[id].time.clone()).collect(),
            values: chain.iter().map(|&id| self.nodes[id].value.clone()).collect(),
            marginal_idx: self.marginal_depths.clone(),
        }
    }

    /// For every internal node, the leaves below it (by position in
    /// `leaves`) paired with the child each one passes through.
    pub fn node_leaf_terms(&self) -> BTreeMap<usize, Vec<(usize, usize)>> {
        let mut terms: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
        for (li, &leaf) in self.leaves.iter().enumerate() {
            let chain = self.ancestry(leaf);
            for k in 0..chain.len() - 1 {
                terms.entry(chain[k]).or_default().push((li, chain[k + 1]));
            }
        }
        terms
    }

    /// True when every child of `id` repeats its value.
    pub fn is_static(&self, id: usize) -> bool {
        let v = &self.nodes[id].value;
        self.nodes[id].children.iter().all(|&c| self.nodes[c].value == *v)
    }

    pub fn leaf_paths(&self) -> Vec<LatticePath> {
        self.leaves.iter().map(|&l| self.path_to(l)).collect()
    }

    /// Values along the chain to `id` read at the marginal times reached so far.
    pub fn marginal_values(&self, leaf: usize) -> Vec<Vec<f64>> {
        let chain = self.ancestry(leaf);
        self.marginal_depths
            .iter()
            .filter(|&&d| d < chain.len())
            .map(|&d| self.nodes[chain[d]].value.clone())
            .collect()
    }

    pub fn dump(&self) -> TreeDump {
        let nodes = self
            .nodes
            .iter()
            .map(|nd| NodeDump {
                id: nd.id,
                parent: nd.parent,
                time_num: nd.time.numer().to_string(),
                time_den: nd.time.denom().to_string(),
                value_q: grid_coords(&nd.value, nd.level)
                    .iter()
                    .map(|q| i64::try_from(q).unwrap_or(i64::MAX))
                    .collect(),
                level: nd.level,
            })
            .collect();
        TreeDump {
            params: self.params.clone(),
            node_count: self.nodes.len(),
            leaf_count: self.leaves.len(),
            nodes,
        }
    }
}
