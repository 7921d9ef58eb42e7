//! Instance generators and independent oracles shared by the integration
//! targets.
#![allow(dead_code)]

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use motlab::lattice::{enumerate_tree, LatticeParams, LatticeTree};
use motlab::measures::{DiscreteMeasure, Peacock};
use motlab::pathspace::{Jump, MarginalFn, Payoff, StepPath, TableRow};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// Merges equal points and drops empty weights.
pub fn line_law(atoms: &[(f64, f64)]) -> DiscreteMeasure {
    let mut sorted: Vec<(f64, f64)> = atoms.iter().copied().filter(|a| a.1 > 0.0).collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (x, w) in sorted {
        match merged.last_mut() {
            Some(last) if last.0 == x => last.1 += w,
            _ => merged.push((x, w)),
        }
    }
    let xs: Vec<f64> = merged.iter().map(|a| a.0).collect();
    let ws: Vec<f64> = merged.iter().map(|a| a.1).collect();
    DiscreteMeasure::on_line(&xs, &ws).unwrap()
}

/// Splits chosen atoms into two-point laws with the same mean. Offsets are
/// `step * {1, 3}` so every weight stays dyadic; points stay in `[lo, hi]`.
pub fn spread(r: &mut Rng8, law: &DiscreteMeasure, step: f64, lo: f64, hi: f64, max_support: usize) -> DiscreteMeasure {
    loop {
        let mut atoms = Vec::new();
        for (x, w) in law.atoms() {
            let x = x[0];
            if r.gen_bool(0.5) {
                let (a, b) = *[(1.0, 1.0), (1.0, 3.0), (3.0, 1.0), (2.0, 2.0)].choose(r).unwrap();
                let (down, up) = (x - a * step, x + b * step);
                if down >= lo && up <= hi {
                    atoms.push((down, w * b / (a + b)));
                    atoms.push((up, w * a / (a + b)));
                    continue;
                }
            }
            atoms.push((x, w));
        }
        let out = line_law(&atoms);
        if out.len() <= max_support {
            return out;
        }
    }
}

/// Random one-dimensional peacock with `m + 1` equally spaced marginals
/// on the integers.
pub fn random_peacock(r: &mut Rng8, m: usize, max_support: usize) -> Peacock {
    let first = if r.gen_bool(0.5) {
        DiscreteMeasure::dirac(vec![r.gen_range(2..=4) as f64])
    } else {
        let a = r.gen_range(1..=3) as f64;
        line_law(&[(a, 0.5), (a + 2.0, 0.5)])
    };
    let mut laws = vec![first];
    for _ in 0..m {
        let next = spread(r, laws.last().unwrap(), 1.0, -8.0, 14.0, max_support);
        laws.push(next);
    }
    let times = (0..=m).map(|i| i as f64 / m as f64).collect();
    Peacock::new(times, laws).unwrap()
}

fn supports(p: &Peacock) -> Vec<Vec<Vec<f64>>> {
    p.laws().iter().map(|l| l.points().to_vec()).collect()
}

fn all_tuples(sup: &[Vec<Vec<f64>>]) -> Vec<Vec<Vec<f64>>> {
    let mut out: Vec<Vec<Vec<f64>>> = vec![Vec::new()];
    for s in sup {
        out = out
            .into_iter()
            .flat_map(|t| {
                s.iter().map(move |x| {
                    let mut t = t.clone();
                    t.push(x.clone());
                    t
                })
            })
            .collect();
    }
    out
}

/// Random payoff depending on the values at the marginal times of `p`;
/// lookup tables keyed on the supports are drawn only with `tables`.
pub fn random_marginal_payoff(r: &mut Rng8, p: &Peacock, tables: bool) -> Payoff {
    let times = p.times().to_vec();
    let k = times.len();
    let from = r.gen_range(0..k - 1);
    let to = r.gen_range(from + 1..k);
    let strike = r.gen_range(-1..=3) as f64;
    let func = match r.gen_range(0..if tables { 5 } else { 4 }) {
        0 => MarginalFn::AbsIncrement { from, to },
        1 => MarginalFn::ForwardStart { from, to, coord: 0, strike: strike.abs() },
        2 => MarginalFn::Call { index: to, coord: 0, strike: strike + 2.0 },
        3 => MarginalFn::Put { index: to, coord: 0, strike: strike + 3.0 },
        _ => {
            let rows = all_tuples(&supports(p))
                .into_iter()
                .map(|key| TableRow { key, value: r.gen_range(0..=16) as f64 / 16.0 })
                .collect();
            MarginalFn::Table { rows, default: None }
        }
    };
    Payoff::MarginalGrid { times, func }
}

/// Pseudo-random value in `[0, 1)` determined by the exact bits of a path.
pub fn path_hash(w: &StepPath, salt: u64) -> f64 {
    let mut h = DefaultHasher::new();
    salt.hash(&mut h);
    for x in w.t0_value() {
        x.to_bits().hash(&mut h);
    }
    for j in w.jumps() {
        j.t.to_bits().hash(&mut h);
        for x in &j.value {
            x.to_bits().hash(&mut h);
        }
    }
    (h.finish() >> 11) as f64 / (1u64 << 53) as f64
}

/// Bounded payoff with independent-looking values on distinct paths.
pub fn hash_payoff(salt: u64) -> Payoff {
    Payoff::custom(&format!("hash{salt}"), true, move |w| Ok(path_hash(w, salt)))
}

/// Random lattice tree with at most `max_nodes` nodes.
pub fn random_tree(r: &mut Rng8, max_nodes: u128) -> LatticeTree {
    loop {
        let n = r.gen_range(1..=2);
        let dim = if r.gen_bool(0.2) { 2 } else { 1 };
        let times = if r.gen_bool(0.5) { vec![0.0, 1.0] } else { vec![0.0, 0.5, 1.0] };
        let radius = *[1.0, 1.5, 2.0, 3.0].choose(r).unwrap();
        let j_max = r.gen_range(0..=2);
        let mut params = LatticeParams::new(n, dim, times, radius, j_max);
        let step = 0.5f64.powi(n as i32);
        let cells = (radius / step) as i64;
        params.root = Some((0..dim).map(|_| r.gen_range(1..cells) as f64 * step).collect());
        if params.node_count() <= max_nodes && params.node_count() > 3 {
            return enumerate_tree(&params).unwrap();
        }
    }
}

/// Random nonnegative step path with up to `max_jumps` jumps.
pub fn random_path(r: &mut Rng8, dim: usize, max_jumps: usize, hi: f64) -> StepPath {
    let t0: Vec<f64> = (0..dim).map(|_| r.gen_range(0.0..hi)).collect();
    let k = r.gen_range(0..=max_jumps);
    let mut ts: Vec<f64> = (0..k).map(|_| r.gen_range(0.0..1.0f64)).filter(|t| *t > 0.0).collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let jumps = ts
        .into_iter()
        .map(|t| Jump { t, value: (0..dim).map(|_| r.gen_range(0.0..hi)).collect() })
        .collect();
    StepPath::new(t0, jumps).unwrap()
}

/// Random nonnegative step path whose jump times are multiples of
/// `2^-bits`.
pub fn random_dyadic_path(r: &mut Rng8, dim: usize, max_jumps: usize, hi: f64, bits: u32) -> StepPath {
    let slots = 1i64 << bits;
    let t0: Vec<f64> = (0..dim).map(|_| r.gen_range(0.0..hi)).collect();
    let k = r.gen_range(0..=max_jumps);
    let mut ts: Vec<i64> = (0..k).map(|_| r.gen_range(1..slots)).collect();
    ts.sort_unstable();
    ts.dedup();
    let jumps = ts
        .into_iter()
        .map(|q| Jump { t: q as f64 / slots as f64, value: (0..dim).map(|_| r.gen_range(0.0..hi)).collect() })
        .collect();
    StepPath::new(t0, jumps).unwrap()
}

/// Basic feasible solutions of `{ x >= 0 : A x = b }`, found by solving
/// every square-or-tall column subsystem with linearly independent columns.
pub fn polytope_vertices(a: &[Vec<f64>], b: &[f64]) -> Vec<Vec<f64>> {
    let n = a[0].len();
    assert!(n <= 16, "vertex enumeration is exponential");
    let mut out: Vec<Vec<f64>> = Vec::new();
    for mask in 0u32..(1 << n) {
        let cols: Vec<usize> = (0..n).filter(|j| mask >> j & 1 == 1).collect();
        let Some(xs) = solve_columns(a, b, &cols) else { continue };
        if xs.iter().any(|x| *x < -1e-12) {
            continue;
        }
        let mut x = vec![0.0; n];
        for (j, v) in cols.iter().zip(xs) {
            x[*j] = v.max(0.0);
        }
        if !out.iter().any(|y| y.iter().zip(&x).all(|(p, q)| (p - q).abs() < 1e-12)) {
            out.push(x);
        }
    }
    out
}

/// Unique solution of `A[:, cols] y = b` by Gaussian elimination, or `None`
/// when the columns are dependent or the system is inconsistent.
fn solve_columns(a: &[Vec<f64>], b: &[f64], cols: &[usize]) -> Option<Vec<f64>> {
    let m = a.len();
    let k = cols.len();
    let mut t: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r: Vec<f64> = cols.iter().map(|&j| row[j]).collect();
            r.push(*bi);
            r
        })
        .collect();
    let mut row = 0;
    for c in 0..k {
        let piv = (row..m).max_by(|&i, &j| t[i][c].abs().total_cmp(&t[j][c].abs()))?;
        if t[piv][c].abs() < 1e-12 {
            return None;
        }
        t.swap(row, piv);
        for i in 0..m {
            if i != row {
                let f = t[i][c] / t[row][c];
                if f != 0.0 {
                    for j in c..=k {
                        t[i][j] -= f * t[row][j];
                    }
                }
            }
        }
        row += 1;
    }
    if t[row..].iter().any(|r| r[k].abs() > 1e-10) {
        return None;
    }
    Some((0..k).map(|c| t[c][k] / t[c][c]).collect())
}

/// Martingale couplings of two laws on the line as `{ pi >= 0 : A pi = b }`,
/// with `pi` indexed `i * |nu| + j`.
pub fn coupling_system(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> (Vec<Vec<f64>>, Vec<f64>) {
    let (m, n) = (mu.len(), nu.len());
    let mut a = Vec::new();
    let mut b = Vec::new();
    for i in 0..m {
        let mut row = vec![0.0; m * n];
        for j in 0..n {
            row[i * n + j] = 1.0;
        }
        a.push(row);
        b.push(mu.weights()[i]);
        let mut mg = vec![0.0; m * n];
        for j in 0..n {
            mg[i * n + j] = nu.points()[j][0] - mu.points()[i][0];
        }
        a.push(mg);
        b.push(0.0);
    }
    for j in 0..n {
        let mut row = vec![0.0; m * n];
        for i in 0..m {
            row[i * n + j] = 1.0;
        }
        a.push(row);
        b.push(nu.weights()[j]);
    }
    (a, b)
}
