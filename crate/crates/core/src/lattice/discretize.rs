use num_rational::BigRational;
use num_traits::Zero;

use super::grid::{b_unit, rat};
use super::LatticeError;
use crate::pathspace::{dist, StepPath, TimeGrid};

/// Discretization stopping times of a path: `tau` is increasing from 0 to 1
/// and `k[i]` is the index with `tau[k[i]] = t_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Discretization {
    pub tau: Vec<BigRational>,
    pub k: Vec<usize>,
}

impl Discretization {
    /// Increments `tau[j] - tau[j-1]`.
    pub fn increment(&self, j: usize) -> BigRational {
        &self.tau[j] - &self.tau[j - 1]
    }

    /// Number of steps inside block `i`.
    pub fn block_len(&self, i: usize) -> usize {
        self.k[i + 1] - self.k[i]
    }
}

/// Exact jump-time view of a step path.
pub(crate) struct RatPath<'a> {
    pub w: &'a StepPath,
    pub times: Vec<BigRational>,
}

impl<'a> RatPath<'a> {
    pub fn new(w: &'a StepPath) -> Self {
        let times = w.jumps().iter().map(|j| rat(j.t)).collect();
        Self { w, times }
    }

    /// Right-continuous value at an exact time.
    pub fn value_at(&self, t: &BigRational) -> &'a [f64] {
        let idx = self.times.partition_point(|s| s <= t);
        if idx == 0 {
            self.w.t0_value()
        } else {
            &self.w.jumps()[idx - 1].value
        }
    }
}

/// Stopping times at resolution `n`: inside each block the next time is the
/// earliest of the block end, the previous increment added to the current
/// time (the first increment being `c 2^-n`) and the first jump moving the
/// path at least `2^-n` away from its current value.
pub fn discretize_times(
    w: &StepPath,
    n: u32,
    grid: &TimeGrid,
    max_steps: usize,
) -> Result<Discretization, LatticeError> {
    let rp = RatPath::new(w);
    let h = b_unit(w.dim(), n);
    let thresh = (-(n as f64)).exp2();
    let ends: Vec<BigRational> = grid.times().iter().map(|&t| rat(t)).collect();
    let mut tau = vec![ends[0].clone()];
    let mut k = vec![0usize];
    for (block, end) in ends.iter().enumerate().skip(1) {
        let mut allowed = h.clone();
        let mut steps = 0usize;
        loop {
            let cur = tau.last().unwrap().clone();
            if cur == *end {
                break;
            }
            steps += 1;
            if steps > max_steps {
                return Err(LatticeError::StepLimit { block: block - 1, limit: max_steps });
            }
            let mut next = (&cur + &allowed).min(end.clone());
            let here = rp.value_at(&cur);
            let first = rp.times.partition_point(|s| *s <= cur);
            for (s, jump) in rp.times[first..].iter().zip(&w.jumps()[first..]) {
                if *s >= next {
                    break;
                }
                if dist(&jump.value, here) >= thresh {
                    next = s.clone();
                    break;
                }
            }
            allowed = &next - &cur;
            debug_assert!(!allowed.is_zero());
            tau.push(next);
        }
        k.push(tau.len() - 1);
    }
    Ok(Discretization { tau, k })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pathspace::Jump;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn constant_path_gives_mesh() {
        let w = StepPath::constant(vec![1.0]);
        let g = TimeGrid::new(vec![0.0, 1.0]).unwrap();
        let d = discretize_times(&w, 2, &g, 1000).unwrap();
        assert_eq!(d.tau, (0..=4).map(|k| q(k, 4)).collect::<Vec<_>>());
        assert_eq!(d.k, vec![0, 4]);
    }

    #[test]
    fn mesh_capped_at_marginal_times() {
        let w = StepPath::constant(vec![1.0]);
        let g = TimeGrid::new(vec![0.0, 0.3, 1.0]).unwrap();
        let d = discretize_times(&w, 2, &g, 1000).unwrap();
        assert_eq!(d.tau[d.k[1]], rat(0.3));
        assert_eq!(*d.tau.last().unwrap(), q(1, 1));
        // after the block start the increments restart from the unit
        assert_eq!(d.increment(d.k[1] + 1), q(1, 4));
    }

    #[test]
    fn jump_is_hit_exactly() {
        let w = StepPath::new(vec![1.0], vec![Jump { t: 0.3, value: vec![2.0] }]).unwrap();
        let g = TimeGrid::new(vec![0.0, 1.0]).unwrap();
        let d = discretize_times(&w, 2, &g, 10_000).unwrap();
        assert!(d.tau.contains(&rat(0.3)));
        // increments never grow inside the block
        for j in 2..d.tau.len() - 1 {
            assert!(d.increment(j) <= d.increment(j - 1));
        }
    }

    #[test]
    fn small_jump_is_ignored() {
        let w = StepPath::new(vec![1.0], vec![Jump { t: 0.3, value: vec![1.1] }]).unwrap();
        let g = TimeGrid::new(vec![0.0, 1.0]).unwrap();
        let d = discretize_times(&w, 2, &g, 1000).unwrap();
        assert_eq!(d.tau.len(), 5);
    }

    #[test]
    fn step_limit_reported() {
        let w = StepPath::new(vec![1.0], vec![Jump { t: 1e-9, value: vec![2.0] }]).unwrap();
        let g = TimeGrid::new(vec![0.0, 1.0]).unwrap();
        assert!(matches!(
            discretize_times(&w, 2, &g, 1000),
            Err(LatticeError::StepLimit { .. })
        ));
    }
}
