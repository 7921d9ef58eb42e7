use num_rational::BigRational;
use num_traits::One;

use super::discretize::{discretize_times, Discretization, RatPath};
use super::grid::{b_unit, grid_project_capped, rat, rat_to_f64, snap_below};
use super::membership::check_membership;
use super::{LatticeError, LatticePath, DEFAULT_MAX_STEPS};
use crate::pathspace::{StepPath, TimeGrid};

#[derive(Clone, Copy, Debug)]
pub struct LiftOptions {
    /// Value cap `R`; paths whose norm exceeds it are rejected.
    pub cap: Option<f64>,
    pub max_steps: usize,
}

impl Default for LiftOptions {
    fn default() -> Self {
        Self { cap: None, max_steps: DEFAULT_MAX_STEPS }
    }
}

#[derive(Clone, Debug)]
pub struct Lifted {
    pub path: LatticePath,
    pub disc: Discretization,
}

/// Lifts a step path onto the level-`n` lattice path space.
///
/// In block `i` with `N` discretization steps the partition is `t_i`,
/// `t_i + c 2^-n`, then increments `(1 - c 2^-n / dt) * dtau` snapped down
/// onto the matching `B` grid, then `t_{i+1}`. Values are projections of the
/// path at the stopping times, rounded down wherever rounding to nearest
/// would push the norm above the path's own norm.
pub fn lift(w: &StepPath, n: u32, grid: &TimeGrid, opts: LiftOptions) -> Result<Lifted, LatticeError> {
    let dim = w.dim();
    let norm = w.sup_norm();
    if let Some(cap) = opts.cap {
        if norm > cap {
            return Err(LatticeError::ExceedsCap { norm, cap });
        }
    }
    let h = b_unit(dim, n);
    let h_f = rat_to_f64(&h);
    let ends: Vec<BigRational> = grid.times().iter().map(|&t| rat(t)).collect();
    for i in 0..grid.intervals() {
        let gap = &ends[i + 1] - &ends[i];
        if h >= gap {
            return Err(LatticeError::ResolutionTooCoarse { unit: h_f, gap: rat_to_f64(&gap) });
        }
    }
    let disc = discretize_times(w, n, grid, opts.max_steps)?;
    let rp = RatPath::new(w);
    let proj = |t: &BigRational, level: u32| grid_project_capped(rp.value_at(t), level, norm);

    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut marginal_idx = Vec::new();
    for i in 0..grid.intervals() {
        let (ki, kn) = (disc.k[i], disc.k[i + 1]);
        let big_n = kn - ki;
        let gap = &ends[i + 1] - &ends[i];
        let shrink = BigRational::one() - &h / &gap;
        marginal_idx.push(times.len());
        times.push(ends[i].clone());
        values.push(proj(&ends[i], n)?);
        let mut t = &ends[i] + &h;
        for j in 1..=big_n {
            if j >= 2 {
                let target = &shrink * disc.increment(ki + j - 1);
                t = &t + snap_below(&target, dim, n + j as u32);
            }
            times.push(t.clone());
            values.push(if j < big_n {
                proj(&disc.tau[ki + j], n + j as u32)?
            } else {
                proj(&ends[i + 1], n)?
            });
        }
    }
    marginal_idx.push(times.len());
    times.push(ends[grid.intervals()].clone());
    values.push(proj(ends.last().unwrap(), n)?);

    let path = LatticePath { times, values, marginal_idx };
    check_membership(&path, &ends, n).map_err(LatticeError::NotMember)?;
    Ok(Lifted { path, disc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pathspace::Jump;

    fn grid01() -> TimeGrid {
        TimeGrid::new(vec![0.0, 1.0]).unwrap()
    }

    #[test]
    fn constant_one_lifts_to_constant_one() {
        let w = StepPath::constant(vec![1.0, 1.0]);
        let l = lift(&w, 3, &grid01(), LiftOptions::default()).unwrap();
        assert!(l.path.values.iter().all(|v| v == &vec![1.0, 1.0]));
        let s = l.path.to_step_path().unwrap();
        assert!(s.jumps().is_empty());
    }

    #[test]
    fn lifted_norm_not_above_path_norm() {
        let w = StepPath::new(
            vec![1.0],
            vec![Jump { t: 0.3125, value: vec![1.4375] }, Jump { t: 0.75, value: vec![0.6] }],
        )
        .unwrap();
        let g = TimeGrid::new(vec![0.0, 0.5, 1.0]).unwrap();
        let l = lift(&w, 2, &g, LiftOptions::default()).unwrap();
        assert!(l.path.sup_norm() <= w.sup_norm());
        assert_eq!(l.path.values[l.path.marginal_idx[2]], vec![0.5]);
    }

    #[test]
    fn cap_violation_reported() {
        let w = StepPath::new(vec![1.0], vec![Jump { t: 0.5, value: vec![3.0] }]).unwrap();
        let opts = LiftOptions { cap: Some(2.0), ..LiftOptions::default() };
        assert!(matches!(lift(&w, 2, &grid01(), opts), Err(LatticeError::ExceedsCap { .. })));
    }

    #[test]
    fn coarse_resolution_rejected() {
        let w = StepPath::constant(vec![1.0]);
        let g = TimeGrid::new(vec![0.0, 0.2, 1.0]).unwrap();
        assert!(matches!(
            lift(&w, 2, &g, LiftOptions::default()),
            Err(LatticeError::ResolutionTooCoarse { .. })
        ));
    }
}
