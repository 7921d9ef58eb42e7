use serde::{Deserialize, Serialize};

use super::{Jump, PathError, StepPath};

/// Marginal time grid `0 = t_0 < t_1 < ... < t_m = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self, PathError> {
        if times.len() < 2 || times[0] != 0.0 || *times.last().unwrap() != 1.0 {
            return Err(PathError::BadGrid(format!("grid must run from 0 to 1, got {times:?}")));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(PathError::BadGrid("grid times must increase strictly".into()));
        }
        Ok(Self { times })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Number of intervals `m`.
    pub fn intervals(&self) -> usize {
        self.times.len() - 1
    }

    pub fn gap(&self, i: usize) -> f64 {
        self.times[i] - self.times[i - 1]
    }

    /// `Delta T`, the smallest gap.
    pub fn min_gap(&self) -> f64 {
        self.times.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }

    /// Index `i >= 1` with `t in (t_{i-1}, t_i]`; `t = 0` maps to 1.
    pub fn block_of(&self, t: f64) -> usize {
        self.times.partition_point(|&s| s < t).max(1)
    }
}

/// Per-interval shifts `eps_i >= 0` with Euclidean norm below `Delta T`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftVector {
    eps: Vec<f64>,
}

impl ShiftVector {
    pub fn new(eps: Vec<f64>, grid: &TimeGrid) -> Result<Self, PathError> {
        if eps.len() != grid.intervals() {
            return Err(PathError::BadShift(format!(
                "{} shifts for {} intervals",
                eps.len(),
                grid.intervals()
            )));
        }
        if eps.iter().any(|e| !e.is_finite() || *e < 0.0) {
            return Err(PathError::BadShift("shifts must be finite and nonnegative".into()));
        }
        let v = Self { eps };
        let (norm, gap) = (v.norm(), grid.min_gap());
        if norm >= gap {
            return Err(PathError::ShiftTooLarge { norm, gap });
        }
        Ok(v)
    }

    pub fn zero(grid: &TimeGrid) -> Self {
        Self {
            eps: vec![0.0; grid.intervals()],
        }
    }

    pub fn eps(&self) -> &[f64] {
        &self.eps
    }

    pub fn norm(&self) -> f64 {
        self.eps.iter().map(|e| e * e).sum::<f64>().sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShiftKind {
    /// Frozen at `t_{i-1}` for `eps_i`, then linear up to `t_i`.
    Forward,
    /// Linear from `t_{i-1}`, reaching `t_i` an amount `eps_i` early.
    Backward,
}

/// The continuous, nondecreasing, onto time changes `f_eps` and `b_eps`;
/// both fix every grid time.
#[derive(Clone, Debug)]
pub struct TimeChange {
    grid: TimeGrid,
    shift: ShiftVector,
    kind: ShiftKind,
}

impl TimeChange {
    pub fn forward(grid: &TimeGrid, shift: &ShiftVector) -> Self {
        Self {
            grid: grid.clone(),
            shift: shift.clone(),
            kind: ShiftKind::Forward,
        }
    }

    pub fn backward(grid: &TimeGrid, shift: &ShiftVector) -> Self {
        Self {
            grid: grid.clone(),
            shift: shift.clone(),
            kind: ShiftKind::Backward,
        }
    }

    fn block(&self, i: usize) -> (f64, f64, f64) {
        let lo = self.grid.times[i - 1];
        let gap = self.grid.gap(i);
        let eps = self.shift.eps[i - 1];
        (lo, eps, gap / (gap - eps))
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let i = self.grid.block_of(t);
        let (lo, eps, slope) = self.block(i);
        let hi = self.grid.times[i];
        let v = match self.kind {
            ShiftKind::Forward => lo + slope * (t - lo - eps).max(0.0),
            ShiftKind::Backward => hi - (hi - lo - slope * (t - lo)).max(0.0),
        };
        v.clamp(lo, hi)
    }

    /// `inf { t : g(t) >= s }` for `s in (0, 1]`, which is where a jump of
    /// `omega` at `s` lands in `omega o g`.
    pub fn preimage(&self, s: f64) -> f64 {
        let i = self.grid.block_of(s);
        let (lo, eps, slope) = self.block(i);
        let hi = self.grid.times[i];
        let t = match self.kind {
            ShiftKind::Forward => lo + eps + (s - lo) / slope,
            ShiftKind::Backward => lo + (s - lo) / slope,
        };
        t.clamp(lo, hi)
    }
}

/// `omega o g` as an exact step path: each jump moves to its preimage.
pub fn apply_time_change(w: &StepPath, g: &TimeChange) -> StepPath {
    let jumps = w
        .jumps()
        .iter()
        .map(|j| Jump {
            t: g.preimage(j.t),
            value: j.value.clone(),
        })
        .collect();
    StepPath::from_parts_unchecked(w.t0_value().to_vec(), jumps)
}

/// Rescales a path on `[0, 1 + delta]` to `[0, 1]`: `omega_bar_t = omega_{(1+delta) t}`.
pub fn dilate(t0_value: Vec<f64>, jumps: Vec<Jump>, delta: f64) -> Result<StepPath, PathError> {
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(PathError::BadParameter(format!("dilation {delta}")));
    }
    let k = 1.0 + delta;
    let raw = StepPath::with_horizon(t0_value, jumps, k)?;
    let scaled = raw
        .jumps()
        .iter()
        .map(|j| Jump {
            t: j.t / k,
            value: j.value.clone(),
        })
        .collect();
    StepPath::new(raw.t0_value().to_vec(), scaled)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> TimeGrid {
        TimeGrid::new(vec![0.0, 1.0]).unwrap()
    }

    #[test]
    fn zero_shift_is_identity() {
        let g = TimeGrid::new(vec![0.0, 0.25, 1.0]).unwrap();
        let z = ShiftVector::zero(&g);
        for t in [0.0, 0.1, 0.25, 0.6, 1.0] {
            assert_eq!(TimeChange::forward(&g, &z).eval(t), t);
            assert_eq!(TimeChange::backward(&g, &z).eval(t), t);
        }
    }

    #[test]
    fn forward_value_from_definition() {
        let g = unit();
        let f = TimeChange::forward(&g, &ShiftVector::new(vec![0.5], &g).unwrap());
        assert_eq!(f.eval(0.75), 0.5);
        assert_eq!(f.eval(0.4), 0.0);
        assert_eq!(f.eval(1.0), 1.0);
    }

    #[test]
    fn backward_fixes_grid_and_runs_early() {
        let g = unit();
        let b = TimeChange::backward(&g, &ShiftVector::new(vec![0.5], &g).unwrap());
        assert_eq!(b.eval(0.25), 0.5);
        assert_eq!(b.eval(0.5), 1.0);
        assert_eq!(b.eval(0.9), 1.0);
    }

    #[test]
    fn forward_freezes_block_start() {
        let g = TimeGrid::new(vec![0.0, 0.5, 1.0]).unwrap();
        let s = ShiftVector::new(vec![0.1, 0.2], &g).unwrap();
        let w = StepPath::from_pairs(vec![1.0], vec![(0.52, vec![2.0]), (0.9, vec![0.5])]).unwrap();
        let moved = apply_time_change(&w, &TimeChange::forward(&g, &s));
        for t in [0.5, 0.55, 0.6, 0.7] {
            assert_eq!(moved.value_at(t), w.value_at(0.5), "t = {t}");
        }
        assert_eq!(moved.value_at(1.0), w.value_at(1.0));
    }

    #[test]
    fn shift_norm_must_stay_below_gap() {
        let g = TimeGrid::new(vec![0.0, 0.5, 1.0]).unwrap();
        assert!(ShiftVector::new(vec![0.4, 0.4], &g).is_err());
        assert!(ShiftVector::new(vec![0.3, 0.3], &g).is_ok());
    }

    #[test]
    fn dilation_rescales_jump_times() {
        let w = dilate(vec![1.0], vec![Jump { t: 0.55, value: vec![2.0] }], 0.1).unwrap();
        assert!((w.jumps()[0].t - 0.5).abs() < 1e-15);
        let same = dilate(vec![1.0], vec![Jump { t: 0.55, value: vec![2.0] }], 0.0).unwrap();
        assert_eq!(same.jumps()[0].t, 0.55);
    }
}
