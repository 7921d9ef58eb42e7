use serde::{Deserialize, Serialize};

use super::PathError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Jump {
    pub t: f64,
    pub value: Vec<f64>,
}

/// Right-continuous step path on `[0, 1]`: `t0_value` on `[0, t_1)`, then
/// `jumps[k].value` on `[t_{k+1}, t_{k+2})`.
///
/// Jumps that do not change the value are dropped on construction, so two
/// paths are equal exactly when they agree as functions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPath", into = "RawPath")]
pub struct StepPath {
    dim: usize,
    t0_value: Vec<f64>,
    jumps: Vec<Jump>,
}

#[derive(Serialize, Deserialize)]
struct RawPath {
    dim: usize,
    t0_value: Vec<f64>,
    jumps: Vec<Jump>,
}

impl TryFrom<RawPath> for StepPath {
    type Error = PathError;

    fn try_from(raw: RawPath) -> Result<Self, PathError> {
        if raw.t0_value.len() != raw.dim {
            return Err(PathError::DimensionMismatch {
                expected: raw.dim,
                found: raw.t0_value.len(),
            });
        }
        StepPath::new(raw.t0_value, raw.jumps)
    }
}

impl From<StepPath> for RawPath {
    fn from(p: StepPath) -> Self {
        RawPath {
            dim: p.dim,
            t0_value: p.t0_value,
            jumps: p.jumps,
        }
    }
}

pub fn euclid(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

impl StepPath {
    pub fn new(t0_value: Vec<f64>, jumps: Vec<Jump>) -> Result<Self, PathError> {
        Self::with_horizon(t0_value, jumps, 1.0)
    }

    /// Path on `[0, horizon]`; only [`dilate`](super::dilate) uses a horizon
    /// other than 1.
    pub(crate) fn with_horizon(t0_value: Vec<f64>, jumps: Vec<Jump>, horizon: f64) -> Result<Self, PathError> {
        let dim = t0_value.len();
        if dim == 0 {
            return Err(PathError::DimensionMismatch { expected: 1, found: 0 });
        }
        if t0_value.iter().any(|x| !x.is_finite()) {
            return Err(PathError::NonFinite);
        }
        let mut prev_t = 0.0;
        let mut kept: Vec<Jump> = Vec::with_capacity(jumps.len());
        for j in jumps {
            if j.value.len() != dim {
                return Err(PathError::DimensionMismatch {
                    expected: dim,
                    found: j.value.len(),
                });
            }
            if !j.t.is_finite() || j.value.iter().any(|x| !x.is_finite()) {
                return Err(PathError::NonFinite);
            }
            if j.t <= prev_t || j.t > horizon {
                return Err(PathError::BadJumpTime { t: j.t, horizon });
            }
            prev_t = j.t;
            let last = kept.last().map_or(&t0_value, |k| &k.value);
            if *last != j.value {
                kept.push(j);
            }
        }
        Ok(Self {
            dim,
            t0_value,
            jumps: kept,
        })
    }

    pub fn constant(value: Vec<f64>) -> Self {
        Self {
            dim: value.len(),
            t0_value: value,
            jumps: Vec::new(),
        }
    }

    /// Builds a path from `(time, value)` pairs without the `Jump` wrapper.
    pub fn from_pairs(t0_value: Vec<f64>, pairs: Vec<(f64, Vec<f64>)>) -> Result<Self, PathError> {
        Self::new(
            t0_value,
            pairs.into_iter().map(|(t, value)| Jump { t, value }).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn t0_value(&self) -> &[f64] {
        &self.t0_value
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    pub fn jump_times(&self) -> Vec<f64> {
        self.jumps.iter().map(|j| j.t).collect()
    }

    /// `omega_t` (right-continuous).
    pub fn value_at(&self, t: f64) -> &[f64] {
        let k = self.jumps.partition_point(|j| j.t <= t);
        if k == 0 {
            &self.t0_value
        } else {
            &self.jumps[k - 1].value
        }
    }

    /// `omega_{t-}`; equals `omega_0` at `t = 0`.
    pub fn left_limit(&self, t: f64) -> &[f64] {
        let k = self.jumps.partition_point(|j| j.t < t);
        if k == 0 {
            &self.t0_value
        } else {
            &self.jumps[k - 1].value
        }
    }

    /// All distinct values in time order, starting with `omega_0`.
    pub fn values(&self) -> impl Iterator<Item = &[f64]> + '_ {
        std::iter::once(self.t0_value.as_slice()).chain(self.jumps.iter().map(|j| j.value.as_slice()))
    }

    /// `(start, end, value)` pieces covering `[0, 1]`; a jump at 1 yields a
    /// final piece of zero length.
    pub fn segments(&self) -> Vec<(f64, f64, &[f64])> {
        let mut out = Vec::with_capacity(self.jumps.len() + 1);
        let mut start = 0.0;
        let mut value: &[f64] = &self.t0_value;
        for j in &self.jumps {
            out.push((start, j.t, value));
            start = j.t;
            value = &j.value;
        }
        out.push((start, 1.0f64.max(start), value));
        out
    }

    /// `sup_t |omega_t|` with the Euclidean norm.
    pub fn sup_norm(&self) -> f64 {
        self.values().map(euclid).fold(0.0, f64::max)
    }

    /// `sup_t omega_t[coord]`.
    pub fn coord_max(&self, coord: usize) -> f64 {
        self.values().map(|v| v[coord]).fold(f64::NEG_INFINITY, f64::max)
    }

    /// `int_0^1 omega_t dt`.
    pub fn integral(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.dim];
        for (s, e, v) in self.segments() {
            for (a, x) in acc.iter_mut().zip(v) {
                *a += (e - s) * x;
            }
        }
        acc
    }

    /// `int_0^1 |omega_t| dt`.
    pub fn abs_integral(&self) -> f64 {
        self.segments().iter().map(|(s, e, v)| (e - s) * euclid(v)).sum()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values().all(|v| v.iter().all(|x| *x >= 0.0))
    }

    /// Values at each of `times`.
    pub fn sample(&self, times: &[f64]) -> Vec<Vec<f64>> {
        times.iter().map(|&t| self.value_at(t).to_vec()).collect()
    }

    /// Restriction to `[s, t]`: value at `s` and the jumps in `(s, t]`.
    pub fn restrict(&self, s: f64, t: f64) -> (&[f64], &[Jump]) {
        let lo = self.jumps.partition_point(|j| j.t <= s);
        let hi = self.jumps.partition_point(|j| j.t <= t);
        (self.value_at(s), &self.jumps[lo..hi])
    }

    pub(crate) fn from_parts_unchecked(t0_value: Vec<f64>, jumps: Vec<Jump>) -> Self {
        Self {
            dim: t0_value.len(),
            t0_value,
            jumps,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_level() -> StepPath {
        StepPath::from_pairs(vec![1.0], vec![(0.5, vec![3.0])]).unwrap()
    }

    #[test]
    fn evaluation_is_right_continuous() {
        let p = two_level();
        assert_eq!(p.value_at(0.49), &[1.0]);
        assert_eq!(p.value_at(0.5), &[3.0]);
        assert_eq!(p.left_limit(0.5), &[1.0]);
        assert_eq!(p.value_at(1.0), &[3.0]);
    }

    #[test]
    fn integrals_and_norms() {
        let p = two_level();
        assert_eq!(p.integral(), vec![2.0]);
        assert_eq!(p.abs_integral(), 2.0);
        assert_eq!(p.sup_norm(), 3.0);
    }

    #[test]
    fn silent_jumps_are_dropped() {
        let p = StepPath::from_pairs(vec![1.0], vec![(0.2, vec![1.0]), (0.4, vec![2.0])]).unwrap();
        assert_eq!(p.jump_times(), vec![0.4]);
    }

    #[test]
    fn rejects_unordered_times() {
        assert!(StepPath::from_pairs(vec![1.0], vec![(0.4, vec![2.0]), (0.4, vec![3.0])]).is_err());
        assert!(StepPath::from_pairs(vec![1.0], vec![(0.0, vec![2.0])]).is_err());
        assert!(StepPath::from_pairs(vec![1.0], vec![(1.5, vec![2.0])]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let p = two_level();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"dim":1,"t0_value":[1.0],"jumps":[{"t":0.5,"value":[3.0]}]}"#);
        assert_eq!(serde_json::from_str::<StepPath>(&s).unwrap(), p);
    }
}
