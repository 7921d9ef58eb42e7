use num_rational::BigRational;

use super::grid::rat_to_f64;
use super::LatticeError;
use crate::pathspace::{Jump, StepPath};

/// Step path on an explicit rational partition `0 = s_0 < ... < s_N = 1`:
/// `values[k]` holds on `[s_k, s_{k+1})` and `values[N]` at time 1.
/// `marginal_idx[i]` is the partition index of the marginal time `t_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticePath {
    pub times: Vec<BigRational>,
    pub values: Vec<Vec<f64>>,
    pub marginal_idx: Vec<usize>,
}

impl LatticePath {
    pub fn dim(&self) -> usize {
        self.values[0].len()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values
            .iter()
            .map(|v| crate::pathspace::euclid(v))
            .fold(0.0, f64::max)
    }

    /// Float step path; partition points without a value change disappear.
    pub fn to_step_path(&self) -> Result<StepPath, LatticeError> {
        let jumps = self
            .times
            .iter()
            .zip(&self.values)
            .skip(1)
            .map(|(t, v)| Jump {
                t: rat_to_f64(t),
                value: v.clone(),
            })
            .collect();
        Ok(StepPath::new(self.values[0].clone(), jumps)?)
    }
}
