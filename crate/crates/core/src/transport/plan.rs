use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::TransportError;
use crate::measures::{w1_distance, DiscreteMeasure, Peacock};
use crate::pathspace::{Jump, StepPath};

/// Finitely supported path measure.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransportPlan {
    /// Marginal times the plan is calibrated at.
    pub times: Vec<f64>,
    pub support: Vec<StepPath>,
    pub probs: Vec<f64>,
}

/// Residuals of a plan against the plan invariants.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlanReport {
    pub mass_error: f64,
    /// Sum over conditioning prefixes of `|| sum p (X_next - X_now) ||_1`.
    pub martingale_residual: f64,
    /// W1 distance of the plan's law at each marginal time to the target.
    pub marginal_w1: Vec<f64>,
}

impl PlanReport {
    pub fn passes(&self, tol: f64, radius: f64) -> bool {
        self.mass_error <= tol
            && self.martingale_residual <= tol
            && self.marginal_w1.iter().all(|w| *w <= tol + radius)
    }
}

pub(crate) fn bits_key(vals: &[Vec<f64>]) -> Vec<u64> {
    vals.iter()
        .flat_map(|v| v.iter().map(|x| if *x == 0.0 { 0 } else { x.to_bits() }))
        .collect()
}

impl TransportPlan {
    /// Plan on value tuples; each path holds `x_i` on `[t_i, t_{i+1})` and
    /// the first value from time 0.
    pub fn from_tuples(times: &[f64], tuples: &[Vec<Vec<f64>>], probs: Vec<f64>) -> Result<Self, TransportError> {
        Self::from_tuples_with_offsets(times, tuples, probs, None)
    }

    /// As [`Self::from_tuples`], moving the jump of block `i` to
    /// `t_i + theta_i (t_{i+1} - t_i)` with `theta_i in (0, 1]`.
    pub fn from_tuples_with_offsets(
        times: &[f64],
        tuples: &[Vec<Vec<f64>>],
        probs: Vec<f64>,
        theta: Option<&[f64]>,
    ) -> Result<Self, TransportError> {
        let support = tuples
            .iter()
            .map(|tuple| {
                let jumps = (1..times.len())
                    .map(|i| {
                        let th = theta.map_or(1.0, |th| th[i - 1]);
                        let t = if th >= 1.0 {
                            times[i]
                        } else {
                            times[i - 1] + th * (times[i] - times[i - 1])
                        };
                        Jump { t, value: tuple[i].clone() }
                    })
                    .collect();
                StepPath::new(tuple[0].clone(), jumps)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { times: times.to_vec(), support, probs })
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.support.first().map_or(0, StepPath::dim)
    }

    pub fn expect(&self, f: impl Fn(&StepPath) -> Result<f64, TransportError>) -> Result<f64, TransportError> {
        let mut acc = 0.0;
        for (w, p) in self.support.iter().zip(&self.probs) {
            if *p != 0.0 {
                acc += p * f(w)?;
            }
        }
        Ok(acc)
    }

    /// Law of `X_t`.
    pub fn law_at(&self, t: f64) -> Result<DiscreteMeasure, TransportError> {
        let atoms = self
            .support
            .iter()
            .zip(&self.probs)
            .map(|(w, p)| (w.value_at(t).to_vec(), p.max(0.0)))
            .collect();
        Ok(DiscreteMeasure::from_atoms(self.dim(), atoms)?)
    }

    /// Checkpoints at which the natural filtration can change: time 0, the
    /// marginal times and every jump time in the support.
    pub fn checkpoints(&self) -> Vec<f64> {
        let mut ts: Vec<f64> = vec![0.0];
        ts.extend(self.times.iter().copied());
        for w in &self.support {
            ts.extend(w.jump_times());
        }
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        ts
    }

    /// Weighted martingale residual conditioned on full prefixes at the
    /// checkpoints.
    pub fn martingale_residual(&self) -> f64 {
        let cps = self.checkpoints();
        let samples: Vec<Vec<Vec<f64>>> = self.support.iter().map(|w| w.sample(&cps)).collect();
        let d = self.dim();
        let mut total = 0.0;
        for k in 0..cps.len().saturating_sub(1) {
            let mut groups: BTreeMap<Vec<u64>, Vec<f64>> = BTreeMap::new();
            for (s, p) in samples.iter().zip(&self.probs) {
                let g = groups.entry(bits_key(&s[..=k])).or_insert_with(|| vec![0.0; d]);
                for c in 0..d {
                    g[c] += p * (s[k + 1][c] - s[k][c]);
                }
            }
            total += groups.values().flat_map(|g| g.iter().map(|x| x.abs())).sum::<f64>();
        }
        total
    }

    pub fn report(&self, p: &Peacock) -> Result<PlanReport, TransportError> {
        let mass_error = (self.probs.iter().sum::<f64>() - 1.0).abs()
            + self.probs.iter().map(|q| (-q).max(0.0)).sum::<f64>();
        let mut marginal_w1 = Vec::with_capacity(p.len());
        for (t, law) in p.times().iter().zip(p.laws()) {
            marginal_w1.push(w1_distance(&self.law_at(*t)?, law)?);
        }
        Ok(PlanReport { mass_error, martingale_residual: self.martingale_residual(), marginal_w1 })
    }

    /// Drops zero-mass paths.
    pub fn pruned(mut self) -> Self {
        let keep: Vec<bool> = self.probs.iter().map(|p| *p > 0.0).collect();
        let mut it = keep.iter();
        self.support.retain(|_| *it.next().unwrap());
        self.probs.retain(|p| *p > 0.0);
        self
    }
}
