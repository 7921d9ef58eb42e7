use serde::{Deserialize, Serialize};

use super::{check_convex_order, DiscreteMeasure, MeasureError, OrderCertificate, OrderWitness, MEAN_TOL};

/// Marginal laws at increasing times, increasing in convex order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPeacock", into = "RawPeacock")]
pub struct Peacock {
    dim: usize,
    times: Vec<f64>,
    laws: Vec<DiscreteMeasure>,
}

#[derive(Clone, Serialize, Deserialize)]
struct RawPeacock {
    dim: usize,
    times: Vec<f64>,
    marginals: Vec<DiscreteMeasure>,
}

impl TryFrom<RawPeacock> for Peacock {
    type Error = MeasureError;

    fn try_from(raw: RawPeacock) -> Result<Self, Self::Error> {
        if let Some(m) = raw.marginals.iter().find(|m| m.dim() != raw.dim) {
            return Err(MeasureError::DimensionMismatch {
                expected: raw.dim,
                found: m.dim(),
            });
        }
        Peacock::new(raw.times, raw.marginals)
    }
}

impl From<Peacock> for RawPeacock {
    fn from(p: Peacock) -> Self {
        RawPeacock {
            dim: p.dim,
            times: p.times,
            marginals: p.laws,
        }
    }
}

impl Peacock {
    pub fn new(times: Vec<f64>, laws: Vec<DiscreteMeasure>) -> Result<Self, MeasureError> {
        let p = Self::from_parts(times, laws)?;
        p.validate()?;
        Ok(p)
    }

    /// Structural checks only (times, dimensions); convex order is not tested.
    pub(crate) fn from_parts(times: Vec<f64>, laws: Vec<DiscreteMeasure>) -> Result<Self, MeasureError> {
        if laws.is_empty() {
            return Err(MeasureError::InvalidTimes("no marginals".into()));
        }
        if times.len() != laws.len() {
            return Err(MeasureError::InvalidTimes(format!(
                "{} times for {} marginals",
                times.len(),
                laws.len()
            )));
        }
        if times.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err(MeasureError::InvalidTimes("times must lie in [0, 1]".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(MeasureError::InvalidTimes("times must increase strictly".into()));
        }
        if *times.last().unwrap() != 1.0 {
            return Err(MeasureError::InvalidTimes("last time must be 1".into()));
        }
        let dim = laws[0].dim();
        for l in &laws {
            laws[0].check_dim(l)?;
        }
        Ok(Self { dim, times, laws })
    }

    /// Checks barycenters against the first law and convex order of
    /// consecutive laws, reporting the first failure.
    pub fn validate(&self) -> Result<(), MeasureError> {
        let m0 = self.laws[0].mean();
        for (t, law) in self.times.iter().zip(&self.laws).skip(1) {
            for (coord, (a, b)) in m0.iter().zip(law.mean()).enumerate() {
                if (a - b).abs() > MEAN_TOL {
                    return Err(MeasureError::NotPeacock {
                        s: self.times[0],
                        t: *t,
                        witness: OrderWitness::Mean { coord, lhs: *a, rhs: b },
                    });
                }
            }
        }
        for k in 1..self.laws.len() {
            if let OrderCertificate::Violated(witness) = check_convex_order(&self.laws[k - 1], &self.laws[k])? {
                return Err(MeasureError::NotPeacock {
                    s: self.times[k - 1],
                    t: self.times[k],
                    witness,
                });
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn laws(&self) -> &[DiscreteMeasure] {
        &self.laws
    }

    pub fn law(&self, i: usize) -> &DiscreteMeasure {
        &self.laws[i]
    }

    pub fn len(&self) -> usize {
        self.laws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.laws.is_empty()
    }

    pub fn first(&self) -> &DiscreteMeasure {
        &self.laws[0]
    }

    pub fn terminal(&self) -> &DiscreteMeasure {
        self.laws.last().unwrap()
    }

    /// Law at the smallest listed time `>= t`.
    pub fn law_at(&self, t: f64) -> Result<&DiscreteMeasure, MeasureError> {
        let idx = self.times.partition_point(|&s| s < t);
        self.laws.get(idx).ok_or(MeasureError::QueryOutOfRange(t))
    }

    /// Copy with the law at index `i` dropped (index 0 and the last are kept).
    pub fn without(&self, i: usize) -> Self {
        let mut times = self.times.clone();
        let mut laws = self.laws.clone();
        times.remove(i);
        laws.remove(i);
        Self {
            dim: self.dim,
            times,
            laws,
        }
    }
}

/// Right-constant extension of `p` to the union of its times and `query`.
pub fn close_peacock(p: &Peacock, query: &[f64]) -> Result<Peacock, MeasureError> {
    let mut times = p.times.clone();
    for &q in query {
        if !(0.0..=1.0).contains(&q) {
            return Err(MeasureError::QueryOutOfRange(q));
        }
        p.law_at(q)?;
        times.push(q);
    }
    times.sort_by(f64::total_cmp);
    times.dedup();
    let laws = times
        .iter()
        .map(|&t| p.law_at(t).cloned())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Peacock {
        dim: p.dim,
        times,
        laws,
    })
}
