use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{MeasureError, WEIGHT_TOL};

/// A probability measure on `R^dim` with finitely many atoms.
///
/// Points are kept in lexicographic order, so two measures built from the same
/// atoms in any order compare equal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasure", into = "RawMeasure")]
pub struct DiscreteMeasure {
    dim: usize,
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

#[derive(Clone, Serialize, Deserialize)]
struct RawMeasure {
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl TryFrom<RawMeasure> for DiscreteMeasure {
    type Error = MeasureError;

    fn try_from(raw: RawMeasure) -> Result<Self, Self::Error> {
        DiscreteMeasure::new(raw.points, raw.weights)
    }
}

impl From<DiscreteMeasure> for RawMeasure {
    fn from(m: DiscreteMeasure) -> Self {
        RawMeasure {
            points: m.points,
            weights: m.weights,
        }
    }
}

pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

impl DiscreteMeasure {
    /// Validates and sorts the atoms. Weights must be positive and sum to one;
    /// points must be distinct and share one dimension.
    pub fn new(points: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self, MeasureError> {
        if points.is_empty() {
            return Err(MeasureError::Empty);
        }
        if points.len() != weights.len() {
            return Err(MeasureError::InvalidWeights(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(MeasureError::DimensionMismatch { expected: 1, found: 0 });
        }
        for p in &points {
            if p.len() != dim {
                return Err(MeasureError::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(MeasureError::NonFinite);
            }
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(MeasureError::NonFinite);
        }
        if let Some(w) = weights.iter().find(|&&w| w <= 0.0) {
            return Err(MeasureError::InvalidWeights(format!("non-positive weight {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(MeasureError::InvalidWeights(format!("weights sum to {total}")));
        }
        let mut atoms: Vec<(Vec<f64>, f64)> = points.into_iter().zip(weights).collect();
        atoms.sort_by(|a, b| lex_cmp(&a.0, &b.0));
        for pair in atoms.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(MeasureError::DuplicatePoint(pair[0].0.clone()));
            }
        }
        let (points, weights) = atoms.into_iter().unzip();
        Ok(Self { dim, points, weights })
    }

    /// Builds a measure from possibly repeated atoms with nonnegative masses:
    /// repeated points are merged, masses at or below `WEIGHT_TOL` dropped and
    /// the remainder renormalized.
    pub fn from_atoms(dim: usize, atoms: Vec<(Vec<f64>, f64)>) -> Result<Self, MeasureError> {
        let mut atoms = atoms;
        atoms.sort_by(|a, b| lex_cmp(&a.0, &b.0));
        let mut merged: Vec<(Vec<f64>, f64)> = Vec::with_capacity(atoms.len());
        for (p, w) in atoms {
            if p.len() != dim {
                return Err(MeasureError::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            if w < 0.0 || !w.is_finite() {
                return Err(MeasureError::InvalidWeights(format!("mass {w}")));
            }
            match merged.last_mut() {
                Some(last) if last.0 == p => last.1 += w,
                _ => merged.push((p, w)),
            }
        }
        merged.retain(|(_, w)| *w > WEIGHT_TOL);
        let total: f64 = merged.iter().map(|a| a.1).sum();
        if merged.is_empty() || total <= 0.0 {
            return Err(MeasureError::Empty);
        }
        let (points, weights): (Vec<_>, Vec<_>) =
            merged.into_iter().map(|(p, w)| (p, w / total)).unzip();
        Ok(Self { dim, points, weights })
    }

    pub fn dirac(point: Vec<f64>) -> Self {
        Self {
            dim: point.len(),
            points: vec![point],
            weights: vec![1.0],
        }
    }

    /// One-dimensional convenience constructor.
    pub fn on_line(xs: &[f64], weights: &[f64]) -> Result<Self, MeasureError> {
        Self::new(xs.iter().map(|&x| vec![x]).collect(), weights.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.points.iter().map(Vec::as_slice).zip(self.weights.iter().copied())
    }

    /// Coordinates of a one-dimensional measure.
    pub fn line_points(&self) -> Vec<f64> {
        self.points.iter().map(|p| p[0]).collect()
    }

    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim];
        for (p, w) in self.atoms() {
            for (mk, pk) in m.iter_mut().zip(p) {
                *mk += w * pk;
            }
        }
        m
    }

    pub fn expect(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.atoms().map(|(p, w)| w * f(p)).sum()
    }

    /// `E[(X_k - strike)^+]`.
    pub fn call_value(&self, coord: usize, strike: f64) -> f64 {
        self.expect(|p| (p[coord] - strike).max(0.0))
    }

    /// Largest sup-norm over the support.
    pub fn max_norm(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.iter().fold(0.0f64, |a, x| a.max(x.abs())))
            .fold(0.0, f64::max)
    }

    /// Index of `point` in the support.
    pub fn index_of(&self, point: &[f64]) -> Option<usize> {
        self.points
            .binary_search_by(|p| lex_cmp(p, point))
            .ok()
    }

    /// Image measure under `f`, with coinciding images merged.
    pub fn pushforward(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> Result<Self, MeasureError> {
        let atoms: Vec<_> = self.atoms().map(|(p, w)| (f(p), w)).collect();
        let dim = atoms[0].0.len();
        Self::from_atoms(dim, atoms)
    }

    pub fn check_dim(&self, other: &Self) -> Result<(), MeasureError> {
        if self.dim != other.dim {
            return Err(MeasureError::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }
}
