use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{dist, euclid, PathError, StepPath, TimeGrid};

/// Function of the path values at finitely many marginal times.
/// Indices refer to the enclosing [`Payoff::MarginalGrid`] time list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "fn", rename_all = "snake_case")]
pub enum MarginalFn {
    /// `|X_to - X_from|`
    AbsIncrement { from: usize, to: usize },
    /// `(X_index[coord] - strike)^+`
    Call { index: usize, coord: usize, strike: f64 },
    /// `(strike - X_index[coord])^+`
    Put { index: usize, coord: usize, strike: f64 },
    /// `(X_to[coord] - X_from[coord] - strike)^+`
    ForwardStart {
        from: usize,
        to: usize,
        coord: usize,
        strike: f64,
    },
    /// Exact lookup of the value tuple; `default` covers missing keys.
    Table {
        rows: Vec<TableRow>,
        #[serde(default)]
        default: Option<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub key: Vec<Vec<f64>>,
    pub value: f64,
}

impl MarginalFn {
    pub fn eval(&self, x: &[Vec<f64>]) -> Result<f64, PathError> {
        let get = |i: usize| {
            x.get(i)
                .ok_or_else(|| PathError::Payoff(format!("marginal index {i} out of range")))
        };
        Ok(match self {
            Self::AbsIncrement { from, to } => dist(get(*to)?, get(*from)?),
            Self::Call { index, coord, strike } => (get(*index)?[*coord] - strike).max(0.0),
            Self::Put { index, coord, strike } => (strike - get(*index)?[*coord]).max(0.0),
            Self::ForwardStart {
                from,
                to,
                coord,
                strike,
            } => (get(*to)?[*coord] - get(*from)?[*coord] - strike).max(0.0),
            Self::Table { rows, default } => match rows.iter().find(|r| r.key == x) {
                Some(r) => r.value,
                None => default.ok_or_else(|| PathError::Payoff(format!("no table entry for {x:?}")))?,
            },
        })
    }
}

type CustomFn = dyn Fn(&StepPath) -> Result<f64, String> + Send + Sync;

/// User-supplied payoff; not serializable.
#[derive(Clone)]
pub struct CustomPayoff {
    pub name: String,
    pub bounded: bool,
    pub f: Arc<CustomFn>,
}

impl fmt::Debug for CustomPayoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CustomPayoff({})", self.name)
    }
}

/// Path-dependent payoff `xi`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payoff {
    /// `int_0^1 omega_t[coord] dt`, or `int_0^1 |omega_t| dt` without a coordinate.
    Asian {
        #[serde(default)]
        coord: Option<usize>,
    },
    /// `sup_t omega_t[coord]`, or `sup_t |omega_t|`.
    LookbackMax {
        #[serde(default)]
        coord: Option<usize>,
    },
    /// `(a . omega_1 - K)^+`
    BasketCallAt1 { weights: Vec<f64>, strike: f64 },
    /// `g(omega_{t_0}, ..., omega_{t_k})` for listed times.
    MarginalGrid { times: Vec<f64>, func: MarginalFn },
    Constant { value: f64 },
    /// `1{ sup_t |omega_t[coord]| >= R }`, or with the full norm.
    NormIndicator {
        #[serde(default)]
        coord: Option<usize>,
        radius: f64,
    },
    /// `xi(omega) chi_R(||omega||)`
    Truncated { inner: Box<Payoff>, radius: f64 },
    #[serde(skip)]
    Custom(CustomPayoff),
}

/// Ramp equal to 1 on `[0, R]`, linear down to 0 on `[R, R + 1]`, 0 beyond.
pub fn chi(radius: f64, x: f64) -> f64 {
    if x <= radius {
        1.0
    } else if x <= radius + 1.0 {
        radius + 1.0 - x
    } else {
        0.0
    }
}

impl Payoff {
    pub fn custom(
        name: impl Into<String>,
        bounded: bool,
        f: impl Fn(&StepPath) -> Result<f64, String> + Send + Sync + 'static,
    ) -> Self {
        Self::Custom(CustomPayoff {
            name: name.into(),
            bounded,
            f: Arc::new(f),
        })
    }

    /// `xi_R = xi chi_R(||omega||)`.
    pub fn truncated(self, radius: f64) -> Result<Self, PathError> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(PathError::BadParameter(format!("truncation radius {radius}")));
        }
        Ok(Self::Truncated {
            inner: Box::new(self),
            radius,
        })
    }

    pub fn eval(&self, w: &StepPath) -> Result<f64, PathError> {
        let check_coord = |c: usize| {
            if c < w.dim() {
                Ok(c)
            } else {
                Err(PathError::DimensionMismatch {
                    expected: c + 1,
                    found: w.dim(),
                })
            }
        };
        Ok(match self {
            Self::Asian { coord: None } => w.abs_integral(),
            Self::Asian { coord: Some(c) } => w.integral()[check_coord(*c)?],
            Self::LookbackMax { coord: None } => w.sup_norm(),
            Self::LookbackMax { coord: Some(c) } => w.coord_max(check_coord(*c)?),
            Self::BasketCallAt1 { weights, strike } => {
                if weights.len() != w.dim() {
                    return Err(PathError::DimensionMismatch {
                        expected: weights.len(),
                        found: w.dim(),
                    });
                }
                let x1 = w.value_at(1.0);
                (weights.iter().zip(x1).map(|(a, x)| a * x).sum::<f64>() - strike).max(0.0)
            }
            Self::MarginalGrid { times, func } => func.eval(&w.sample(times))?,
            Self::Constant { value } => *value,
            Self::NormIndicator { coord, radius } => {
                let norm = match coord {
                    None => w.sup_norm(),
                    Some(c) => {
                        let c = check_coord(*c)?;
                        w.values().map(|v| v[c].abs()).fold(0.0, f64::max)
                    }
                };
                if norm >= *radius {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Truncated { inner, radius } => {
                let x = inner.eval(w)?;
                x * chi(*radius, w.sup_norm())
            }
            Self::Custom(c) => (c.f)(w).map_err(PathError::Payoff)?,
        })
    }

    /// True when the payoff is a function of the values at `times` only.
    pub fn is_marginal(&self, times: &[f64]) -> bool {
        match self {
            Self::Constant { .. } => true,
            Self::BasketCallAt1 { .. } => times.last() == Some(&1.0),
            Self::MarginalGrid { times: own, .. } => own.iter().all(|t| times.contains(t)),
            _ => false,
        }
    }

    pub fn is_bounded(&self) -> bool {
        match self {
            Self::Constant { .. } | Self::NormIndicator { .. } => true,
            Self::MarginalGrid {
                func: MarginalFn::Table { .. },
                ..
            } => true,
            Self::MarginalGrid {
                func: MarginalFn::Put { .. },
                ..
            } => true,
            Self::Truncated { inner, .. } => {
                // the ramp vanishes beyond R + 1, and every library payoff is
                // bounded on bounded paths
                !matches!(**inner, Self::Custom(_)) || inner.is_bounded()
            }
            Self::Custom(c) => c.bounded,
            _ => false,
        }
    }

    /// Slope `L` of a modulus `alpha(u) = L u` for shifts on `grid`:
    /// `|xi(omega) - xi(omega o f_eps)| <= L |eps| (1 + sum_i |omega_{t_i}| + int |omega|)`.
    ///
    /// Averages move by at most `eps_i` times the block start value plus the
    /// block average, hence `1 / Delta T`. Suprema, terminal values and values
    /// at grid times are invariant because `f_eps` is onto and fixes the grid.
    /// `None` when no modulus is known.
    pub fn shift_modulus(&self, grid: &TimeGrid) -> Option<f64> {
        match self {
            Self::Asian { .. } => Some(1.0f64.max(1.0 / grid.min_gap())),
            Self::LookbackMax { .. }
            | Self::BasketCallAt1 { .. }
            | Self::Constant { .. }
            | Self::NormIndicator { .. } => Some(0.0),
            Self::MarginalGrid { times, .. } => {
                if times.iter().all(|t| grid.times().contains(t)) {
                    Some(0.0)
                } else {
                    None
                }
            }
            Self::Truncated { inner, .. } => inner.shift_modulus(grid),
            Self::Custom(_) => None,
        }
    }

    /// Right-hand side weight `1 + sum_i |omega_{t_i}| + int |omega|` of the
    /// shift modulus.
    pub fn modulus_weight(w: &StepPath, grid: &TimeGrid) -> f64 {
        1.0 + grid.times().iter().map(|&t| euclid(w.value_at(t))).sum::<f64>() + w.abs_integral()
    }
}

/// Affine map of payoff values onto `[0, 1]`; prices are mapped back with
/// [`Normalization::invert`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub offset: f64,
    pub scale: f64,
}

impl Normalization {
    pub const IDENTITY: Self = Self {
        offset: 0.0,
        scale: 1.0,
    };

    pub fn from_range(lo: f64, hi: f64) -> Self {
        let scale = if hi > lo { hi - lo } else { 1.0 };
        Self { offset: lo, scale }
    }

    pub fn apply(&self, v: f64) -> f64 {
        (v - self.offset) / self.scale
    }

    pub fn invert(&self, v: f64) -> f64 {
        v * self.scale + self.offset
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(t0: f64, jumps: &[(f64, f64)]) -> StepPath {
        StepPath::from_pairs(vec![t0], jumps.iter().map(|&(t, v)| (t, vec![v])).collect()).unwrap()
    }

    #[test]
    fn library_values() {
        let c = StepPath::constant(vec![-2.0]);
        assert_eq!(Payoff::Asian { coord: None }.eval(&c).unwrap(), 2.0);
        assert_eq!(Payoff::Asian { coord: Some(0) }.eval(&c).unwrap(), -2.0);
        let up = path(1.0, &[(0.5, 2.0)]);
        assert_eq!(Payoff::LookbackMax { coord: Some(0) }.eval(&up).unwrap(), 2.0);
        let two = path(1.0, &[(0.5, 3.0)]);
        assert_eq!(Payoff::Asian { coord: Some(0) }.eval(&two).unwrap(), 2.0);
        let basket = Payoff::BasketCallAt1 {
            weights: vec![2.0],
            strike: 1.0,
        };
        assert_eq!(basket.eval(&two).unwrap(), 5.0);
    }

    #[test]
    fn marginal_grid_reads_grid_values() {
        let xi = Payoff::MarginalGrid {
            times: vec![0.0, 1.0],
            func: MarginalFn::AbsIncrement { from: 0, to: 1 },
        };
        assert_eq!(xi.eval(&path(1.0, &[(0.25, 0.0)])).unwrap(), 1.0);
        assert!(xi.is_marginal(&[0.0, 0.5, 1.0]));
        assert!(!xi.is_marginal(&[0.5, 1.0]));
    }

    #[test]
    fn table_lookup_and_default() {
        let f = MarginalFn::Table {
            rows: vec![TableRow {
                key: vec![vec![1.0], vec![2.0]],
                value: 0.25,
            }],
            default: None,
        };
        assert_eq!(f.eval(&[vec![1.0], vec![2.0]]).unwrap(), 0.25);
        assert!(f.eval(&[vec![1.0], vec![0.0]]).is_err());
    }

    #[test]
    fn truncation_ramp() {
        let xi = Payoff::Constant { value: 0.8 }.truncated(2.0).unwrap();
        assert_eq!(xi.eval(&StepPath::constant(vec![2.0])).unwrap(), 0.8);
        assert_eq!(xi.eval(&StepPath::constant(vec![3.0])).unwrap(), 0.0);
        assert_eq!(xi.eval(&StepPath::constant(vec![2.5])).unwrap(), 0.4);
    }

    #[test]
    fn payoff_json_is_tagged() {
        let xi = Payoff::MarginalGrid {
            times: vec![0.0, 1.0],
            func: MarginalFn::Call {
                index: 1,
                coord: 0,
                strike: 1.0,
            },
        };
        let s = serde_json::to_string(&xi).unwrap();
        assert_eq!(
            s,
            r#"{"kind":"marginal_grid","times":[0.0,1.0],"func":{"fn":"call","index":1,"coord":0,"strike":1.0}}"#
        );
        let back: Payoff = serde_json::from_str(&s).unwrap();
        assert_eq!(back.eval(&StepPath::constant(vec![3.0])).unwrap(), 2.0);
    }

    #[test]
    fn normalization_round_trip() {
        let n = Normalization::from_range(-1.0, 3.0);
        assert_eq!(n.apply(3.0), 1.0);
        assert_eq!(n.invert(n.apply(0.7)), 0.7);
    }
}
