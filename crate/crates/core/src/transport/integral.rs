use serde::{Deserialize, Serialize};

use crate::pathspace::StepPath;
use crate::scalar::Scalar;

/// Left-continuous piecewise-constant strategy: `values[k]` is held on
/// `(times[k], times[k + 1]]`, and the strategy vanishes outside
/// `(times[0], times[r]]` except that `H_0 = values[0]` when `times[0] = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Strategy<S> {
    pub times: Vec<f64>,
    pub values: Vec<Vec<S>>,
}

impl<S: Scalar> Strategy<S> {
    pub fn new(times: Vec<f64>, values: Vec<Vec<S>>) -> Self {
        assert_eq!(times.len(), values.len() + 1, "one value per interval");
        assert!(times.windows(2).all(|w| w[0] < w[1]), "strategy times must increase");
        Self { times, values }
    }

    pub fn constant(dim: usize, h: Vec<S>) -> Self {
        debug_assert_eq!(h.len(), dim);
        Self::new(vec![0.0, 1.0], vec![h])
    }

    pub fn zero(dim: usize) -> Self {
        Self::constant(dim, vec![S::zero(); dim])
    }
}

fn value<S: Scalar>(w: &StepPath, t: f64) -> Vec<S> {
    w.value_at(t).iter().map(|&x| S::from_f64(x)).collect()
}

fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    crate::scalar::dot(a, b)
}

/// `(H . omega)_1 = H_1 omega_1 - H_0 omega_0 - int omega dH`, the integral
/// against `dH` being a finite sum over the change points of `H`.
pub fn stochastic_integral<S: Scalar>(h: &Strategy<S>, w: &StepPath) -> S {
    let r = h.values.len();
    let d = w.dim();
    let zero = vec![S::zero(); d];
    let at0 = if h.times[0] == 0.0 { &h.values[0] } else { &zero };
    let at1 = if h.times[r] == 1.0 { &h.values[r - 1] } else { &zero };
    let mut acc = dot(at1, &value::<S>(w, 1.0)) - dot(at0, &value::<S>(w, 0.0));
    let mut prev: &[S] = &zero;
    for k in 0..=r {
        let next: &[S] = if k < r { &h.values[k] } else { &zero };
        let t = h.times[k];
        if (k == 0 && t == 0.0) || (k == r && t == 1.0) {
            prev = next;
            continue;
        }
        let dh: Vec<S> = next.iter().zip(prev).map(|(a, b)| a.clone() - b.clone()).collect();
        acc = acc - dot(&dh, &value::<S>(w, t));
        prev = next;
    }
    acc
}

/// `sum_k h_k . (omega_{s_{k+1}} - omega_{s_k})`.
pub fn riemann_stieltjes_sum<S: Scalar>(h: &Strategy<S>, w: &StepPath) -> S {
    let mut acc = S::zero();
    for (k, hk) in h.values.iter().enumerate() {
        let a = value::<S>(w, h.times[k]);
        let b = value::<S>(w, h.times[k + 1]);
        let inc: Vec<S> = b.iter().zip(&a).map(|(x, y)| x.clone() - y.clone()).collect();
        acc = acc + dot(hk, &inc);
    }
    acc
}
