//! Numeric scalars shared by the LP layer and the exact verification paths.
//!
//! Two implementations exist: `f64` with tolerance-based comparisons and
//! [`BigRational`] with exact arithmetic. Every finite `f64` is a dyadic
//! rational, so [`Scalar::from_f64`] is lossless for the rational type.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Num, Signed, ToPrimitive, Zero};

pub trait Scalar: Clone + Debug + PartialOrd + Num + Signed + Send + Sync + 'static {
    /// True when arithmetic is exact and tolerances are zero.
    const EXACT: bool;

    /// Lossless conversion of the binary value of `x`.
    fn from_f64(x: f64) -> Self;

    /// Conversion for user-supplied data: exact types pick the simplest
    /// rational that rounds back to `x`, so decimal inputs such as `0.1`
    /// become `1/10` rather than their binary expansion.
    fn from_data(x: f64) -> Self;

    fn to_f64(&self) -> f64;

    /// Zero tolerance used when testing signs of computed quantities.
    fn eps() -> Self;

    fn from_i64(n: i64) -> Self;

    /// Flushes round-off noise to zero; identity for exact types.
    fn chop(self) -> Self {
        self
    }

    fn is_pos(&self) -> bool {
        *self > Self::eps()
    }

    fn is_neg(&self) -> bool {
        *self < -Self::eps()
    }

    fn is_negligible(&self) -> bool {
        !self.is_pos() && !self.is_neg()
    }

    fn max_of(a: Self, b: Self) -> Self {
        if a >= b {
            a
        } else {
            b
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if a <= b {
            a
        } else {
            b
        }
    }

    fn positive_part(&self) -> Self {
        if *self > Self::zero() {
            self.clone()
        } else {
            Self::zero()
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_f64(x: f64) -> Self {
        x
    }

    fn from_data(x: f64) -> Self {
        x
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn eps() -> Self {
        1e-11
    }

    fn from_i64(n: i64) -> Self {
        n as f64
    }

    fn chop(self) -> Self {
        if self.abs() < 1e-14 {
            0.0
        } else {
            self
        }
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite float")
    }

    fn from_data(x: f64) -> Self {
        if let Some(r) = Ratio::<i64>::approximate_float(x) {
            let candidate = BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()));
            if ToPrimitive::to_f64(&candidate) == Some(x) {
                return candidate;
            }
        }
        Self::from_f64(x)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn eps() -> Self {
        BigRational::zero()
    }

    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
}

/// Dot product of two equal-length slices.
pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_data_conversion_prefers_short_fractions() {
        let r = <BigRational as Scalar>::from_data(0.1);
        assert_eq!(r, BigRational::new(BigInt::from(1), BigInt::from(10)));
        let exact = <BigRational as Scalar>::from_f64(0.1);
        assert_ne!(exact, r);
        assert_eq!(Scalar::to_f64(&exact), 0.1);
    }

    #[test]
    fn dyadic_values_convert_exactly() {
        let r = <BigRational as Scalar>::from_f64(0.375);
        assert_eq!(r, BigRational::new(BigInt::from(3), BigInt::from(8)));
    }
}
