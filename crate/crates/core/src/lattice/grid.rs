//! Dyadic value grids `A^(L) = 2^-L N^d` and time-increment grids
//! `B^(L) = { i u } U { u / j }` with `u = c 2^-L`.
//!
//! The spatial unit `c` is `ceil(sqrt(d))`, which keeps every grid point
//! rational; it equals `sqrt(d)` for `d = 1` and dominates it otherwise.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use super::LatticeError;

/// `ceil(sqrt(d))`.
pub fn unit_factor(dim: usize) -> u64 {
    let mut c = 1u64;
    while (c * c) < dim as u64 {
        c += 1;
    }
    c
}

pub fn pow2(level: u32) -> BigRational {
    BigRational::from_integer(BigInt::one() << level as usize)
}

/// `u = c 2^-level`.
pub fn b_unit(dim: usize, level: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(unit_factor(dim))) / pow2(level)
}

/// Exact rational value of a float.
pub fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

pub fn rat_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `2^-level` as a float, exact for `level < 1074`.
fn dyadic_step(level: u32) -> f64 {
    if level <= 1022 {
        f64::from_bits(u64::from(1023 - level) << 52)
    } else {
        f64::from_bits(1u64 << (1074 - level))
    }
}

/// Nearest point of `2^-level N` to `x >= 0`, ties toward 0.
fn project_coord(x: f64, level: u32) -> f64 {
    if level >= 1074 {
        return x;
    }
    let step = dyadic_step(level);
    // every float at or above 2^53 steps is a multiple of the step
    if x >= step * 9007199254740992.0 {
        return x;
    }
    let q = x / step;
    let r = q.floor();
    let up = q - r > 0.5;
    (if up { r + 1.0 } else { r }) * step
}

fn floor_coord(x: f64, level: u32) -> f64 {
    if level >= 1074 {
        return x;
    }
    let step = dyadic_step(level);
    if x >= step * 9007199254740992.0 {
        return x;
    }
    (x / step).floor() * step
}

/// Componentwise nearest grid point of `A^(level)`, ties toward 0.
pub fn grid_project(x: &[f64], level: u32) -> Result<Vec<f64>, LatticeError> {
    if let Some(v) = x.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
        return Err(LatticeError::NegativeValue(*v));
    }
    Ok(x.iter().map(|&v| project_coord(v, level)).collect())
}

/// [`grid_project`], falling back to rounding every coordinate down when the
/// nearest point would have Euclidean norm above `cap`.
pub fn grid_project_capped(x: &[f64], level: u32, cap: f64) -> Result<Vec<f64>, LatticeError> {
    let near = grid_project(x, level)?;
    if super::super::pathspace::euclid(&near) <= cap {
        return Ok(near);
    }
    Ok(x.iter().map(|&v| floor_coord(v, level)).collect())
}

/// True when `x` lies on `A^(level)`.
pub fn in_a(x: &[f64], level: u32) -> bool {
    x.iter().all(|&v| v >= 0.0 && v.is_finite() && floor_coord(v, level) == v)
}

/// Integer grid coordinates `x 2^level`.
pub fn grid_coords(x: &[f64], level: u32) -> Vec<BigInt> {
    x.iter()
        .map(|&v| {
            let r = rat(v) * pow2(level);
            r.to_integer()
        })
        .collect()
}

/// True when `dt` lies on `B^(level)`.
pub fn in_b(dt: &BigRational, dim: usize, level: u32) -> bool {
    if !dt.is_positive() {
        return false;
    }
    let u = b_unit(dim, level);
    let ratio = dt / &u;
    if ratio.is_integer() {
        return true;
    }
    let inv = u / dt;
    inv.is_integer() && inv.is_positive()
}

/// `sup { b in B^(level) : b < x }` for `x > 0`.
pub fn snap_below(x: &BigRational, dim: usize, level: u32) -> BigRational {
    debug_assert!(x.is_positive());
    let u = b_unit(dim, level);
    if *x > u {
        let k = (x / &u).ceil() - BigRational::one();
        k * u
    } else {
        let j = (&u / x).floor() + BigRational::one();
        u / j
    }
}

/// Points of `A^(level)` inside `[0, radius]^dim`, in lexicographic order.
pub fn grid_box(dim: usize, level: u32, radius: f64) -> Vec<Vec<f64>> {
    let step = dyadic_step(level);
    let top = (radius / step).floor() as i64;
    let axis: Vec<f64> = (0..=top).map(|q| q as f64 * step).collect();
    let mut out: Vec<Vec<f64>> = vec![Vec::new()];
    for _ in 0..dim {
        let mut next = Vec::with_capacity(out.len() * axis.len());
        for prefix in &out {
            for &a in &axis {
                let mut p = prefix.clone();
                p.push(a);
                next.push(p);
            }
        }
        out = next;
    }
    out
}
