use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    check_convex_order, measure_from_call_knots, w1_distance, DiscreteMeasure, MeasureError, Peacock,
};

/// Mean-preserving random spread of `m` within W1 distance `radius`.
///
/// Atom `x_j` is replaced by `1/2 delta(x_j - r s_j u_j) + 1/2 delta(x_j + r s_j u_j)`
/// with a random unit direction `u_j` and scale `s_j = U_j / max_k U_k`, so the
/// most displaced atom moves by exactly `radius`. The output dominates `m`
/// in convex order.
pub fn perturb_in_w1(m: &DiscreteMeasure, radius: f64, seed: u64) -> Result<DiscreteMeasure, MeasureError> {
    if radius < 0.0 || !radius.is_finite() {
        return Err(MeasureError::NegativeRadius(radius));
    }
    if radius == 0.0 {
        return Ok(m.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = m.dim();
    let draws: Vec<(f64, Vec<f64>)> = (0..m.len())
        .map(|_| (rng.gen_range(f64::EPSILON..1.0), unit_vector(&mut rng, dim)))
        .collect();
    let top = draws.iter().map(|d| d.0).fold(0.0, f64::max);
    let mut atoms = Vec::with_capacity(2 * m.len());
    for ((x, w), (u, dir)) in m.atoms().zip(draws) {
        let step = radius * u / top;
        let lo = x.iter().zip(&dir).map(|(a, b)| a - step * b).collect();
        let hi = x.iter().zip(&dir).map(|(a, b)| a + step * b).collect();
        atoms.push((lo, w / 2.0));
        atoms.push((hi, w / 2.0));
    }
    DiscreteMeasure::from_atoms(dim, atoms)
}

fn unit_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    if dim == 1 {
        return vec![1.0];
    }
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (1e-3..=1.0).contains(&norm) {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RepairStatus {
    /// Perturbed laws were already in convex order.
    Valid,
    /// At least one law was replaced by its convex-order envelope.
    Repaired,
    /// Convex order could not be restored.
    Rejected,
}

#[derive(Clone, Debug)]
pub struct PerturbOutcome {
    pub peacock: Option<Peacock>,
    pub status: RepairStatus,
    /// Largest W1 distance between an input law and its replacement.
    pub w1_shift: f64,
}

/// Perturbs every law after the first with [`perturb_in_w1`] and restores
/// convex order.
///
/// A perturbed law that fails to dominate its (already final) predecessor is
/// replaced, in one dimension, by the law whose call function is the
/// pointwise maximum of both call functions. Failures in higher dimensions,
/// or after repair, reject the family.
pub fn perturb_peacock(p: &Peacock, radius: f64, seed: u64) -> Result<PerturbOutcome, MeasureError> {
    let mut laws = vec![p.first().clone()];
    let mut status = RepairStatus::Valid;
    for (k, law) in p.laws().iter().enumerate().skip(1) {
        let law_seed = seed ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        let mut next = perturb_in_w1(law, radius, law_seed)?;
        let prev = laws.last().unwrap();
        if !check_convex_order(prev, &next)?.holds() {
            if p.dim() != 1 {
                return Ok(rejected());
            }
            next = call_envelope(prev, &next)?;
            if !check_convex_order(prev, &next)?.holds() {
                return Ok(rejected());
            }
            status = RepairStatus::Repaired;
        }
        laws.push(next);
    }
    let mut w1_shift = 0.0f64;
    for (a, b) in p.laws().iter().zip(&laws) {
        w1_shift = w1_shift.max(w1_distance(a, b)?);
    }
    match Peacock::new(p.times().to_vec(), laws) {
        Ok(q) => Ok(PerturbOutcome {
            peacock: Some(q),
            status,
            w1_shift,
        }),
        Err(MeasureError::NotPeacock { .. }) => Ok(rejected()),
        Err(e) => Err(e),
    }
}

fn rejected() -> PerturbOutcome {
    PerturbOutcome {
        peacock: None,
        status: RepairStatus::Rejected,
        w1_shift: f64::NAN,
    }
}

/// One-dimensional law with call function `max(C_a, C_b)`; `a` and `b` must
/// share their mean.
fn call_envelope(a: &DiscreteMeasure, b: &DiscreteMeasure) -> Result<DiscreteMeasure, MeasureError> {
    let mut knots: Vec<f64> = a.line_points();
    knots.extend(b.line_points());
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let diff = |k: f64| a.call_value(0, k) - b.call_value(0, k);
    let mut all = Vec::with_capacity(2 * knots.len());
    for w in knots.windows(2) {
        all.push(w[0]);
        let (d0, d1) = (diff(w[0]), diff(w[1]));
        if d0 * d1 < 0.0 {
            let x = w[0] + (w[1] - w[0]) * d0 / (d0 - d1);
            if x > w[0] && x < w[1] {
                all.push(x);
            }
        }
    }
    all.push(*knots.last().unwrap());
    let values: Vec<f64> = all
        .iter()
        .map(|&k| a.call_value(0, k).max(b.call_value(0, k)))
        .collect();
    measure_from_call_knots(&all, &values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_radius_is_identity() {
        let m = DiscreteMeasure::on_line(&[0.0, 3.0], &[0.25, 0.75]).unwrap();
        assert_eq!(perturb_in_w1(&m, 0.0, 7).unwrap(), m);
    }

    #[test]
    fn dirac_splits_symmetrically() {
        let m = DiscreteMeasure::dirac(vec![1.0]);
        let out = perturb_in_w1(&m, 0.25, 3).unwrap();
        assert_eq!(out, DiscreteMeasure::on_line(&[0.75, 1.25], &[0.5, 0.5]).unwrap());
        assert_eq!(w1_distance(&m, &out).unwrap(), 0.25);
    }

    #[test]
    fn spread_dominates_and_stays_close() {
        let m = DiscreteMeasure::on_line(&[-1.0, 0.5, 2.0], &[0.25, 0.5, 0.25]).unwrap();
        for seed in 0..20 {
            let out = perturb_in_w1(&m, 0.3, seed).unwrap();
            assert!(w1_distance(&m, &out).unwrap() <= 0.3 + 1e-12);
            assert!(check_convex_order(&m, &out).unwrap().holds());
        }
    }

    #[test]
    fn envelope_dominates_both() {
        let a = DiscreteMeasure::on_line(&[0.0, 2.0], &[0.5, 0.5]).unwrap();
        let b = DiscreteMeasure::on_line(&[-0.5, 1.0, 1.5], &[0.2, 0.2, 0.6]).unwrap();
        let e = call_envelope(&a, &b).unwrap();
        assert!(check_convex_order(&a, &e).unwrap().holds());
        assert!(check_convex_order(&b, &e).unwrap().holds());
    }

    #[test]
    fn peacock_perturbation_keeps_first_law() {
        let p = Peacock::new(
            vec![0.0, 0.5, 1.0],
            vec![
                DiscreteMeasure::dirac(vec![1.0]),
                DiscreteMeasure::on_line(&[0.5, 1.5], &[0.5, 0.5]).unwrap(),
                DiscreteMeasure::on_line(&[0.0, 1.0, 2.0], &[0.25, 0.5, 0.25]).unwrap(),
            ],
        )
        .unwrap();
        for seed in 0..10 {
            let out = perturb_peacock(&p, 0.2, seed).unwrap();
            let q = out.peacock.expect("1-D perturbations are repairable");
            assert_eq!(q.first(), p.first());
            assert!(q.validate().is_ok());
        }
    }
}
