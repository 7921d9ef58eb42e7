use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::integral::{stochastic_integral, Strategy};
use super::plan::bits_key;
use super::TransportError;
use crate::exec::ExecMode;
use crate::lp::Sense;
use crate::measures::Peacock;
use crate::pathspace::{Jump, Normalization, Payoff, StepPath};

/// Static position in a function of `X_time`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StaticLeg {
    /// Exact lookup; values off the listed points are outside the domain.
    Table { time: f64, points: Vec<Vec<f64>>, values: Vec<f64> },
    /// `units (X_time[coord] - strike)^+`
    Call { time: f64, coord: usize, strike: f64, units: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrefixEntry {
    /// Path values at the first `k + 1` checkpoints.
    pub prefix: Vec<Vec<f64>>,
    /// Position held on `(c_k, c_{k+1}]`.
    pub h: Vec<f64>,
}

/// Trading part of a certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DynamicLeg {
    None,
    /// Position chosen from the history sampled at the checkpoints. With
    /// `hold_between` the domain only holds paths that jump at checkpoints.
    Prefix { checkpoints: Vec<f64>, entries: Vec<PrefixEntry>, hold_between: bool },
    /// `units` held after the first time `X[coord]` reaches `level`.
    FirstHit { coord: usize, level: f64, units: f64 },
}

/// Semi-static hedge `sum lambda_i(X_{t_i}) + (H . X)_1`, dominating the
/// payoff (`Maximize`) or dominated by it (`Minimize`).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DualCertificate {
    pub sense: Sense,
    pub dim: usize,
    pub static_legs: Vec<StaticLeg>,
    pub dynamic: DynamicLeg,
    /// Normalization the solver worked in; legs are in original units.
    pub normalization: Normalization,
}

/// Result of checking a certificate on a path set.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub checked: usize,
    /// Paths outside the certificate's domain.
    pub skipped: usize,
    pub min_residual: f64,
    pub argmin: Option<usize>,
    pub worst_path: Option<StepPath>,
    pub pass: bool,
}

struct Evaluator<'a> {
    cert: &'a DualCertificate,
    tables: Vec<HashMap<Vec<u64>, f64>>,
    prefixes: HashMap<Vec<u64>, &'a [f64]>,
}

impl<'a> Evaluator<'a> {
    fn new(cert: &'a DualCertificate) -> Self {
        let tables = cert
            .static_legs
            .iter()
            .map(|leg| match leg {
                StaticLeg::Table { points, values, .. } => points
                    .iter()
                    .zip(values)
                    .map(|(p, v)| (bits_key(std::slice::from_ref(p)), *v))
                    .collect(),
                StaticLeg::Call { .. } => HashMap::new(),
            })
            .collect();
        let prefixes = match &cert.dynamic {
            DynamicLeg::Prefix { entries, .. } => {
                entries.iter().map(|e| (bits_key(&e.prefix), e.h.as_slice())).collect()
            }
            _ => HashMap::new(),
        };
        Self { cert, tables, prefixes }
    }

    fn static_value_at(&self, leg: usize, x: &[f64]) -> Option<f64> {
        match &self.cert.static_legs[leg] {
            StaticLeg::Table { .. } => self.tables[leg].get(&bits_key(&[x.to_vec()])).copied(),
            StaticLeg::Call { coord, strike, units, .. } => Some(units * (x[*coord] - strike).max(0.0)),
        }
    }

    fn strategy(&self, w: &StepPath) -> Option<Strategy<f64>> {
        let d = self.cert.dim;
        match &self.cert.dynamic {
            DynamicLeg::None => Some(Strategy::zero(d)),
            DynamicLeg::Prefix { checkpoints, hold_between, .. } => {
                if *hold_between && w.jump_times().iter().any(|t| !checkpoints.contains(t)) {
                    return None;
                }
                let sample = w.sample(checkpoints);
                let mut values = Vec::with_capacity(checkpoints.len() - 1);
                for k in 0..checkpoints.len() - 1 {
                    values.push(self.prefixes.get(&bits_key(&sample[..=k]))?.to_vec());
                }
                Some(Strategy::new(checkpoints.clone(), values))
            }
            DynamicLeg::FirstHit { coord, level, units } => {
                let hit = if w.t0_value()[*coord] >= *level {
                    Some(0.0)
                } else {
                    w.jumps().iter().find(|j| j.value[*coord] >= *level).map(|j| j.t)
                };
                match hit {
                    Some(s) if s < 1.0 => {
                        let mut h = vec![0.0; d];
                        h[*coord] = *units;
                        Some(Strategy::new(vec![s, 1.0], vec![h]))
                    }
                    _ => Some(Strategy::zero(d)),
                }
            }
        }
    }

    fn payout(&self, w: &StepPath) -> Option<f64> {
        let mut total = 0.0;
        for (i, leg) in self.cert.static_legs.iter().enumerate() {
            let t = match leg {
                StaticLeg::Table { time, .. } | StaticLeg::Call { time, .. } => *time,
            };
            total += self.static_value_at(i, w.value_at(t))?;
        }
        Some(total + stochastic_integral(&self.strategy(w)?, w))
    }

    fn residual(&self, w: &StepPath, xi: &Payoff) -> Result<Option<f64>, TransportError> {
        let Some(pay) = self.payout(w) else { return Ok(None) };
        let x = xi.eval(w)?;
        Ok(Some(match self.cert.sense {
            Sense::Maximize => pay - x,
            Sense::Minimize => x - pay,
        }))
    }
}

impl DualCertificate {
    /// Hedge payout on `w`, `None` outside the domain.
    pub fn payout(&self, w: &StepPath) -> Option<f64> {
        Evaluator::new(self).payout(w)
    }

    /// Signed hedging residual; nonnegative when the certificate holds on `w`.
    pub fn residual(&self, w: &StepPath, xi: &Payoff) -> Result<Option<f64>, TransportError> {
        Evaluator::new(self).residual(w, xi)
    }

    /// Cost `sum_i mu_{t_i}(lambda_i)` under the laws of `p`.
    pub fn cost(&self, p: &Peacock) -> Result<f64, TransportError> {
        let ev = Evaluator::new(self);
        let mut total = 0.0;
        for (i, leg) in self.static_legs.iter().enumerate() {
            let t = match leg {
                StaticLeg::Table { time, .. } | StaticLeg::Call { time, .. } => *time,
            };
            let law = p.law_at(t)?;
            for (x, w) in law.atoms() {
                let v = ev.static_value_at(i, x).ok_or_else(|| {
                    TransportError::BadInstance(format!("static leg at time {t} undefined at {x:?}"))
                })?;
                total += w * v;
            }
        }
        Ok(total)
    }

    /// Values appearing anywhere in the certificate, used as move targets
    /// by the adversarial search.
    fn value_pool(&self) -> Vec<Vec<f64>> {
        let mut pool: Vec<Vec<f64>> = Vec::new();
        for leg in &self.static_legs {
            if let StaticLeg::Table { points, .. } = leg {
                pool.extend(points.iter().cloned());
            }
        }
        match &self.dynamic {
            DynamicLeg::Prefix { entries, .. } => {
                for e in entries {
                    pool.extend(e.prefix.iter().cloned());
                }
            }
            DynamicLeg::FirstHit { coord, level, .. } => {
                let mut v = vec![0.0; self.dim];
                v[*coord] = *level;
                pool.push(v);
            }
            DynamicLeg::None => {}
        }
        pool.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pool.dedup();
        pool
    }
}

/// Residual of `cert` against `xi` on every path; passes when the smallest
/// in-domain residual is at least `-tol`.
pub fn verify_superhedge(
    cert: &DualCertificate,
    xi: &Payoff,
    paths: &[StepPath],
    tol: f64,
) -> Result<VerifyReport, TransportError> {
    let ev = Evaluator::new(cert);
    let mut report = VerifyReport {
        checked: 0,
        skipped: 0,
        min_residual: f64::INFINITY,
        argmin: None,
        worst_path: None,
        pass: true,
    };
    for (i, w) in paths.iter().enumerate() {
        match ev.residual(w, xi)? {
            None => report.skipped += 1,
            Some(r) => {
                report.checked += 1;
                if r < report.min_residual {
                    report.min_residual = r;
                    report.argmin = Some(i);
                }
            }
        }
    }
    if let Some(i) = report.argmin {
        report.worst_path = Some(paths[i].clone());
    }
    report.pass = report.min_residual >= -tol;
    Ok(report)
}

const MAX_JUMPS: usize = 8;

fn propose(rng: &mut ChaCha8Rng, w: &StepPath, pool: &[Vec<f64>], scale: f64) -> Option<StepPath> {
    let mut t0 = w.t0_value().to_vec();
    let mut jumps: Vec<Jump> = w.jumps().to_vec();
    let d = t0.len();
    let fresh = |rng: &mut ChaCha8Rng, base: &[f64]| -> Vec<f64> {
        if !pool.is_empty() && rng.gen_bool(0.5) {
            pool[rng.gen_range(0..pool.len())].clone()
        } else {
            base.iter().map(|x| (x + scale * (rng.gen::<f64>() * 2.0 - 1.0)).max(0.0)).collect()
        }
    };
    match rng.gen_range(0..5) {
        0 => t0 = fresh(rng, &t0),
        1 if !jumps.is_empty() => {
            let j = rng.gen_range(0..jumps.len());
            jumps[j].value = fresh(rng, &jumps[j].value);
        }
        2 if !jumps.is_empty() => {
            let j = rng.gen_range(0..jumps.len());
            let lo = if j == 0 { 0.0 } else { jumps[j - 1].t };
            let hi = if j + 1 < jumps.len() { jumps[j + 1].t } else { 1.0 };
            let t = lo + (hi - lo) * rng.gen::<f64>();
            if t <= lo || t >= hi && j + 1 < jumps.len() {
                return None;
            }
            jumps[j].t = t.min(1.0);
        }
        3 if jumps.len() < MAX_JUMPS => {
            let t = 1.0 - rng.gen::<f64>();
            if jumps.iter().any(|j| j.t == t) {
                return None;
            }
            let base = w.value_at(t).to_vec();
            jumps.push(Jump { t, value: fresh(rng, &base) });
            jumps.sort_by(|a, b| a.t.total_cmp(&b.t));
        }
        4 if !jumps.is_empty() => {
            let j = rng.gen_range(0..jumps.len());
            jumps.remove(j);
        }
        _ => return None,
    }
    debug_assert_eq!(t0.len(), d);
    StepPath::new(t0, jumps).ok()
}

/// Deterministic hill climbing for paths with small residual, restricted
/// to the certificate's domain. Each restart starts from `starts[r % len]`
/// and keeps a proposal only if it lowers the residual; the final path of
/// every restart is returned.
pub fn adversarial_search(
    cert: &DualCertificate,
    xi: &Payoff,
    starts: &[StepPath],
    restarts: usize,
    iters: usize,
    seed: u64,
    exec: ExecMode,
) -> Result<Vec<StepPath>, TransportError> {
    if starts.is_empty() {
        return Ok(Vec::new());
    }
    let pool = cert.value_pool();
    let scale = pool
        .iter()
        .flat_map(|v| v.iter().copied())
        .fold(1.0f64, f64::max)
        * 0.25;
    let results = exec.map_range(restarts, |r| -> Result<StepPath, TransportError> {
        let ev = Evaluator::new(cert);
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(r as u64));
        let mut cur = starts[r % starts.len()].clone();
        let Some(mut best) = ev.residual(&cur, xi)? else { return Ok(cur) };
        for _ in 0..iters {
            let Some(cand) = propose(&mut rng, &cur, &pool, scale) else { continue };
            if let Some(res) = ev.residual(&cand, xi)? {
                if res < best {
                    best = res;
                    cur = cand;
                }
            }
        }
        Ok(cur)
    });
    results.into_iter().collect()
}
