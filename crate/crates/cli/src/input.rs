use std::path::{Path, PathBuf};

use motlab::lattice::{rat, LatticeParams, LatticePath};
use motlab::measures::{marginals_from_calls, CallQuoteCurve, DiscreteMeasure, MeasureError, Peacock};
use motlab::pathspace::{Payoff, StepPath};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Clone, Debug, Serialize)]
pub struct InputRecord {
    pub role: String,
    pub path: String,
    pub sha256: String,
}

/// Reads input files and remembers their digests for the run record.
#[derive(Default)]
pub struct Inputs {
    pub records: Vec<InputRecord>,
}

impl Inputs {
    pub fn read(&mut self, role: &str, path: &Path) -> Result<Vec<u8>, CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        self.records.push(InputRecord {
            role: role.to_string(),
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
        Ok(bytes)
    }

    pub fn json<T: DeserializeOwned>(&mut self, role: &str, path: &Path) -> Result<T, CliError> {
        let bytes = self.read(role, path)?;
        serde_json::from_slice(&bytes).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
    }
}

/// Marginals as written on disk, before the convex-order check.
#[derive(Deserialize)]
struct RawPeacock {
    dim: usize,
    times: Vec<f64>,
    marginals: Vec<DiscreteMeasure>,
}

/// Call quotes per maturity; the time-0 law is the Dirac mass at `spot`.
#[derive(Deserialize)]
struct QuoteFile {
    quotes: Vec<CallQuoteCurve>,
}

/// Either `peacock.json` or `quotes.json`, told apart by their keys.
pub fn load_peacock(inputs: &mut Inputs, path: &Path) -> Result<Peacock, CliError> {
    Ok(load_peacock_checked(inputs, path)??)
}

/// As [`load_peacock`], but hands back the measure error of a file that
/// parsed, so the caller can report the violation itself.
pub fn load_peacock_checked(inputs: &mut Inputs, path: &Path) -> Result<Result<Peacock, MeasureError>, CliError> {
    let value: serde_json::Value = inputs.json("peacock", path)?;
    if value.get("quotes").is_some() {
        let file: QuoteFile = serde_json::from_value(value).map_err(|e| CliError::config(e.to_string()))?;
        return peacock_from_quotes(file.quotes);
    }
    let raw: RawPeacock = serde_json::from_value(value).map_err(|e| CliError::config(e.to_string()))?;
    if let Some(m) = raw.marginals.iter().find(|m| m.dim() != raw.dim) {
        return Err(CliError::config(format!("marginal of dimension {} in a {}-dimensional file", m.dim(), raw.dim)));
    }
    Ok(Peacock::new(raw.times, raw.marginals))
}

fn peacock_from_quotes(mut curves: Vec<CallQuoteCurve>) -> Result<Result<Peacock, MeasureError>, CliError> {
    if curves.is_empty() {
        return Err(CliError::config("quote file lists no maturities"));
    }
    curves.sort_by(|a, b| a.maturity.total_cmp(&b.maturity));
    let spot = curves[0].spot;
    if curves.iter().any(|c| c.spot != spot) {
        return Err(CliError::config("quote curves disagree on the spot"));
    }
    let mut times = Vec::new();
    let mut laws = Vec::new();
    if curves[0].maturity > 0.0 {
        times.push(0.0);
        laws.push(DiscreteMeasure::dirac(vec![spot]));
    }
    for c in &curves {
        times.push(c.maturity);
        match marginals_from_calls(c) {
            Ok(law) => laws.push(law),
            Err(e @ MeasureError::Arbitrage { .. }) => return Ok(Err(e)),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(Peacock::new(times, laws))
}

pub fn load_payoff(inputs: &mut Inputs, path: &Path) -> Result<Payoff, CliError> {
    inputs.json("payoff", path)
}

/// Tree parameters for the penalized sweep; the node budget comes from the
/// command line when absent.
#[derive(Deserialize)]
pub struct TreeSpec {
    pub n: u32,
    pub dim: usize,
    #[serde(default = "unit_times")]
    pub times: Vec<f64>,
    pub radius: f64,
    #[serde(default = "one")]
    pub j_max: usize,
    #[serde(default)]
    pub budget: Option<usize>,
    #[serde(default)]
    pub root: Option<Vec<f64>>,
}

fn unit_times() -> Vec<f64> {
    vec![0.0, 1.0]
}

fn one() -> usize {
    1
}

impl TreeSpec {
    pub fn params(&self, budget: Option<usize>) -> LatticeParams {
        let mut p = LatticeParams::new(self.n, self.dim, self.times.clone(), self.radius, self.j_max);
        if let Some(b) = budget.or(self.budget) {
            p.budget = b;
        }
        p.root = self.root.clone();
        p
    }
}

/// A path for the lattice diagnostics: a step path to lift, or an explicit
/// partition to test for membership.
pub enum PathInput {
    Step(StepPath),
    Partition(LatticePath),
}

#[derive(Deserialize)]
struct PartitionSpec {
    times: Vec<f64>,
    values: Vec<Vec<f64>>,
    marginal_idx: Vec<usize>,
}

#[derive(Deserialize)]
struct PathFile {
    #[serde(default = "unit_times")]
    times: Vec<f64>,
    #[serde(default)]
    path: Option<StepPath>,
    #[serde(default)]
    partition: Option<PartitionSpec>,
}

/// Returns the marginal times and the path.
pub fn load_path(inputs: &mut Inputs, path: &Path) -> Result<(Vec<f64>, PathInput), CliError> {
    let file: PathFile = inputs.json("path", path)?;
    let input = match (file.path, file.partition) {
        (Some(p), None) => PathInput::Step(p),
        (None, Some(s)) => {
            if s.times.len() != s.values.len() || s.times.is_empty() {
                return Err(CliError::config("partition needs one value per time"));
            }
            if let Some(t) = s.times.iter().find(|t| !t.is_finite()) {
                return Err(CliError::config(format!("partition time {t} is not finite")));
            }
            PathInput::Partition(LatticePath {
                times: s.times.iter().map(|&t| rat(t)).collect(),
                values: s.values,
                marginal_idx: s.marginal_idx,
            })
        }
        _ => return Err(CliError::config("path file needs exactly one of `path` and `partition`")),
    };
    Ok((file.times, input))
}

pub fn resolve(path: &Option<PathBuf>, flag: &str) -> Result<PathBuf, CliError> {
    path.clone().ok_or_else(|| CliError::config(format!("missing --{flag}")))
}
