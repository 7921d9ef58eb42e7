use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use motlab::lattice::LatticeParams;
use motlab::pathspace::Normalization;
use serde::Serialize;

use crate::error::CliError;
use crate::input::InputRecord;

/// Everything needed to reproduce a run; written as `config.json`.
#[derive(Clone, Debug, Default, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub inputs: Vec<InputRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub arith: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeParams>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub n: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub radii: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub seeds: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalization: Option<Normalization>,
}

/// Output directory; files are written whole, in a fixed order, by one thread.
pub struct OutDir {
    root: Option<PathBuf>,
}

impl OutDir {
    pub fn new(root: Option<&Path>) -> Result<Self, CliError> {
        if let Some(r) = root {
            std::fs::create_dir_all(r).map_err(|e| CliError::config(format!("cannot create {}: {e}", r.display())))?;
        }
        Ok(Self { root: root.map(Path::to_path_buf) })
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<(), CliError> {
        let Some(root) = &self.root else { return Ok(()) };
        let path = root.join(name);
        std::fs::write(&path, contents).map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<(), CliError> {
        let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::config(e.to_string()))?;
        s.push('\n');
        self.write(name, &s)
    }

    pub fn config(&self, cfg: &RunConfig) -> Result<(), CliError> {
        self.json("config.json", cfg)
    }
}

/// Comma-separated table with a header row. Floats use the shortest
/// representation that parses back to the same value.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self { text: header.join(",") + "\n" }
    }

    pub fn row(&mut self, cells: &[String]) {
        let _ = writeln!(self.text, "{}", cells.join(","));
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

pub fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}
