use std::fmt;

use motlab::lattice::LatticeError;
use motlab::measures::MeasureError;
use motlab::transport::TransportError;

/// Failure classes, each with its own process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Input parsed but failed a mathematical check.
    Validation(String),
    /// Unreadable file, malformed JSON or inconsistent flags.
    Config(String),
    /// A solver gave up or found the instance infeasible.
    Solver(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            Self::Validation(_) => 1,
            Self::Config(_) => 2,
            Self::Solver(_) => 3,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Self::Config(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Validation(m) => write!(f, "validation failed: {m}"),
            Self::Config(m) => write!(f, "configuration error: {m}"),
            Self::Solver(m) => write!(f, "solver failure: {m}"),
        }
    }
}

impl From<MeasureError> for CliError {
    fn from(e: MeasureError) -> Self {
        match e {
            MeasureError::NotPeacock { .. } | MeasureError::Arbitrage { .. } => Self::Validation(e.to_string()),
            MeasureError::Lp(_) => Self::Solver(e.to_string()),
            _ => Self::Config(e.to_string()),
        }
    }
}

impl From<LatticeError> for CliError {
    fn from(e: LatticeError) -> Self {
        match e {
            LatticeError::NotMember(_) => Self::Validation(e.to_string()),
            _ => Self::Config(e.to_string()),
        }
    }
}

impl From<TransportError> for CliError {
    fn from(e: TransportError) -> Self {
        match e {
            TransportError::Measure(m) => m.into(),
            TransportError::Lattice(l) => l.into(),
            TransportError::NotMarginal | TransportError::BadInstance(_) | TransportError::Path(_) => {
                Self::Config(e.to_string())
            }
            TransportError::Infeasible(_)
            | TransportError::LatticeInfeasible { .. }
            | TransportError::NoMartingaleMeasure
            | TransportError::Unbounded
            | TransportError::Lp(_) => Self::Solver(e.to_string()),
        }
    }
}

impl From<motlab::pathspace::PathError> for CliError {
    fn from(e: motlab::pathspace::PathError) -> Self {
        Self::Config(e.to_string())
    }
}
