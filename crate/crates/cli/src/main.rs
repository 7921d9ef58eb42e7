mod commands;
mod error;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::CliError;

/// Robust price bounds under marginal constraints.
#[derive(Parser)]
#[command(name = "motlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a peacock (or a set of call quotes) is increasing in convex order.
    Validate(Common),
    /// Price interval of a payoff with plans and dual certificates.
    Price(Solve),
    /// Lift a path onto the dyadic lattice and report the error.
    Lattice(LatticeCmd),
    /// Sweep random W1 perturbations of the marginals.
    Stability(StabilityCmd),
    /// Penalized values against the superhedging value on a tree.
    Dn(DnCmd),
}

#[derive(Args)]
struct Common {
    /// Input JSON file.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Directory for config.json and result files.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolverFlags {
    /// Payoff JSON file.
    #[arg(long)]
    payoff: Option<PathBuf>,
    /// `exact` or `penalized:<c>`.
    #[arg(long, default_value = "exact")]
    mode: String,
    /// `float` or `rational` (marginal solver only).
    #[arg(long, default_value = "float")]
    arith: String,
    /// Lattice level; forces the lattice solver.
    #[arg(long)]
    n: Option<u32>,
    /// Largest lattice tree, in nodes.
    #[arg(long)]
    budget: Option<usize>,
    /// Spatial moves per marginal interval on the lattice.
    #[arg(long, default_value_t = 1)]
    jmax: usize,
    /// Coordinatewise value cap of the lattice.
    #[arg(long)]
    cap: Option<f64>,
}

#[derive(Args)]
struct Solve {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Args)]
struct LatticeCmd {
    #[command(flatten)]
    common: Common,
    /// Named path family used instead of --input: `sko_stopo` or `closeness`.
    #[arg(long)]
    fixture: Option<String>,
    /// Family parameter of the fixture.
    #[arg(long, default_value_t = 4)]
    fixture_n: u32,
    /// Levels, as `a..b` or a comma list.
    #[arg(long, default_value = "3..8")]
    n: String,
    /// Reject paths whose norm exceeds this cap.
    #[arg(long)]
    cap: Option<f64>,
}

#[derive(Args)]
struct StabilityCmd {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    solver: SolverFlags,
    #[arg(long, default_value = "0.2,0.1,0.05,0.025,0")]
    radii: String,
    /// Seeds, as `a..b` or a comma list.
    #[arg(long, default_value = "1..10")]
    seeds: String,
}

#[derive(Args)]
struct DnCmd {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    payoff: Option<PathBuf>,
    /// Penalty weights, as `a..b` or a comma list.
    #[arg(long, default_value = "0,0.5,1,2,4,8,16")]
    n: String,
    #[arg(long)]
    budget: Option<usize>,
}

fn init_pool() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("MOTLAB_THREADS") else { return Ok(()) };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|t| *t > 0)
        .ok_or_else(|| CliError::config(format!("MOTLAB_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::config(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_pool()?;
    match cli.command {
        Command::Validate(c) => commands::validate(&c),
        Command::Price(c) => commands::price(&c),
        Command::Lattice(c) => commands::lattice(&c),
        Command::Stability(c) => commands::stability(&c),
        Command::Dn(c) => commands::dn(&c),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code() as u8)
        }
    }
}
