use motlab::lattice::{check_membership, enumerate_tree, grid_project, lift, rat, LatticeParams, LiftOptions};
use motlab::measures::{MeasureError, OrderWitness, Peacock};
use motlab::pathspace::{example_fixture, rho_t, Normalization, Payoff, StepPath, TimeGrid};
use motlab::penalized::dn_convergence_experiment;
use motlab::transport::{leaf_values, price_interval, stability_sweep, Arith, MarginalMode, SolverConfig};
use motlab::ExecMode;
use serde::Serialize;

use crate::error::CliError;
use crate::input::{self, Inputs, PathInput};
use crate::output::{num, Csv, OutDir, RunConfig};
use crate::{Common, DnCmd, LatticeCmd, Solve, SolverFlags, StabilityCmd};

const STABILITY_TOL: f64 = 1e-6;
const DN_TOL: f64 = 1e-8;
const DEFAULT_LEVEL: u32 = 2;

/// `a..b` (inclusive, integers) or a comma-separated list.
fn parse_list(raw: &str, flag: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::config(format!("cannot parse --{flag} {raw:?}"));
    if let Some((a, b)) = raw.split_once("..") {
        let a: i64 = a.trim().parse().map_err(|_| bad())?;
        let b: i64 = b.trim().parse().map_err(|_| bad())?;
        if b < a {
            return Err(bad());
        }
        return Ok((a..=b).map(|k| k as f64).collect());
    }
    raw.split(',')
        .map(|s| s.trim().parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(bad))
        .collect()
}

fn parse_levels(raw: &str, flag: &str) -> Result<Vec<u32>, CliError> {
    parse_list(raw, flag)?
        .into_iter()
        .map(|x| {
            if x >= 1.0 && x.fract() == 0.0 && x <= 40.0 {
                Ok(x as u32)
            } else {
                Err(CliError::config(format!("--{flag} entries must be integers in 1..=40, got {x}")))
            }
        })
        .collect()
}

fn parse_seeds(raw: &str) -> Result<Vec<u64>, CliError> {
    parse_list(raw, "seeds")?
        .into_iter()
        .map(|x| {
            if x >= 0.0 && x.fract() == 0.0 {
                Ok(x as u64)
            } else {
                Err(CliError::config(format!("seeds must be nonnegative integers, got {x}")))
            }
        })
        .collect()
}

fn parse_mode(raw: &str) -> Result<MarginalMode, CliError> {
    if raw == "exact" {
        return Ok(MarginalMode::Exact);
    }
    if let Some(c) = raw.strip_prefix("penalized:") {
        if let Ok(c) = c.parse::<f64>() {
            if c >= 0.0 && c.is_finite() {
                return Ok(MarginalMode::Penalized { c });
            }
        }
    }
    Err(CliError::config(format!("--mode must be `exact` or `penalized:<c>` with c >= 0, got {raw:?}")))
}

fn parse_arith(raw: &str) -> Result<Arith, CliError> {
    match raw {
        "float" => Ok(Arith::Float),
        "rational" => Ok(Arith::Rational),
        _ => Err(CliError::config(format!("--arith must be `float` or `rational`, got {raw:?}"))),
    }
}

/// Marginal solver for marginal payoffs in exact mode without a lattice
/// level; the lattice solver otherwise.
fn solver_config(p: &Peacock, xi: &Payoff, f: &SolverFlags) -> Result<SolverConfig, CliError> {
    let mode = parse_mode(&f.mode)?;
    let arith = parse_arith(&f.arith)?;
    if mode == MarginalMode::Exact && f.n.is_none() && xi.is_marginal(p.times()) {
        return Ok(SolverConfig::Marginal { arith });
    }
    if arith == Arith::Rational {
        return Err(CliError::config("rational arithmetic is only available with the marginal solver"));
    }
    let n = f.n.unwrap_or(DEFAULT_LEVEL);
    let cap = match f.cap {
        Some(c) => c,
        None => p.laws().iter().map(|l| l.max_norm()).fold(1.0, f64::max).ceil(),
    };
    let mut params = LatticeParams::new(n, p.dim(), p.times().to_vec(), cap, f.jmax);
    if let Some(b) = f.budget {
        params.budget = b;
    }
    params.root = Some(grid_project(&p.first().mean(), n)?);
    Ok(SolverConfig::Lattice { params, mode })
}

fn describe(cfg: &SolverConfig) -> (Option<String>, Option<String>, Option<LatticeParams>) {
    match cfg {
        SolverConfig::Marginal { arith } => {
            let a = if *arith == Arith::Rational { "rational" } else { "float" };
            (Some("exact".into()), Some(a.into()), None)
        }
        SolverConfig::Lattice { params, mode } => {
            let m = match mode {
                MarginalMode::Exact => "exact".to_string(),
                MarginalMode::Penalized { c } => format!("penalized:{c}"),
                MarginalMode::Free => "free".to_string(),
            };
            (Some(m), Some("float".into()), Some(params.clone()))
        }
    }
}

#[derive(Serialize)]
struct Violation {
    s: f64,
    t: f64,
    witness: OrderWitness,
    message: String,
}

#[derive(Serialize)]
struct ValidateReport {
    valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    violation: Option<Violation>,
}

pub fn validate(c: &Common) -> Result<(), CliError> {
    let path = input::resolve(&c.input, "input")?;
    let mut inputs = Inputs::default();
    let checked = input::load_peacock_checked(&mut inputs, &path)?;
    let out = OutDir::new(c.out.as_deref())?;
    out.config(&RunConfig { command: "validate".into(), inputs: inputs.records, ..Default::default() })?;
    match checked {
        Ok(p) => {
            println!("valid peacock: {} marginals, dimension {}", p.len(), p.dim());
            out.json("peacock.json", &p)?;
            out.json("validate.json", &ValidateReport { valid: true, violation: None })
        }
        Err(MeasureError::NotPeacock { s, t, witness }) => {
            println!("not a peacock between t = {s} and t = {t}: {witness}");
            if let OrderWitness::CallStrike { strike, .. } = &witness {
                println!("witness strike: {strike}");
            }
            let message = witness.to_string();
            out.json(
                "validate.json",
                &ValidateReport { valid: false, violation: Some(Violation { s, t, witness, message: message.clone() }) },
            )?;
            Err(CliError::Validation(message))
        }
        Err(e) => Err(e.into()),
    }
}

pub fn price(c: &Solve) -> Result<(), CliError> {
    let mut inputs = Inputs::default();
    let p = input::load_peacock(&mut inputs, &input::resolve(&c.common.input, "input")?)?;
    let xi = input::load_payoff(&mut inputs, &input::resolve(&c.solver.payoff, "payoff")?)?;
    let cfg = solver_config(&p, &xi, &c.solver)?;
    let (mode, arith, lattice) = describe(&cfg);
    let out = OutDir::new(c.common.out.as_deref())?;
    out.config(&RunConfig { command: "price".into(), inputs: inputs.records, mode, arith, lattice, ..Default::default() })?;
    let iv = price_interval(&p, &xi, &cfg)?;
    println!("lower {}", num(iv.lower));
    println!("upper {}", num(iv.upper));
    if iv.relaxation != (0.0, 0.0) {
        println!("marginal relaxation (W1) {} {}", num(iv.relaxation.0), num(iv.relaxation.1));
    }
    out.json("price.json", &iv)
}

#[derive(Serialize)]
struct LiftRow {
    path: usize,
    n: u32,
    rho_t: f64,
    scaled: f64,
    path_norm: f64,
    lifted_norm: f64,
    norm_ok: bool,
    member: bool,
}

fn lift_rows(idx: usize, w: &StepPath, grid: &TimeGrid, ns: &[u32], cap: Option<f64>) -> Result<Vec<LiftRow>, CliError> {
    let ends: Vec<_> = grid.times().iter().map(|&t| rat(t)).collect();
    let norm = w.sup_norm();
    let opts = LiftOptions { cap, ..LiftOptions::default() };
    ns.iter()
        .map(|&n| {
            let lifted = lift(w, n, grid, opts)?;
            let lw = lifted.path.to_step_path()?;
            let rho = rho_t(w, &lw, grid)?;
            let lifted_norm = lifted.path.sup_norm();
            Ok(LiftRow {
                path: idx,
                n,
                rho_t: rho,
                scaled: rho / (0.5f64.powi(n as i32) * (1.0 + norm)),
                path_norm: norm,
                lifted_norm,
                norm_ok: lifted_norm <= norm,
                member: check_membership(&lifted.path, &ends, n).is_ok(),
            })
        })
        .collect()
}

pub fn lattice(c: &LatticeCmd) -> Result<(), CliError> {
    let ns = parse_levels(&c.n, "n")?;
    let mut inputs = Inputs::default();
    let (times, paths) = match (&c.fixture, &c.common.input) {
        (Some(name), None) => {
            let family = example_fixture(name, c.fixture_n)?;
            (vec![0.0, 1.0], family.into_iter().map(|(w, _)| PathInput::Step(w)).collect::<Vec<_>>())
        }
        (None, Some(path)) => {
            let (times, p) = input::load_path(&mut inputs, path)?;
            (times, vec![p])
        }
        _ => return Err(CliError::config("give exactly one of --input and --fixture")),
    };
    let grid = TimeGrid::new(times.clone())?;
    let out = OutDir::new(c.common.out.as_deref())?;
    out.config(&RunConfig {
        command: "lattice".into(),
        inputs: inputs.records,
        n: ns.iter().map(|&n| f64::from(n)).collect(),
        ..Default::default()
    })?;

    let mut rows = Vec::new();
    for (idx, p) in paths.iter().enumerate() {
        match p {
            PathInput::Partition(lp) => {
                let ends: Vec<_> = times.iter().map(|&t| rat(t)).collect();
                for &n in &ns {
                    if let Err(fail) = check_membership(lp, &ends, n) {
                        println!("not a member of the level-{n} lattice: {fail}");
                        return Err(CliError::Validation(format!("not a member: {fail}")));
                    }
                    println!("member of the level-{n} lattice");
                }
            }
            PathInput::Step(w) => rows.extend(lift_rows(idx, w, &grid, &ns, c.cap)?),
        }
    }
    if rows.is_empty() {
        return Ok(());
    }
    let mut csv = Csv::new(&["path", "n", "rho_t", "scaled", "path_norm", "lifted_norm", "norm_ok", "member"]);
    for r in &rows {
        csv.row(&[
            r.path.to_string(),
            r.n.to_string(),
            num(r.rho_t),
            num(r.scaled),
            num(r.path_norm),
            num(r.lifted_norm),
            r.norm_ok.to_string(),
            r.member.to_string(),
        ]);
    }
    print!("{}", csv.as_str());
    out.write("lattice.csv", csv.as_str())
}

#[derive(Serialize)]
struct StabilitySummary {
    base_lower: f64,
    base_upper: f64,
    eps: Vec<(f64, f64)>,
    monotone: bool,
}

pub fn stability(c: &StabilityCmd) -> Result<(), CliError> {
    let radii = parse_list(&c.radii, "radii")?;
    if let Some(r) = radii.iter().find(|r| **r < 0.0) {
        return Err(CliError::config(format!("negative radius {r}")));
    }
    let seeds = parse_seeds(&c.seeds)?;
    let mut inputs = Inputs::default();
    let p = input::load_peacock(&mut inputs, &input::resolve(&c.common.input, "input")?)?;
    let xi = input::load_payoff(&mut inputs, &input::resolve(&c.solver.payoff, "payoff")?)?;
    let cfg = solver_config(&p, &xi, &c.solver)?;
    let (mode, arith, lattice) = describe(&cfg);
    let out = OutDir::new(c.common.out.as_deref())?;
    out.config(&RunConfig {
        command: "stability".into(),
        inputs: inputs.records,
        mode,
        arith,
        lattice,
        radii: radii.clone(),
        seeds: seeds.clone(),
        ..Default::default()
    })?;
    let report = stability_sweep(&p, &xi, &cfg, &radii, &seeds, STABILITY_TOL, ExecMode::default())?;
    let mut csv = Csv::new(&["radius", "seed", "lower", "upper", "eps", "status", "w1_shift"]);
    for r in &report.rows {
        let status = serde_json::to_value(r.status).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
        csv.row(&[num(r.radius), r.seed.to_string(), num(r.lower), num(r.upper), num(r.escape), status, num(r.w1_shift)]);
    }
    out.write("stability.csv", csv.as_str())?;
    println!("base interval [{}, {}]", num(report.base_lower), num(report.base_upper));
    for (r, e) in &report.eps {
        println!("radius {}: eps {}", num(*r), num(*e));
    }
    println!("eps nonincreasing as the radius shrinks: {}", report.monotone);
    out.json(
        "stability.json",
        &StabilitySummary {
            base_lower: report.base_lower,
            base_upper: report.base_upper,
            eps: report.eps.clone(),
            monotone: report.monotone,
        },
    )
}

#[derive(Serialize)]
struct DnSummary {
    v0: f64,
    monotone: bool,
    above_v0: bool,
    n_star: Option<f64>,
    hedge_bound: f64,
}

pub fn dn(c: &DnCmd) -> Result<(), CliError> {
    let ns = parse_list(&c.n, "n")?;
    if let Some(n) = ns.iter().find(|n| **n < 0.0) {
        return Err(CliError::config(format!("negative penalty {n}")));
    }
    let mut inputs = Inputs::default();
    let spec: input::TreeSpec = inputs.json("tree", &input::resolve(&c.common.input, "input")?)?;
    let xi = input::load_payoff(&mut inputs, &input::resolve(&c.payoff, "payoff")?)?;
    let params = spec.params(c.budget);
    let tree = enumerate_tree(&params)?;
    let mut vals = leaf_values(&tree, &xi)?;
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let normalization = if lo < 0.0 || hi > 1.0 { Normalization::from_range(lo, hi) } else { Normalization::IDENTITY };
    for v in &mut vals {
        *v = normalization.apply(*v).clamp(0.0, 1.0);
    }
    let out = OutDir::new(c.common.out.as_deref())?;
    out.config(&RunConfig {
        command: "dn".into(),
        inputs: inputs.records,
        lattice: Some(params),
        n: ns.clone(),
        normalization: Some(normalization),
        ..Default::default()
    })?;
    let table = dn_convergence_experiment(&tree, &vals, &ns, DN_TOL, ExecMode::default())?;
    let mut csv = Csv::new(&["n", "value", "expected_drift", "gap_to_V0"]);
    for r in &table.rows {
        csv.row(&[num(r.n), num(r.value), num(r.expected_drift), num(r.gap_to_v0)]);
    }
    print!("{}", csv.as_str());
    println!("V0 {}", num(table.v0));
    match table.n_star {
        Some(n) => println!("gap within {DN_TOL:e} from n = {}", num(n)),
        None => println!("gap above {DN_TOL:e} for every listed n"),
    }
    out.write("dn.csv", csv.as_str())?;
    out.json(
        "dn.json",
        &DnSummary {
            v0: table.v0,
            monotone: table.monotone,
            above_v0: table.above_v0,
            n_star: table.n_star,
            hedge_bound: table.hedge_bound,
        },
    )
}
