use super::model::{LinearProgram, Relation, Sense};
use super::LpError;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    /// Pivot cap across both phases; `None` picks a size-dependent default.
    pub max_iterations: Option<usize>,
    /// Record the user-sense objective after every phase-II pivot.
    pub record_trace: bool,
}

#[derive(Clone, Debug, Default)]
pub struct SolveStats {
    pub phase1_pivots: usize,
    pub phase2_pivots: usize,
    /// Objective after each phase-II pivot (only with `record_trace`).
    pub objective_trace: Vec<f64>,
}

/// Result of [`solve`].
///
/// Dual multipliers follow the shadow-price convention: `duals[i]` is the
/// rate of change of the optimal value per unit increase of constraint `i`'s
/// right-hand side, for either objective sense.
#[derive(Clone, Debug)]
pub struct LpSolution<S> {
    pub status: LpStatus,
    pub sense: Sense,
    pub x: Vec<S>,
    pub duals: Vec<S>,
    /// `c_j - sum_i duals[i] * a_ij`.
    pub reduced_costs: Vec<S>,
    pub objective: S,
    /// Row multipliers proving infeasibility (see [`verify_farkas`](super::verify_farkas)).
    pub farkas: Option<Vec<S>>,
    /// Direction along which the objective improves without bound.
    pub ray: Option<Vec<S>>,
    pub stats: SolveStats,
}

impl<S: Scalar> LpSolution<S> {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    pub fn objective_f64(&self) -> f64 {
        self.objective.to_f64()
    }

    pub fn x_f64(&self) -> Vec<f64> {
        self.x.iter().map(Scalar::to_f64).collect()
    }

    pub fn duals_f64(&self) -> Vec<f64> {
        self.duals.iter().map(Scalar::to_f64).collect()
    }

    fn empty(status: LpStatus, sense: Sense, stats: SolveStats) -> Self {
        Self {
            status,
            sense,
            x: Vec::new(),
            duals: Vec::new(),
            reduced_costs: Vec::new(),
            objective: S::zero(),
            farkas: None,
            ray: None,
            stats,
        }
    }
}

pub fn solve<S: Scalar>(lp: &LinearProgram<S>) -> Result<LpSolution<S>, LpError> {
    solve_with(lp, &SolveOptions::default())
}

/// How a user variable maps onto nonnegative standard-form columns.
#[derive(Clone, Debug)]
enum Repr<S> {
    /// `x = shift + col`
    Shift { col: usize, shift: S },
    /// `x = shift - col`
    Neg { col: usize, shift: S },
    /// `x = pos - neg`
    Split { pos: usize, neg: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ColKind {
    Structural,
    Slack,
    Artificial,
}

struct StdRow<S> {
    coeffs: Vec<(usize, S)>,
    relation: Relation,
    rhs: S,
    /// +1 or -1: the row was multiplied by this to make `rhs >= 0`.
    flip: bool,
    /// User constraint index, or `None` for an internal bound row.
    origin: Option<usize>,
}

struct Tableau<S> {
    t: Vec<Vec<S>>,
    obj: Vec<S>,
    basis: Vec<usize>,
    ncols: usize,
}

impl<S: Scalar> Tableau<S> {
    fn rhs(&self, i: usize) -> &S {
        &self.t[i][self.ncols]
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let piv = self.t[r][e].clone();
        let width = self.ncols + 1;
        for k in 0..width {
            if !self.t[r][k].is_zero() {
                self.t[r][k] = (self.t[r][k].clone() / piv.clone()).chop();
            }
        }
        self.t[r][e] = S::one();
        let support: Vec<usize> = (0..width).filter(|&k| !self.t[r][k].is_zero()).collect();
        let (before, rest) = self.t.split_at_mut(r);
        let (prow, after) = rest.split_first_mut().expect("pivot row");
        let prow: &Vec<S> = prow;
        for row in before.iter_mut().chain(after.iter_mut()) {
            eliminate(row, prow, &support, e);
        }
        eliminate(&mut self.obj, prow, &support, e);
        self.basis[r] = e;
    }

    /// Minimum-ratio row for entering column `e`. Ties go to the smallest
    /// basic index under Bland's rule and to the largest pivot otherwise.
    fn leaving_row(&self, e: usize, bland: bool) -> Option<usize> {
        let piv_tol = if S::EXACT { S::zero() } else { S::from_f64(1e-9) };
        let mut best: Option<(usize, S)> = None;
        for i in 0..self.t.len() {
            let a = &self.t[i][e];
            if *a <= piv_tol {
                continue;
            }
            let ratio = self.rhs(i).clone() / a.clone();
            best = match best {
                None => Some((i, ratio)),
                Some((bi, br)) => {
                    let tie_tol = if S::EXACT {
                        S::zero()
                    } else {
                        S::from_f64(1e-12) * (S::one() + br.abs())
                    };
                    let wins_tie = if bland {
                        self.basis[i] < self.basis[bi]
                    } else {
                        *a > self.t[bi][e]
                    };
                    if ratio < br.clone() - tie_tol.clone()
                        || ((ratio.clone() - br.clone()).abs() <= tie_tol && wins_tie)
                    {
                        Some((i, ratio))
                    } else {
                        Some((bi, br))
                    }
                }
            };
        }
        best.map(|(i, _)| i)
    }

    /// Entering column: the most negative reduced cost, or under Bland's
    /// rule the smallest admissible index with a negative one.
    fn entering(&self, allowed: &[bool], bland: bool) -> Option<usize> {
        let mut candidates = (0..self.ncols).filter(|&j| allowed[j] && self.obj[j].is_neg());
        if bland {
            return candidates.next();
        }
        let mut best: Option<usize> = None;
        for j in candidates {
            if best.map_or(true, |b| self.obj[j] < self.obj[b]) {
                best = Some(j);
            }
        }
        best
    }

    /// Rebuilds `B^-1 [A | b]` from the original rows and reprices, which
    /// discards the rounding accumulated by successive pivots. Leaves the
    /// tableau untouched when the basis is numerically singular.
    fn refactor(&mut self, a0: &[Vec<S>], costs: &[S]) {
        let m = a0.len();
        let mut t = a0.to_vec();
        for k in 0..m {
            let c = self.basis[k];
            let Some(p) = (k..m).max_by(|&i, &j| t[i][c].abs().partial_cmp(&t[j][c].abs()).unwrap()) else {
                return;
            };
            if t[p][c].abs().to_f64() < 1e-11 {
                return;
            }
            t.swap(k, p);
            let piv = t[k][c].clone();
            for v in t[k].iter_mut() {
                if !v.is_zero() {
                    *v = v.clone() / piv.clone();
                }
            }
            t[k][c] = S::one();
            let support: Vec<usize> = (0..=self.ncols).filter(|&j| !t[k][j].is_zero()).collect();
            let (before, rest) = t.split_at_mut(k);
            let (prow, after) = rest.split_first_mut().expect("pivot row");
            for row in before.iter_mut().chain(after.iter_mut()) {
                eliminate(row, prow, &support, c);
            }
        }
        for row in t.iter_mut() {
            for v in row.iter_mut() {
                *v = v.clone().chop();
            }
            // tiny negative right-hand sides are rounding
            let last = row.len() - 1;
            if row[last] < S::zero() && !row[last].is_neg() {
                row[last] = S::zero();
            }
        }
        self.t = t;
        self.load_costs(costs);
    }

    fn load_costs(&mut self, costs: &[S]) {
        let mut obj: Vec<S> = costs.to_vec();
        obj.push(S::zero());
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = costs[b].clone();
            if cb.is_zero() {
                continue;
            }
            for k in 0..=self.ncols {
                if !self.t[i][k].is_zero() {
                    obj[k] = (obj[k].clone() - cb.clone() * self.t[i][k].clone()).chop();
                }
            }
        }
        self.obj = obj;
    }
}

fn eliminate<S: Scalar>(row: &mut [S], prow: &[S], support: &[usize], e: usize) {
    let f = row[e].clone();
    if f.is_zero() {
        return;
    }
    for &k in support {
        row[k] = (row[k].clone() - f.clone() * prow[k].clone()).chop();
    }
    row[e] = S::zero();
}

enum Phase {
    Optimal,
    Unbounded(usize),
}

/// Degenerate pivots in a row after which Bland's rule takes over.
const STALL_LIMIT: usize = 50;

fn run_phase<S: Scalar>(
    tab: &mut Tableau<S>,
    allowed: &[bool],
    ctx: &PhaseCtx<'_, S>,
    pivots: &mut usize,
    limit: usize,
    mut on_pivot: impl FnMut(&Tableau<S>),
) -> Result<Phase, LpError> {
    let mut stalled = 0usize;
    let mut since_refactor = 0usize;
    let refactor_every = tab.t.len().max(100);
    loop {
        let bland = stalled >= STALL_LIMIT;
        let Some(e) = tab.entering(allowed, bland) else {
            if !S::EXACT && since_refactor > 0 {
                tab.refactor(ctx.a0, ctx.costs);
                since_refactor = 0;
                if tab.entering(allowed, bland).is_some() {
                    continue;
                }
            }
            return Ok(Phase::Optimal);
        };
        let Some(r) = tab.leaving_row(e, bland) else {
            return Ok(Phase::Unbounded(e));
        };
        if *pivots >= limit {
            return Err(LpError::IterationLimit(limit));
        }
        let degenerate = tab.rhs(r).is_negligible();
        tab.pivot(r, e);
        *pivots += 1;
        stalled = if degenerate { stalled + 1 } else { 0 };
        since_refactor += 1;
        if !S::EXACT && since_refactor >= refactor_every {
            tab.refactor(ctx.a0, ctx.costs);
            since_refactor = 0;
        }
        on_pivot(tab);
    }
}

/// Original rows and the current phase's costs, for reinversion.
struct PhaseCtx<'a, S> {
    a0: &'a [Vec<S>],
    costs: &'a [S],
}

pub fn solve_with<S: Scalar>(
    lp: &LinearProgram<S>,
    opts: &SolveOptions,
) -> Result<LpSolution<S>, LpError> {
    lp.validate()?;
    let n = lp.num_vars();

    // Standard-form columns for user variables.
    let mut reprs: Vec<Repr<S>> = Vec::with_capacity(n);
    let mut nstruct = 0usize;
    let mut bound_rows: Vec<(usize, S)> = Vec::new();
    for v in &lp.variables {
        let repr = match (&v.lower, &v.upper) {
            (Some(l), u) => {
                let col = nstruct;
                nstruct += 1;
                if let Some(u) = u {
                    bound_rows.push((col, u.clone() - l.clone()));
                }
                Repr::Shift {
                    col,
                    shift: l.clone(),
                }
            }
            (None, Some(u)) => {
                let col = nstruct;
                nstruct += 1;
                Repr::Neg {
                    col,
                    shift: u.clone(),
                }
            }
            (None, None) => {
                let pos = nstruct;
                nstruct += 2;
                Repr::Split { pos, neg: pos + 1 }
            }
        };
        reprs.push(repr);
    }

    let mut rows: Vec<StdRow<S>> = Vec::with_capacity(lp.num_constraints() + bound_rows.len());
    for (ci, c) in lp.constraints.iter().enumerate() {
        let mut rhs = c.rhs.clone();
        let mut coeffs = Vec::with_capacity(c.coeffs.len() + 1);
        for (j, a) in &c.coeffs {
            match &reprs[*j] {
                Repr::Shift { col, shift } => {
                    rhs = rhs - a.clone() * shift.clone();
                    coeffs.push((*col, a.clone()));
                }
                Repr::Neg { col, shift } => {
                    rhs = rhs - a.clone() * shift.clone();
                    coeffs.push((*col, -a.clone()));
                }
                Repr::Split { pos, neg } => {
                    coeffs.push((*pos, a.clone()));
                    coeffs.push((*neg, -a.clone()));
                }
            }
        }
        rows.push(StdRow {
            coeffs,
            relation: c.relation,
            rhs,
            flip: false,
            origin: Some(ci),
        });
    }
    for (col, cap) in bound_rows {
        rows.push(StdRow {
            coeffs: vec![(col, S::one())],
            relation: Relation::Le,
            rhs: cap,
            flip: false,
            origin: None,
        });
    }
    for row in rows.iter_mut() {
        if row.rhs < S::zero() {
            row.flip = true;
            row.rhs = -row.rhs.clone();
            for (_, a) in row.coeffs.iter_mut() {
                *a = -a.clone();
            }
            row.relation = match row.relation {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    let m = rows.len();
    let mut kinds = vec![ColKind::Structural; nstruct];
    let mut slack_of = vec![None; m];
    for (i, row) in rows.iter().enumerate() {
        if row.relation != Relation::Eq {
            slack_of[i] = Some(kinds.len());
            kinds.push(ColKind::Slack);
        }
    }
    let mut init_col = vec![0usize; m];
    let mut has_art = false;
    for (i, row) in rows.iter().enumerate() {
        if row.relation == Relation::Le {
            init_col[i] = slack_of[i].expect("slack");
        } else {
            init_col[i] = kinds.len();
            kinds.push(ColKind::Artificial);
            has_art = true;
        }
    }
    let ncols = kinds.len();

    let mut t = vec![vec![S::zero(); ncols + 1]; m];
    for (i, row) in rows.iter().enumerate() {
        for (c, a) in &row.coeffs {
            t[i][*c] = t[i][*c].clone() + a.clone();
        }
        if let Some(s) = slack_of[i] {
            t[i][s] = if row.relation == Relation::Le {
                S::one()
            } else {
                -S::one()
            };
        }
        t[i][init_col[i]] = S::one();
        t[i][ncols] = row.rhs.clone();
    }

    // Phase-II costs (internal problem is always a minimization).
    let maximize = lp.sense == Sense::Maximize;
    let mut c2 = vec![S::zero(); ncols];
    let mut offset = S::zero();
    for (j, cj) in &lp.objective {
        let cj = if maximize { -cj.clone() } else { cj.clone() };
        match &reprs[*j] {
            Repr::Shift { col, shift } => {
                offset = offset + cj.clone() * shift.clone();
                c2[*col] = c2[*col].clone() + cj;
            }
            Repr::Neg { col, shift } => {
                offset = offset + cj.clone() * shift.clone();
                c2[*col] = c2[*col].clone() - cj;
            }
            Repr::Split { pos, neg } => {
                c2[*pos] = c2[*pos].clone() + cj.clone();
                c2[*neg] = c2[*neg].clone() - cj;
            }
        }
    }

    let a0 = t.clone();
    let mut tab = Tableau {
        t,
        obj: Vec::new(),
        basis: init_col.clone(),
        ncols,
    };
    let limit = opts
        .max_iterations
        .unwrap_or(50_000 + 50 * (m + ncols));
    let mut stats = SolveStats::default();
    let bnorm = rows
        .iter()
        .map(|r| r.rhs.to_f64().abs())
        .fold(0.0f64, f64::max);
    let feas_tol = if S::EXACT {
        S::zero()
    } else {
        S::from_f64(1e-9 * (1.0 + bnorm))
    };

    if has_art {
        let c1: Vec<S> = kinds
            .iter()
            .map(|k| {
                if *k == ColKind::Artificial {
                    S::one()
                } else {
                    S::zero()
                }
            })
            .collect();
        tab.load_costs(&c1);
        let allowed = vec![true; ncols];
        let mut pivots = 0;
        // Phase I is bounded below by zero, so it always terminates optimal.
        let ctx = PhaseCtx { a0: &a0, costs: &c1 };
        run_phase(&mut tab, &allowed, &ctx, &mut pivots, limit, |_| {})?;
        stats.phase1_pivots = pivots;
        let infeas = -tab.obj[ncols].clone();
        if infeas > feas_tol {
            let mut y = vec![S::zero(); lp.num_constraints()];
            for (i, row) in rows.iter().enumerate() {
                if let Some(ci) = row.origin {
                    let yi = c1[init_col[i]].clone() - tab.obj[init_col[i]].clone();
                    y[ci] = if row.flip { -yi } else { yi };
                }
            }
            let mut sol = LpSolution::empty(LpStatus::Infeasible, lp.sense, stats);
            sol.farkas = Some(y);
            return Ok(sol);
        }
        // Drive artificial variables out of the basis where possible.
        for i in 0..m {
            if kinds[tab.basis[i]] != ColKind::Artificial {
                continue;
            }
            let tol = if S::EXACT { S::zero() } else { S::from_f64(1e-9) };
            if let Some(e) = (0..ncols)
                .find(|&j| kinds[j] != ColKind::Artificial && tab.t[i][j].abs() > tol)
            {
                tab.pivot(i, e);
                stats.phase1_pivots += 1;
            }
        }
    }

    tab.load_costs(&c2);
    let allowed: Vec<bool> = kinds.iter().map(|k| *k != ColKind::Artificial).collect();
    let mut pivots = 0;
    let mut trace = Vec::new();
    let record = opts.record_trace;
    let remaining = limit.saturating_sub(stats.phase1_pivots);
    let ctx = PhaseCtx { a0: &a0, costs: &c2 };
    let phase = run_phase(&mut tab, &allowed, &ctx, &mut pivots, remaining, |tb| {
        if record {
            let z = -tb.obj[ncols].clone() + offset.clone();
            let z = if maximize { -z } else { z };
            trace.push(z.to_f64());
        }
    })?;
    stats.phase2_pivots = pivots;
    stats.objective_trace = trace;

    // Current basic solution in standard-form columns.
    let mut xs = vec![S::zero(); ncols];
    for (i, &b) in tab.basis.iter().enumerate() {
        xs[b] = tab.rhs(i).clone();
    }
    let to_user = |cols: &[S]| -> Vec<S> {
        reprs
            .iter()
            .map(|r| match r {
                Repr::Shift { col, shift } => shift.clone() + cols[*col].clone(),
                Repr::Neg { col, shift } => shift.clone() - cols[*col].clone(),
                Repr::Split { pos, neg } => cols[*pos].clone() - cols[*neg].clone(),
            })
            .collect()
    };

    if let Phase::Unbounded(e) = phase {
        let mut d = vec![S::zero(); ncols];
        d[e] = S::one();
        for (i, &b) in tab.basis.iter().enumerate() {
            d[b] = -tab.t[i][e].clone();
        }
        let ray: Vec<S> = reprs
            .iter()
            .map(|r| match r {
                Repr::Shift { col, .. } => d[*col].clone(),
                Repr::Neg { col, .. } => -d[*col].clone(),
                Repr::Split { pos, neg } => d[*pos].clone() - d[*neg].clone(),
            })
            .collect();
        let mut sol = LpSolution::empty(LpStatus::Unbounded, lp.sense, stats);
        sol.x = to_user(&xs);
        sol.ray = Some(ray);
        return Ok(sol);
    }

    let x = to_user(&xs);
    let mut duals = vec![S::zero(); lp.num_constraints()];
    for (i, row) in rows.iter().enumerate() {
        if let Some(ci) = row.origin {
            let yi = c2[init_col[i]].clone() - tab.obj[init_col[i]].clone();
            let yi = if row.flip { -yi } else { yi };
            duals[ci] = if maximize { -yi } else { yi };
        }
    }
    let mut reduced = lp.objective_dense();
    for (ci, c) in lp.constraints.iter().enumerate() {
        let y = &duals[ci];
        if y.is_zero() {
            continue;
        }
        for (j, a) in &c.coeffs {
            reduced[*j] = reduced[*j].clone() - y.clone() * a.clone();
        }
    }
    let objective = lp.objective_value(&x);

    let sol = LpSolution {
        status: LpStatus::Optimal,
        sense: lp.sense,
        x,
        duals,
        reduced_costs: reduced,
        objective,
        farkas: None,
        ray: None,
        stats,
    };
    let primal_res = super::duality::primal_residual(lp, &sol.x);
    if primal_res > 1e-9 * (1.0 + bnorm) {
        return Err(LpError::Numerical(format!(
            "primal residual {primal_res:e} after {} pivots",
            sol.stats.phase1_pivots + sol.stats.phase2_pivots
        )));
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::super::{strong_duality_check, verify_farkas, VarId};
    use super::*;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn single_variable_max() {
        let mut lp = LinearProgram::<f64>::new(Sense::Maximize);
        let x = lp.add_nonneg("x");
        lp.add_constraint("cap", vec![(x, 1.0)], Relation::Le, 1.0);
        lp.set_objective(vec![(x, 1.0)]);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.x, vec![1.0]);
        assert_eq!(sol.duals, vec![1.0]);
        let rep = strong_duality_check(&lp, &sol);
        assert_eq!(rep.gap, 0.0);
    }

    #[test]
    fn contradictory_bounds_are_infeasible_with_certificate() {
        let mut lp = LinearProgram::<f64>::new(Sense::Maximize);
        let x = lp.add_nonneg("x");
        lp.add_constraint("lo", vec![(x, 1.0)], Relation::Ge, 2.0);
        lp.add_constraint("hi", vec![(x, 1.0)], Relation::Le, 1.0);
        lp.set_objective(vec![(x, 1.0)]);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
        let y = sol.farkas.as_ref().unwrap();
        assert!(verify_farkas(&lp, y) > 0.0);
    }

    #[test]
    fn unbounded_ray_improves_objective() {
        let mut lp = LinearProgram::<f64>::new(Sense::Maximize);
        let x = lp.add_nonneg("x");
        let y = lp.add_nonneg("y");
        lp.add_constraint("c", vec![(x, 1.0), (y, -1.0)], Relation::Le, 1.0);
        lp.set_objective(vec![(x, 1.0), (y, 1.0)]);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Unbounded);
        let ray = sol.ray.unwrap();
        assert!(ray[0] + ray[1] > 0.0);
        assert!(ray[0] - ray[1] <= 1e-12);
        assert!(ray.iter().all(|r| *r >= -1e-12));
    }

    #[test]
    fn transport_two_by_two_identity_coupling() {
        let mut lp = LinearProgram::<f64>::new(Sense::Minimize);
        let cost = [[0.0, 1.0], [1.0, 0.0]];
        let mut v = [[VarId(0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                v[i][j] = lp.add_nonneg(format!("p{i}{j}"));
            }
        }
        for i in 0..2 {
            lp.add_constraint("row", vec![(v[i][0], 1.0), (v[i][1], 1.0)], Relation::Eq, 0.5);
            lp.add_constraint("col", vec![(v[0][i], 1.0), (v[1][i], 1.0)], Relation::Eq, 0.5);
        }
        lp.set_objective(
            (0..2)
                .flat_map(|i| (0..2).map(move |j| (i, j)))
                .map(|(i, j)| (v[i][j], cost[i][j]))
                .collect(),
        );
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!(sol.objective.abs() < 1e-12);
        assert!(strong_duality_check(&lp, &sol).passes(1e-8));
    }

    /// Beale's example cycles under the textbook largest-coefficient rule.
    fn beale<S: Scalar>(f: impl Fn(i64, i64) -> S) -> LinearProgram<S> {
        let mut lp = LinearProgram::<S>::new(Sense::Minimize);
        let x: Vec<VarId> = (4..=7).map(|k| lp.add_nonneg(format!("x{k}"))).collect();
        lp.add_constraint(
            "r1",
            vec![(x[0], f(1, 4)), (x[1], f(-8, 1)), (x[2], f(-1, 1)), (x[3], f(9, 1))],
            Relation::Le,
            f(0, 1),
        );
        lp.add_constraint(
            "r2",
            vec![(x[0], f(1, 2)), (x[1], f(-12, 1)), (x[2], f(-1, 2)), (x[3], f(3, 1))],
            Relation::Le,
            f(0, 1),
        );
        lp.add_constraint("r3", vec![(x[2], f(1, 1))], Relation::Le, f(1, 1));
        lp.set_objective(vec![
            (x[0], f(-3, 4)),
            (x[1], f(20, 1)),
            (x[2], f(-1, 2)),
            (x[3], f(6, 1)),
        ]);
        lp
    }

    #[test]
    fn beale_terminates_under_bland() {
        let lp = beale(|n, d| n as f64 / d as f64);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective + 1.25).abs() < 1e-12);
        assert!(sol.stats.phase2_pivots < 20);

        let exact = beale(q);
        let sol = solve(&exact).unwrap();
        assert_eq!(sol.objective, q(-5, 4));
        let rep = strong_duality_check(&exact, &sol);
        assert_eq!(rep.gap, 0.0);
        assert_eq!(rep.complementarity, 0.0);
    }

    #[test]
    fn free_and_upper_bounded_variables() {
        // min x + y with x free, x >= -3 via a row, y <= 2 upper bounded only
        let mut lp = LinearProgram::<f64>::new(Sense::Minimize);
        let x = lp.add_free("x");
        let y = lp.add_var("y", None, Some(2.0));
        lp.add_constraint("x", vec![(x, 1.0)], Relation::Ge, -3.0);
        lp.add_constraint("y", vec![(y, 1.0)], Relation::Ge, -1.0);
        lp.set_objective(vec![(x, 1.0), (y, 1.0)]);
        let sol = solve(&lp).unwrap();
        assert!((sol.objective + 4.0).abs() < 1e-12);
        assert!(strong_duality_check(&lp, &sol).passes(1e-9));
    }

    #[test]
    fn boxed_variable_duality() {
        let mut lp = LinearProgram::<f64>::new(Sense::Maximize);
        let x = lp.add_var("x", Some(-1.0), Some(3.0));
        let y = lp.add_var("y", Some(0.5), Some(1.0));
        lp.add_constraint("c", vec![(x, 1.0), (y, 2.0)], Relation::Le, 4.0);
        lp.set_objective(vec![(x, 1.0), (y, 1.0)]);
        let sol = solve(&lp).unwrap();
        assert!((sol.objective - 3.5).abs() < 1e-12);
        let rep = strong_duality_check(&lp, &sol);
        assert!(rep.passes(1e-9), "{rep:?}");
    }

    #[test]
    fn redundant_equalities_are_tolerated() {
        let mut lp = LinearProgram::<f64>::new(Sense::Maximize);
        let a = lp.add_nonneg("a");
        let b = lp.add_nonneg("b");
        lp.add_constraint("s", vec![(a, 1.0), (b, 1.0)], Relation::Eq, 1.0);
        lp.add_constraint("s2", vec![(a, 2.0), (b, 2.0)], Relation::Eq, 2.0);
        lp.set_objective(vec![(a, 1.0), (b, 3.0)]);
        let sol = solve(&lp).unwrap();
        assert!((sol.objective - 3.0).abs() < 1e-12);
        assert!(strong_duality_check(&lp, &sol).passes(1e-9));
    }

    #[test]
    fn identical_models_give_identical_bits() {
        let lp = beale(|n, d| n as f64 / d as f64);
        let a = solve(&lp).unwrap();
        let b = solve(&lp).unwrap();
        assert_eq!(a.x, b.x);
        assert_eq!(a.duals, b.duals);
        assert_eq!(a.stats.phase2_pivots, b.stats.phase2_pivots);
    }
}
