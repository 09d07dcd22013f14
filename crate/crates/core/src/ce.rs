//! Shared machinery for the explanation engines: the instance bundle, solve
//! options, MIP-backed minimization and the top-level dispatcher.

use alloc::format;
use alloc::vec::Vec;

use crate::mip::{self, add_product, Comparator, Limits, LinExpr, MipModel, MipSolution, Sense, VarId};
use crate::model::{
    check_with, CeResult, CeStatus, Distance, FavoredSpace, Interval, Kind, LinearRow, Minimizer, Mode, MutableSpace,
    Params, PresentProblem, Region, SolveStats,
};
use crate::{Error, Result};

/// Everything a counterfactual query needs besides the kind.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CeInstance {
    pub present: PresentProblem,
    pub favored: FavoredSpace,
    pub mutable: MutableSpace,
    pub distance: Distance,
}

impl CeInstance {
    pub fn new(
        present: PresentProblem,
        favored: FavoredSpace,
        mutable: MutableSpace,
        distance: Distance,
    ) -> Result<Self> {
        let inst = CeInstance { present, favored, mutable, distance };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        self.present.validate()?;
        let n = self.present.n();
        self.favored.validate(n)?;
        self.mutable.validate(&self.present)?;
        self.distance.validate(n)
    }

    pub fn mode(&self) -> Mode {
        self.mutable.mode
    }
}

#[derive(Clone, Copy)]
pub struct SolveOptions<'a> {
    pub limits: Limits<'a>,
    /// Use the value-sweep lower bound for early termination.
    pub lower_bound: bool,
    /// Evaluate right-hand-side candidates with the knapsack DP when the
    /// instance allows it.
    pub rhs_dp: bool,
}

impl Default for SolveOptions<'_> {
    fn default() -> Self {
        SolveOptions { limits: Limits::default(), lower_bound: true, rhs_dp: true }
    }
}

/// Exact minimization through [`mip::solve_with`], counting solves and nodes.
#[derive(Clone, Copy, Default)]
pub struct MipMinimizer<'a> {
    pub limits: Limits<'a>,
    pub solves: u64,
    pub nodes: u64,
}

impl<'a> MipMinimizer<'a> {
    pub fn new(limits: Limits<'a>) -> Self {
        MipMinimizer { limits, solves: 0, nodes: 0 }
    }

    pub fn solve(&mut self, model: &MipModel, cutoff: Option<i64>) -> Result<MipSolution> {
        self.solves += 1;
        let sol = mip::solve_with(model, cutoff, &self.limits)?;
        self.nodes += sol.nodes;
        log::trace!(
            "mip: {} vars, {} rows, {} nodes, objective {:?}",
            model.num_vars(),
            model.constraints.len(),
            sol.nodes,
            sol.objective
        );
        Ok(sol)
    }

    /// `max ãᵀy s.t. ĉᵀy ≤ threshold, y ∈ 𝒳 ∩ region`.
    pub(crate) fn knapsack(
        &mut self,
        p: &PresentProblem,
        favored: &FavoredSpace,
        a: &[i64],
        threshold: i64,
        region: Region,
    ) -> Result<Option<(i64, Vec<u8>)>> {
        let mut m = MipModel::new();
        let ys = add_items(&mut m, p, favored, region, "y");
        m.add_constraint(&weighted(&ys, &p.c), Comparator::Le, threshold);
        m.set_objective(Sense::Maximize, &weighted(&ys, a));
        let sol = self.solve(&m, None)?;
        Ok(sol.objective.map(|v| (v, bits(&sol, &ys))))
    }
}

impl Minimizer for MipMinimizer<'_> {
    fn minimize(
        &mut self,
        p: &PresentProblem,
        favored: &FavoredSpace,
        params: &Params,
        region: Region,
    ) -> Result<Option<(i64, Vec<u8>)>> {
        let mut m = MipModel::new();
        let xs = add_items(&mut m, p, favored, region, "x");
        m.add_constraint(&weighted(&xs, &params.a), Comparator::Ge, params.b);
        m.set_objective(Sense::Minimize, &weighted(&xs, &params.c));
        let sol = self.solve(&m, None)?;
        Ok(sol.objective.map(|v| (v, bits(&sol, &xs))))
    }
}

pub(crate) fn weighted(vars: &[VarId], coefficients: &[i64]) -> LinExpr {
    let mut e = LinExpr::new();
    for (&v, &k) in vars.iter().zip(coefficients) {
        if k != 0 {
            e.add(v, k);
        }
    }
    e
}

pub(crate) fn add_rows(m: &mut MipModel, vars: &[VarId], rows: &[LinearRow]) {
    for r in rows {
        m.add_constraint(&weighted(vars, &r.coefficients), r.comparator, r.rhs);
    }
}

/// Adds one binary per item, restricted to `𝒳 ∩ region`.
pub(crate) fn add_items(
    m: &mut MipModel,
    p: &PresentProblem,
    favored: &FavoredSpace,
    region: Region,
    prefix: &str,
) -> Vec<VarId> {
    let n = p.n();
    let vars: Vec<VarId> = (0..n).map(|i| m.add_binary(format!("{prefix}{i}"))).collect();
    add_rows(m, &vars, &p.rows);
    match (region, favored) {
        (Region::All, _) => {}
        (Region::Favored, FavoredSpace::PositiveFix(idx)) => idx.iter().for_each(|&i| m.set_bounds(vars[i], 1, 1)),
        (Region::Favored, FavoredSpace::NegativeFix(idx)) => idx.iter().for_each(|&i| m.set_bounds(vars[i], 0, 0)),
        (Region::Favored, d) => add_rows(m, &vars, &d.constraints(n)),
        (Region::Complement, d) => add_rows(m, &vars, &d.complement_constraints(n)),
    }
    vars
}

pub(crate) fn bits(sol: &MipSolution, vars: &[VarId]) -> Vec<u8> {
    vars.iter().map(|&v| sol.value(v) as u8).collect()
}

/// A mutable coefficient in a master problem: either a variable or a constant.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Coef {
    Fixed(i64),
    Var(VarId),
}

impl Coef {
    pub(crate) fn new(m: &mut MipModel, name: &str, bx: &Interval) -> Self {
        if bx.is_point() {
            Coef::Fixed(bx.lo)
        } else {
            Coef::Var(m.add_var(name, bx.lo, bx.hi))
        }
    }

    pub(crate) fn add_to(self, e: &mut LinExpr, multiplier: i64) {
        match self {
            Coef::Fixed(k) => e.constant += k * multiplier,
            Coef::Var(v) => e.add(v, multiplier),
        }
    }

    /// Expression equal to `coef · x` for binary `x`.
    pub(crate) fn times(self, m: &mut MipModel, x: VarId) -> Result<LinExpr> {
        Ok(match self {
            Coef::Fixed(k) => LinExpr::new().term(x, k),
            Coef::Var(v) => LinExpr::new().term(add_product(m, v, x)?, 1),
        })
    }

    pub(crate) fn value(self, sol: &MipSolution) -> i64 {
        match self {
            Coef::Fixed(k) => k,
            Coef::Var(v) => sol.value(v),
        }
    }
}

/// Master-problem variables for `(c, a, b)`.
pub(crate) struct ParamVars {
    pub c: Vec<Coef>,
    pub a: Vec<Coef>,
    pub b: Coef,
}

impl ParamVars {
    pub(crate) fn new(m: &mut MipModel, h: &MutableSpace) -> Self {
        let c = h.c.iter().enumerate().map(|(i, bx)| Coef::new(m, &format!("c{i}"), bx)).collect();
        let a = h.a.iter().enumerate().map(|(i, bx)| Coef::new(m, &format!("a{i}"), bx)).collect();
        let b = Coef::new(m, "b", &h.b);
        ParamVars { c, a, b }
    }

    /// `Σ wᶜ|c−ĉ| + Σ wᵃ|a−â| + wᵇ|b−b̂|` over the variable coefficients.
    pub(crate) fn distance(&self, m: &mut MipModel, present: &Params, dist: &Distance) -> Result<LinExpr> {
        let mut vars = Vec::new();
        let mut centers = Vec::new();
        let mut weights = Vec::new();
        let mut push = |coef: Coef, center: i64, weight: i64| {
            if let Coef::Var(v) = coef {
                vars.push(v);
                centers.push(center);
                weights.push(weight);
            }
        };
        for i in 0..present.c.len() {
            push(self.c[i], present.c[i], dist.c[i]);
        }
        for i in 0..present.a.len() {
            push(self.a[i], present.a[i], dist.a[i]);
        }
        push(self.b, present.b, dist.b);
        mip::l1_objective(m, &vars, &centers, &weights)
    }

    pub(crate) fn values(&self, sol: &MipSolution) -> Params {
        Params {
            c: self.c.iter().map(|k| k.value(sol)).collect(),
            a: self.a.iter().map(|k| k.value(sol)).collect(),
            b: self.b.value(sol),
        }
    }

    /// `aᵀy − b` as an expression, for a fixed `y`.
    pub(crate) fn slack_at(&self, y: &[u8]) -> LinExpr {
        let mut e = LinExpr::new();
        for (k, &yi) in self.a.iter().zip(y) {
            if yi == 1 {
                k.add_to(&mut e, 1);
            }
        }
        self.b.add_to(&mut e, -1);
        e
    }

    /// `cᵀy` as an expression, for a fixed `y`.
    pub(crate) fn value_at(&self, y: &[u8]) -> LinExpr {
        let mut e = LinExpr::new();
        for (k, &yi) in self.c.iter().zip(y) {
            if yi == 1 {
                k.add_to(&mut e, 1);
            }
        }
        e
    }
}

/// The best explanation found so far.
#[derive(Debug, Clone)]
pub(crate) struct Incumbent {
    pub params: Params,
    pub cost: i64,
    pub witness: Option<Vec<u8>>,
}

/// Mutable state of one solve, kept outside the engines so that a budget
/// error still reports the incumbent.
pub(crate) struct Run<'a> {
    pub mip: MipMinimizer<'a>,
    pub stats: SolveStats,
    pub best: Option<Incumbent>,
    pub options: SolveOptions<'a>,
}

impl<'a> Run<'a> {
    pub(crate) fn new(options: &SolveOptions<'a>) -> Self {
        let stats = SolveStats { lower_bound_enabled: options.lower_bound, ..SolveStats::default() };
        Run { mip: MipMinimizer::new(options.limits), stats, best: None, options: *options }
    }

    pub(crate) fn best_cost(&self) -> Option<i64> {
        self.best.as_ref().map(|b| b.cost)
    }

    pub(crate) fn offer(&mut self, params: Params, cost: i64, witness: Option<Vec<u8>>) {
        if self.best_cost().is_none_or(|d| cost < d) {
            log::debug!("incumbent cost {cost}");
            self.best = Some(Incumbent { params, cost, witness });
        }
    }
}

/// Solves `inst` for the given kind, dispatching on the mutability mode.
pub fn solve(inst: &CeInstance, kind: Kind, options: &SolveOptions<'_>) -> Result<CeResult> {
    inst.validate()?;
    #[cfg(feature = "std")]
    let started = std::time::Instant::now();
    let mut run = Run::new(options);
    let outcome = run_engine(&mut run, inst, kind);
    #[cfg(feature = "std")]
    {
        run.stats.wall_ms = started.elapsed().as_millis() as u64;
    }
    #[cfg(not(feature = "std"))]
    {
        run.stats.wall_ms = options.limits.elapsed_ms();
    }
    let status = match outcome {
        Ok(()) => {
            if run.best.is_some() {
                CeStatus::Optimal
            } else {
                CeStatus::Infeasible
            }
        }
        Err(e) if e.is_budget() => {
            log::info!("{e}");
            CeStatus::BudgetExceeded
        }
        Err(e) => return Err(e),
    };
    run.stats.subproblem_solves = run.mip.solves;
    run.stats.mip_nodes = run.mip.nodes;
    let (params, cost, witness) = match run.best {
        Some(b) => (Some(b.params), Some(b.cost), b.witness),
        None => (None, None, None),
    };
    Ok(CeResult { kind, mode: inst.mode(), status, params, cost, witness, stats: run.stats })
}

fn run_engine(run: &mut Run<'_>, inst: &CeInstance, kind: Kind) -> Result<()> {
    let present = inst.present.params();
    let pre = check_with(&mut run.mip, kind, &inst.present, &inst.favored, &present)?;
    if pre.holds {
        run.offer(present, 0, pre.witness);
        return Ok(());
    }
    match (inst.mode(), kind) {
        (Mode::Objective, _) => crate::weak::objective_engine(run, inst, kind)?,
        (Mode::Constraint, _) | (Mode::Rhs, Kind::Strong) => crate::weak::sweep_engine(run, inst, kind)?,
        (Mode::Rhs, Kind::Weak) => crate::weak::rhs_engine(run, inst)?,
        (Mode::All, _) => crate::weak::all_engine(run, inst, kind)?,
    }
    finalize(run, inst, kind)
}

/// Re-checks the incumbent and replaces its witness by a favored optimum when
/// the engine's witness is not one.
fn finalize(run: &mut Run<'_>, inst: &CeInstance, kind: Kind) -> Result<()> {
    let Some(best) = run.best.as_mut() else {
        return Ok(());
    };
    let check = check_with(&mut run.mip, kind, &inst.present, &inst.favored, &best.params)?;
    if !check.holds {
        return Err(Error::Model(format!("{} explanation failed its final check", kind.name())));
    }
    let optimum = check.witness.as_ref().map(|w| best.params.value(w));
    let keep = best.witness.as_ref().is_some_and(|w| {
        inst.favored.contains(w)
            && inst.present.in_domain(w)
            && best.params.covers(w)
            && Some(best.params.value(w)) == optimum
    });
    if !keep {
        best.witness = check.witness;
    }
    Ok(())
}

pub(crate) fn require_mode(inst: &CeInstance, modes: &[Mode]) -> Result<()> {
    if modes.contains(&inst.mode()) {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("this engine does not handle {} mode", inst.mode().name())))
    }
}

/// Big-M for the value row: dominates any `|cᵀx − cᵀy|` over the box.
pub(crate) fn objective_big_m(h: &MutableSpace) -> i64 {
    1 + h.c.iter().map(Interval::magnitude).sum::<i64>()
}

/// Big-M for the feasibility rows: dominates any `|aᵀy − b|` over the box.
pub(crate) fn feasibility_big_m(h: &MutableSpace) -> i64 {
    1 + h.a.iter().map(Interval::magnitude).sum::<i64>() + h.b.magnitude()
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// `min x1+2x2+2x3 s.t. x1+3x2+2x3 ≥ 3` with `x3` favored.
    pub fn example1(mode: Mode) -> CeInstance {
        let p = PresentProblem::new(vec![1, 2, 2], vec![1, 3, 2], 3, vec![]).unwrap();
        let point = |v: &[i64]| v.iter().map(|&k| Interval::point(k)).collect::<Vec<_>>();
        let (c, a) = match mode {
            Mode::Objective => (p.c.iter().map(|&k| Interval::new(k - 2, k + 2)).collect(), point(&p.a)),
            _ => (point(&p.c), vec![Interval::point(1), Interval::new(0, 4), Interval::new(0, 4)]),
        };
        let h = MutableSpace { mode, c, a, b: Interval::point(3) };
        CeInstance::new(p, FavoredSpace::PositiveFix(vec![2]), h, Distance::unit(3)).unwrap()
    }
}
