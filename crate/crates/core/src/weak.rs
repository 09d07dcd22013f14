//! Constraint-generation engines for optimal explanations.
//!
//! Every engine is parameterized by [`Kind`]; the strong variants differ only
//! in the cut margin and in restricting separation to the complement of `𝒟`.
//! The public functions here are the weak entry points, [`crate::strong`]
//! holds their strong counterparts.

use alloc::vec::Vec;

use crate::ce::{
    self, add_items, bits, feasibility_big_m, objective_big_m, weighted, CeInstance, MipMinimizer, ParamVars, Run,
    SolveOptions,
};
use crate::dp::{self, Cover};
use crate::mip::{Comparator, LinExpr, MipModel, Sense};
use crate::model::{
    check_weak_with, CeResult, FavoredSpace, Interval, Kind, LowerBound, Mode, Params, Region, TracePoint,
};
use crate::Result;

/// Separated solutions `𝒴`, each with its present objective value `ĉᵀy`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CutPool {
    cuts: Vec<(Vec<u8>, i64)>,
}

impl CutPool {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    pub fn contains(&self, y: &[u8]) -> bool {
        self.cuts.iter().any(|(z, _)| z == y)
    }

    /// Returns `false` (and stores nothing) for a duplicate.
    pub fn insert(&mut self, y: Vec<u8>, value: i64) -> bool {
        if self.contains(&y) {
            return false;
        }
        self.cuts.push((y, value));
        true
    }

    /// Stored solutions with `ĉᵀy ≤ threshold`.
    pub fn up_to(&self, threshold: i64) -> impl Iterator<Item = &[u8]> {
        self.cuts.iter().filter(move |(_, v)| *v <= threshold).map(|(y, _)| y.as_slice())
    }
}

/// The candidate optimal values `c̲..=c̄` of the value sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValueRange {
    pub c_lo: i64,
    pub c_hi: i64,
}

impl ValueRange {
    pub fn len(&self) -> u64 {
        (self.c_hi - self.c_lo + 1).max(0) as u64
    }

    pub fn is_empty(&self) -> bool {
        self.c_hi < self.c_lo
    }
}

/// A solution of the value-`v` master problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MasterSolution {
    pub params: Params,
    pub cost: i64,
    pub witness: Vec<u8>,
}

/// Cuts at value `v` exclude solutions with `ĉᵀy` up to this.
fn threshold(kind: Kind, v: i64) -> i64 {
    match kind {
        Kind::Weak => v - 1,
        Kind::Strong => v,
    }
}

fn separation_region(kind: Kind) -> Region {
    match kind {
        Kind::Weak => Region::All,
        Kind::Strong => Region::Complement,
    }
}

/// `c̲`/`c̄`: extreme present objective values over favored solutions that
/// can be feasible for some `(a, b) ∈ ℋ`. `None` when there are none.
pub fn value_range(inst: &CeInstance) -> Result<Option<ValueRange>> {
    value_range_in(&mut MipMinimizer::default(), inst)
}

fn value_range_in(mip: &mut MipMinimizer<'_>, inst: &CeInstance) -> Result<Option<ValueRange>> {
    let (p, h) = (&inst.present, &inst.mutable);
    let mut m = MipModel::new();
    let xs = add_items(&mut m, p, &inst.favored, Region::Favored, "x");
    m.add_constraint(&weighted(&xs, &h.a_max()), Comparator::Ge, h.b_min());
    let value = weighted(&xs, &p.c);
    m.set_objective(Sense::Minimize, &value);
    let Some(c_lo) = mip.solve(&m, None)?.objective else {
        return Ok(None);
    };
    m.set_objective(Sense::Maximize, &value);
    let c_hi = mip.solve(&m, None)?.objective.expect("feasible when minimizable");
    Ok(Some(ValueRange { c_lo, c_hi }))
}

/// Lower bound on every value-`v'` master with `v' ≥ v`.
pub fn lower_bound(inst: &CeInstance, v: i64) -> Result<LowerBound> {
    let mut pool = CutPool::new();
    let mut cuts = 0;
    Ok(lower_bound_in(&mut MipMinimizer::default(), inst, Kind::Weak, v, &mut pool, &mut cuts)?.0)
}

pub(crate) fn lower_bound_in(
    mip: &mut MipMinimizer<'_>,
    inst: &CeInstance,
    kind: Kind,
    v: i64,
    pool: &mut CutPool,
    cuts: &mut u64,
) -> Result<(LowerBound, Option<Params>)> {
    let (p, h) = (&inst.present, &inst.mutable);
    let thr = threshold(kind, v);
    let mut m = MipModel::new();
    let pv = ParamVars::new(&mut m, h);
    let objective = pv.distance(&mut m, &p.params(), &inst.distance)?;
    m.set_objective(Sense::Minimize, &objective);
    for y in pool.up_to(thr) {
        m.add_constraint(&pv.slack_at(y), Comparator::Le, -1);
    }
    loop {
        let sol = mip.solve(&m, None)?;
        let Some(cost) = sol.objective else {
            return Ok((LowerBound::Infinite, None));
        };
        let params = pv.values(&sol);
        match mip.knapsack(p, &inst.favored, &params.a, thr, separation_region(kind))? {
            Some((best, y)) if best >= params.b => {
                let value = params_value(&p.c, &y);
                if !pool.insert(y.clone(), value) {
                    debug_assert!(false, "separation repeated a stored cut");
                    return Ok((LowerBound::Value(cost), Some(params)));
                }
                *cuts += 1;
                m.add_constraint(&pv.slack_at(&y), Comparator::Le, -1);
            }
            _ => return Ok((LowerBound::Value(cost), Some(params))),
        }
    }
}

fn params_value(c: &[i64], y: &[u8]) -> i64 {
    c.iter().zip(y).map(|(&c, &v)| c * v as i64).sum()
}

/// Cheapest `(a, b) ∈ ℋ` making some favored `x` with `ĉᵀx = v` optimal,
/// restricted to cost at most `incumbent_cost − 1` when given.
pub fn solve_master(inst: &CeInstance, v: i64, incumbent_cost: Option<i64>) -> Result<Option<MasterSolution>> {
    let mut pool = CutPool::new();
    let mut cuts = 0;
    master_in(&mut MipMinimizer::default(), inst, Kind::Weak, v, &mut pool, incumbent_cost, &mut cuts)
}

pub(crate) fn master_in(
    mip: &mut MipMinimizer<'_>,
    inst: &CeInstance,
    kind: Kind,
    v: i64,
    pool: &mut CutPool,
    incumbent_cost: Option<i64>,
    cuts: &mut u64,
) -> Result<Option<MasterSolution>> {
    let (p, h) = (&inst.present, &inst.mutable);
    let thr = threshold(kind, v);
    let mut m = MipModel::new();
    let pv = ParamVars::new(&mut m, h);
    let xs = add_items(&mut m, p, &inst.favored, Region::Favored, "x");
    m.add_constraint(&weighted(&xs, &p.c), Comparator::Eq, v);
    let mut cover = LinExpr::new();
    for (k, &x) in pv.a.iter().zip(&xs) {
        cover.extend(&k.times(&mut m, x)?);
    }
    pv.b.add_to(&mut cover, -1);
    m.add_constraint(&cover, Comparator::Ge, 0);
    for y in pool.up_to(thr) {
        m.add_constraint(&pv.slack_at(y), Comparator::Le, -1);
    }
    let objective = pv.distance(&mut m, &p.params(), &inst.distance)?;
    m.set_objective(Sense::Minimize, &objective);
    let cutoff = incumbent_cost.map(|d| d - 1);
    loop {
        let sol = mip.solve(&m, cutoff)?;
        let Some(cost) = sol.objective else {
            return Ok(None);
        };
        let params = pv.values(&sol);
        let witness = bits(&sol, &xs);
        match mip.knapsack(p, &inst.favored, &params.a, thr, separation_region(kind))? {
            Some((best, y)) if best >= params.b => {
                let value = params_value(&p.c, &y);
                if !pool.insert(y.clone(), value) {
                    debug_assert!(false, "separation repeated a stored cut");
                    return Ok(Some(MasterSolution { params, cost, witness }));
                }
                *cuts += 1;
                m.add_constraint(&pv.slack_at(&y), Comparator::Le, -1);
            }
            _ => return Ok(Some(MasterSolution { params, cost, witness })),
        }
    }
}

/// A favored `x` with `ĉᵀx = v` that is feasible under `params`.
fn favored_at_value(mip: &mut MipMinimizer<'_>, inst: &CeInstance, v: i64, params: &Params) -> Result<Option<Vec<u8>>> {
    let mut m = MipModel::new();
    let xs = add_items(&mut m, &inst.present, &inst.favored, Region::Favored, "x");
    m.add_constraint(&weighted(&xs, &inst.present.c), Comparator::Eq, v);
    m.add_constraint(&weighted(&xs, &params.a), Comparator::Ge, params.b);
    let sol = mip.solve(&m, None)?;
    Ok(sol.is_optimal().then(|| bits(&sol, &xs)))
}

/// The value sweep over `v = c̲..=c̄` for constraint (and strong rhs) mode.
pub(crate) fn sweep_engine(run: &mut Run<'_>, inst: &CeInstance, kind: Kind) -> Result<()> {
    let Some(range) = value_range_in(&mut run.mip, inst)? else {
        return Ok(());
    };
    run.stats.value_range = Some((range.c_lo, range.c_hi));
    let mut pool = CutPool::new();
    for v in range.c_lo..=range.c_hi {
        let mut bound = None;
        if run.options.lower_bound {
            let (lb, lb_params) =
                lower_bound_in(&mut run.mip, inst, kind, v, &mut pool, &mut run.stats.cuts_lower_bound)?;
            bound = Some(lb);
            if lb.reaches(run.best_cost()) {
                log::debug!("v={v}: lower bound {lb:?} closes the sweep");
                run.stats.trace.push(TracePoint { v, incumbent: run.best_cost(), lower_bound: bound });
                break;
            }
            // The bounding solution is already a master optimum if some
            // favored solution attains v under it.
            if let (LowerBound::Value(cost), Some(params)) = (lb, lb_params) {
                if let Some(x) = favored_at_value(&mut run.mip, inst, v, &params)? {
                    run.offer(params, cost, Some(x));
                    run.stats.values_examined += 1;
                    run.stats.trace.push(TracePoint { v, incumbent: run.best_cost(), lower_bound: bound });
                    continue;
                }
            }
        }
        let best = run.best_cost();
        if let Some(sol) = master_in(&mut run.mip, inst, kind, v, &mut pool, best, &mut run.stats.cuts_master)? {
            log::debug!("v={v}: master cost {}", sol.cost);
            run.offer(sol.params, sol.cost, Some(sol.witness));
        }
        run.stats.values_examined += 1;
        run.stats.trace.push(TracePoint { v, incumbent: run.best_cost(), lower_bound: bound });
    }
    Ok(())
}

pub(crate) fn objective_engine(run: &mut Run<'_>, inst: &CeInstance, kind: Kind) -> Result<()> {
    generation_engine(run, inst, kind, false)
}

pub(crate) fn all_engine(run: &mut Run<'_>, inst: &CeInstance, kind: Kind) -> Result<()> {
    generation_engine(run, inst, kind, true)
}

/// Master/separation loop over `(c, a, b)` jointly. Without `indicators`,
/// `(a, b)` must be fixed so that every separated `y` is feasible.
fn generation_engine(run: &mut Run<'_>, inst: &CeInstance, kind: Kind, indicators: bool) -> Result<()> {
    let (p, h) = (&inst.present, &inst.mutable);
    let margin = match kind {
        Kind::Weak => 0,
        Kind::Strong => -1,
    };
    let (m_obj, m_feas) = (objective_big_m(h), feasibility_big_m(h));
    let mut m = MipModel::new();
    let pv = ParamVars::new(&mut m, h);
    let xs = add_items(&mut m, p, &inst.favored, Region::Favored, "x");
    let mut cover = LinExpr::new();
    let mut value = LinExpr::new();
    for i in 0..xs.len() {
        cover.extend(&pv.a[i].times(&mut m, xs[i])?);
        value.extend(&pv.c[i].times(&mut m, xs[i])?);
    }
    pv.b.add_to(&mut cover, -1);
    m.add_constraint(&cover, Comparator::Ge, 0);
    let objective = pv.distance(&mut m, &p.params(), &inst.distance)?;
    m.set_objective(Sense::Minimize, &objective);
    let mut pool = CutPool::new();
    loop {
        let sol = run.mip.solve(&m, None)?;
        let Some(cost) = sol.objective else {
            return Ok(());
        };
        let params = pv.values(&sol);
        let x = bits(&sol, &xs);
        let current = params.value(&x);
        let sep = crate::model::Minimizer::minimize(&mut run.mip, p, &inst.favored, &params, separation_region(kind))?;
        let violated = match &sep {
            None => false,
            Some((other, _)) => match kind {
                Kind::Weak => *other < current,
                Kind::Strong => *other <= current,
            },
        };
        if !violated {
            run.offer(params, cost, Some(x));
            return Ok(());
        }
        let (_, y) = sep.expect("violated implies a separated solution");
        if !pool.insert(y.clone(), p.params().value(&y)) {
            debug_assert!(false, "separation repeated a stored cut");
            run.offer(params, cost, Some(x));
            return Ok(());
        }
        run.stats.cuts_master += 1;
        let mut row = value.clone();
        row.extend(&negated(&pv.value_at(&y)));
        if indicators {
            let z = m.add_binary(alloc::format!("z{}", pool.len()));
            row.add(z, -m_obj);
            m.add_constraint(&row, Comparator::Le, margin);
            let slack = pv.slack_at(&y).term(z, m_feas);
            m.add_constraint(&slack, Comparator::Ge, 0);
            m.add_constraint(&slack, Comparator::Le, m_feas - 1);
        } else {
            m.add_constraint(&row, Comparator::Le, margin);
        }
    }
}

fn negated(e: &LinExpr) -> LinExpr {
    LinExpr { terms: e.terms.iter().map(|&(v, k)| (v, -k)).collect(), constant: -e.constant }
}

/// Right-hand sides of `box_` ordered by distance to `center`, smaller first
/// on ties.
pub fn rhs_order(box_: Interval, center: i64) -> impl Iterator<Item = i64> {
    let reach = (center - box_.lo).max(box_.hi - center).max(0);
    (0..=reach).flat_map(move |d| {
        let below = (d > 0).then_some(center - d);
        let above = Some(center + d);
        below.into_iter().chain(above).filter(move |&b| box_.contains(b))
    })
}

/// Evaluates weak-check minima with the knapsack DP, when the instance has
/// the required shape.
struct DpEvaluator {
    c: Vec<i64>,
    a: Vec<i64>,
    favored: Vec<Cover>,
}

/// DP work above which a candidate is handed to the MIP instead.
const DP_MAX_OPS: u128 = 50_000_000;

impl DpEvaluator {
    fn new(inst: &CeInstance) -> Option<Self> {
        let p = &inst.present;
        if !p.rows.is_empty() || p.a.iter().any(|&a| a < 0) {
            return None;
        }
        let n = p.n();
        let keep: Vec<bool> = match &inst.favored {
            FavoredSpace::NegativeFix(idx) => (0..n).map(|i| !idx.contains(&i)).collect(),
            _ => alloc::vec![true; n],
        };
        let pick = |v: &[i64]| v.iter().zip(&keep).filter(|(_, &k)| k).map(|(&x, _)| x).collect::<Vec<_>>();
        let favored = match &inst.favored {
            FavoredSpace::PositiveFix(idx) => {
                let mut q = alloc::vec![0; n];
                idx.iter().for_each(|&i| q[i] = 1);
                alloc::vec![Cover { q, p: idx.len() as i64 }]
            }
            FavoredSpace::NegativeFix(_) => Vec::new(),
            FavoredSpace::AtLeast { alpha, beta } => alloc::vec![Cover { q: alpha.clone(), p: *beta }],
        };
        let favored = favored.into_iter().map(|c| Cover { q: pick(&c.q), p: c.p }).collect();
        Some(DpEvaluator { c: pick(&p.c), a: pick(&p.a), favored })
    }

    fn affordable(&self, b: i64) -> bool {
        dp::predicted_ops(self.c.len(), b, &self.favored) <= DP_MAX_OPS
            && dp::predicted_ops(self.c.len(), b, &[]) <= DP_MAX_OPS
    }

    /// `(min over 𝒳, min over 𝒳 ∩ 𝒟)` at right-hand side `b`.
    fn minima(&self, full: &[i64], full_a: &[i64], b: i64) -> Result<(Option<i64>, Option<i64>)> {
        let all = dp::knapsack_cover_dp(full, full_a, b, &[])?.value;
        let fav = dp::knapsack_cover_dp(&self.c, &self.a, b, &self.favored)?.value;
        Ok((all, fav))
    }
}

/// Weak rhs-only explanations by visiting `b` in order of distance.
pub(crate) fn rhs_engine(run: &mut Run<'_>, inst: &CeInstance) -> Result<()> {
    let p = &inst.present;
    let evaluator = if run.options.rhs_dp { DpEvaluator::new(inst) } else { None };
    for b in rhs_order(inst.mutable.b, p.b) {
        run.options.limits.check_time()?;
        run.stats.values_examined += 1;
        let params = Params { c: p.c.clone(), a: p.a.clone(), b };
        let holds = match evaluator.as_ref().filter(|e| e.affordable(b)) {
            Some(e) => match e.minima(&p.c, &p.a, b)? {
                (Some(all), Some(fav)) => all == fav,
                _ => false,
            },
            None => check_weak_with(&mut run.mip, p, &inst.favored, &params)?.holds,
        };
        if holds {
            let cost = inst.distance.b * (b - p.b).abs();
            run.offer(params, cost, None);
            return Ok(());
        }
    }
    Ok(())
}

pub fn solve_objective_mutable(inst: &CeInstance, options: &SolveOptions<'_>) -> Result<CeResult> {
    ce::require_mode(inst, &[Mode::Objective])?;
    ce::solve(inst, Kind::Weak, options)
}

pub fn solve_constraint_mutable(inst: &CeInstance, options: &SolveOptions<'_>) -> Result<CeResult> {
    ce::require_mode(inst, &[Mode::Constraint])?;
    ce::solve(inst, Kind::Weak, options)
}

pub fn solve_rhs_enumeration(inst: &CeInstance, options: &SolveOptions<'_>) -> Result<CeResult> {
    ce::require_mode(inst, &[Mode::Rhs])?;
    ce::solve(inst, Kind::Weak, options)
}

pub fn solve_all_mutable(inst: &CeInstance, options: &SolveOptions<'_>) -> Result<CeResult> {
    ce::require_mode(inst, &[Mode::All])?;
    ce::solve(inst, Kind::Weak, options)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ce::fixtures::example1;
    use crate::model::{CeStatus, Distance, MutableSpace, PresentProblem};

    #[test]
    fn example_constraint_mode() {
        let res = solve_constraint_mutable(&example1(Mode::Constraint), &SolveOptions::default()).unwrap();
        assert_eq!(res.status, CeStatus::Optimal);
        assert_eq!(res.cost, Some(1));
        let params = res.params.unwrap();
        assert!(params.a == vec![1, 3, 3] || params.a == vec![1, 2, 2]);
        assert_eq!(res.stats.value_range, Some((2, 5)));
    }

    #[test]
    fn example_value_range() {
        let range = value_range(&example1(Mode::Constraint)).unwrap().unwrap();
        assert_eq!((range.c_lo, range.c_hi), (2, 5));
        assert_eq!(range.len(), 4);
    }

    #[test]
    fn example_lower_bound_at_range_start() {
        assert_eq!(lower_bound(&example1(Mode::Constraint), 2).unwrap(), LowerBound::Value(0));
    }

    #[test]
    fn example_master_at_two() {
        let sol = solve_master(&example1(Mode::Constraint), 2, None).unwrap().unwrap();
        assert_eq!(sol.cost, 1);
        assert_eq!(sol.witness, vec![0, 0, 1]);
    }

    #[test]
    fn zero_cutoff_blocks_every_master() {
        let inst = example1(Mode::Constraint);
        for v in 2..=5 {
            assert_eq!(solve_master(&inst, v, Some(0)).unwrap(), None);
        }
    }

    #[test]
    fn example_objective_mode() {
        let res = solve_objective_mutable(&example1(Mode::Objective), &SolveOptions::default()).unwrap();
        assert_eq!(res.cost, Some(1));
    }

    #[test]
    fn objective_mode_without_room_is_infeasible() {
        let mut inst = example1(Mode::Objective);
        inst.mutable = MutableSpace::degenerate(&inst.present, Mode::Objective);
        let res = solve_objective_mutable(&inst, &SolveOptions::default()).unwrap();
        assert_eq!(res.status, CeStatus::Infeasible);
    }

    #[test]
    fn example_all_mode_matches_constraint_mode() {
        let res = solve_all_mutable(&example1(Mode::All), &SolveOptions::default()).unwrap();
        assert_eq!(res.cost, Some(1));
    }

    fn rhs_instance() -> CeInstance {
        let p = PresentProblem::new(vec![1, 2], vec![2, 3], 2, vec![]).unwrap();
        let mut h = MutableSpace::degenerate(&p, Mode::Rhs);
        h.b = Interval::new(0, 5);
        CeInstance::new(p, FavoredSpace::PositiveFix(vec![1]), h, Distance::unit(2)).unwrap()
    }

    #[test]
    fn rhs_enumeration_example() {
        for rhs_dp in [true, false] {
            let options = SolveOptions { rhs_dp, ..SolveOptions::default() };
            let res = solve_rhs_enumeration(&rhs_instance(), &options).unwrap();
            assert_eq!(res.cost, Some(1));
            assert_eq!(res.params.unwrap().b, 3);
            assert_eq!(res.witness, Some(vec![0, 1]));
        }
    }

    #[test]
    fn rhs_order_prefers_smaller_on_ties() {
        let order: Vec<i64> = rhs_order(Interval::new(0, 5), 2).collect();
        assert_eq!(order, vec![2, 1, 3, 0, 4, 5]);
    }

    #[test]
    fn degenerate_space_without_explanation() {
        let mut inst = example1(Mode::Constraint);
        inst.mutable = MutableSpace::degenerate(&inst.present, Mode::Constraint);
        let res = solve_constraint_mutable(&inst, &SolveOptions::default()).unwrap();
        assert_eq!(res.status, CeStatus::Infeasible);
        assert_eq!(res.cost, None);
    }

    #[test]
    fn wrong_mode_is_rejected() {
        assert!(solve_objective_mutable(&example1(Mode::Constraint), &SolveOptions::default()).is_err());
    }

    #[test]
    fn sweep_without_lower_bound_agrees() {
        let options = SolveOptions { lower_bound: false, ..SolveOptions::default() };
        let res = solve_constraint_mutable(&example1(Mode::Constraint), &options).unwrap();
        assert_eq!(res.cost, Some(1));
        assert_eq!(res.stats.values_examined, 4);
    }
}
