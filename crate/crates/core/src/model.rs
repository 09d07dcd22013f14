//! Present problem, favored and mutable spaces, distance, and the point checks
//! deciding whether a parameter triple is a weak or strong explanation.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::mip::Comparator;
use crate::{Error, Result};

/// An integer row `coefficientsᵀx ⋈ rhs` over the item variables.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LinearRow {
    pub coefficients: Vec<i64>,
    pub comparator: Comparator,
    pub rhs: i64,
}

impl LinearRow {
    pub fn new(coefficients: Vec<i64>, comparator: Comparator, rhs: i64) -> Self {
        LinearRow { coefficients, comparator, rhs }
    }

    pub fn holds(&self, x: &[u8]) -> bool {
        let lhs: i128 = self.coefficients.iter().zip(x).map(|(&k, &v)| k as i128 * v as i128).sum();
        self.comparator.holds(lhs, self.rhs as i128)
    }
}

/// `min ĉᵀx s.t. âᵀx ≥ b̂, x ∈ 𝒳`, where `𝒳` is `{0,1}ⁿ` cut down by the
/// immutable rows.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PresentProblem {
    pub c: Vec<i64>,
    pub a: Vec<i64>,
    pub b: i64,
    pub rows: Vec<LinearRow>,
}

impl PresentProblem {
    pub fn new(c: Vec<i64>, a: Vec<i64>, b: i64, rows: Vec<LinearRow>) -> Result<Self> {
        let p = PresentProblem { c, a, b, rows };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.c.len();
        if n == 0 {
            return Err(Error::Instance("present problem has no items".into()));
        }
        if self.a.len() != n {
            return Err(Error::Instance(format!("{} weights for {n} items", self.a.len())));
        }
        if let Some(r) = self.rows.iter().find(|r| r.coefficients.len() != n) {
            return Err(Error::Instance(format!(
                "immutable row with {} coefficients for {n} items",
                r.coefficients.len()
            )));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.c.len()
    }

    pub fn params(&self) -> Params {
        Params { c: self.c.clone(), a: self.a.clone(), b: self.b }
    }

    /// Membership in the immutable set `𝒳`.
    pub fn in_domain(&self, x: &[u8]) -> bool {
        x.len() == self.n() && x.iter().all(|&v| v <= 1) && self.rows.iter().all(|r| r.holds(x))
    }
}

/// A parameter triple `(c, a, b)` for the single mutable row.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Params {
    pub c: Vec<i64>,
    pub a: Vec<i64>,
    pub b: i64,
}

impl Params {
    pub fn value(&self, x: &[u8]) -> i64 {
        self.c.iter().zip(x).map(|(&c, &v)| c * v as i64).sum()
    }

    pub fn covers(&self, x: &[u8]) -> bool {
        self.a.iter().zip(x).map(|(&a, &v)| a as i128 * v as i128).sum::<i128>() >= self.b as i128
    }
}

/// The favored solution space `𝒟`.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum FavoredSpace {
    /// `xᵢ = 1` for every listed index.
    PositiveFix(Vec<usize>),
    /// `xᵢ = 0` for every listed index.
    NegativeFix(Vec<usize>),
    /// `αᵀx ≥ β` with nonnegative `α`.
    AtLeast { alpha: Vec<i64>, beta: i64 },
}

impl FavoredSpace {
    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            FavoredSpace::PositiveFix(idx) | FavoredSpace::NegativeFix(idx) => {
                if let Some(i) = idx.iter().find(|&&i| i >= n) {
                    return Err(Error::Instance(format!("favored index {i} out of range for {n} items")));
                }
            }
            FavoredSpace::AtLeast { alpha, .. } => {
                if alpha.len() != n {
                    return Err(Error::Instance(format!("{} favored coefficients for {n} items", alpha.len())));
                }
                if alpha.iter().any(|&k| k < 0) {
                    return Err(Error::Instance("favored coefficients must be nonnegative".into()));
                }
            }
        }
        Ok(())
    }

    pub fn contains(&self, x: &[u8]) -> bool {
        match self {
            FavoredSpace::PositiveFix(idx) => idx.iter().all(|&i| x[i] == 1),
            FavoredSpace::NegativeFix(idx) => idx.iter().all(|&i| x[i] == 0),
            FavoredSpace::AtLeast { alpha, beta } => {
                alpha.iter().zip(x).map(|(&k, &v)| k * v as i64).sum::<i64>() >= *beta
            }
        }
    }

    fn indicator(n: usize, idx: &[usize]) -> Vec<i64> {
        let mut row = vec![0; n];
        for &i in idx {
            row[i] = 1;
        }
        row
    }

    /// Linear description of `𝒟`.
    pub fn constraints(&self, n: usize) -> Vec<LinearRow> {
        match self {
            FavoredSpace::PositiveFix(idx) => {
                idx.iter().map(|&i| LinearRow::new(Self::indicator(n, &[i]), Comparator::Ge, 1)).collect()
            }
            FavoredSpace::NegativeFix(idx) => {
                idx.iter().map(|&i| LinearRow::new(Self::indicator(n, &[i]), Comparator::Le, 0)).collect()
            }
            FavoredSpace::AtLeast { alpha, beta } => {
                vec![LinearRow::new(alpha.clone(), Comparator::Ge, *beta)]
            }
        }
    }

    /// Linear description of `{0,1}ⁿ ∖ 𝒟`.
    pub fn complement_constraints(&self, n: usize) -> Vec<LinearRow> {
        match self {
            FavoredSpace::PositiveFix(idx) => {
                let k = idx.len() as i64;
                vec![LinearRow::new(Self::indicator(n, idx), Comparator::Le, k - 1)]
            }
            FavoredSpace::NegativeFix(idx) => vec![LinearRow::new(Self::indicator(n, idx), Comparator::Ge, 1)],
            FavoredSpace::AtLeast { alpha, beta } => {
                vec![LinearRow::new(alpha.clone(), Comparator::Le, beta - 1)]
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Interval {
    pub lo: i64,
    pub hi: i64,
}

impl Interval {
    pub fn new(lo: i64, hi: i64) -> Self {
        Interval { lo, hi }
    }

    pub fn point(v: i64) -> Self {
        Interval { lo: v, hi: v }
    }

    pub fn contains(&self, v: i64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn len(&self) -> u128 {
        (self.hi as i128 - self.lo as i128 + 1).max(0) as u128
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn magnitude(&self) -> i64 {
        self.lo.abs().max(self.hi.abs())
    }
}

/// Which parameters of the present problem may move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Mode {
    Objective,
    Constraint,
    Rhs,
    All,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Objective => "objective",
            Mode::Constraint => "constraint",
            Mode::Rhs => "rhs",
            Mode::All => "all",
        }
    }

    pub fn c_mutable(self) -> bool {
        matches!(self, Mode::Objective | Mode::All)
    }

    pub fn a_mutable(self) -> bool {
        matches!(self, Mode::Constraint | Mode::All)
    }

    pub fn b_mutable(self) -> bool {
        !matches!(self, Mode::Objective)
    }
}

/// The mutable parameter space `ℋ`: one integer box per coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MutableSpace {
    pub mode: Mode,
    pub c: Vec<Interval>,
    pub a: Vec<Interval>,
    pub b: Interval,
}

impl MutableSpace {
    pub fn new(p: &PresentProblem, mode: Mode, c: Vec<Interval>, a: Vec<Interval>, b: Interval) -> Result<Self> {
        let h = MutableSpace { mode, c, a, b };
        h.validate(p)?;
        Ok(h)
    }

    /// `ℋ = {(ĉ, â, b̂)}`.
    pub fn degenerate(p: &PresentProblem, mode: Mode) -> Self {
        MutableSpace {
            mode,
            c: p.c.iter().map(|&v| Interval::point(v)).collect(),
            a: p.a.iter().map(|&v| Interval::point(v)).collect(),
            b: Interval::point(p.b),
        }
    }

    pub fn validate(&self, p: &PresentProblem) -> Result<()> {
        let n = p.n();
        if self.c.len() != n || self.a.len() != n {
            return Err(Error::Instance("mutable boxes do not match the item count".into()));
        }
        let check = |what: &str, i: Option<usize>, box_: &Interval, present: i64, mutable: bool| {
            let at = i.map_or(String::new(), |i| format!("[{i}]"));
            if box_.is_empty() {
                return Err(Error::Instance(format!("empty box for {what}{at}")));
            }
            if box_.magnitude() > crate::mip::MAX_BOUND {
                return Err(Error::Instance(format!("box for {what}{at} is unbounded")));
            }
            if !box_.contains(present) {
                return Err(Error::Instance(format!("box for {what}{at} excludes the present value {present}")));
            }
            if !mutable && !box_.is_point() {
                return Err(Error::Instance(format!(
                    "{what}{at} is immutable in {} mode but has a nondegenerate box",
                    self.mode.name()
                )));
            }
            Ok(())
        };
        use alloc::string::String;
        for (i, (bx, &v)) in self.c.iter().zip(&p.c).enumerate() {
            check("c", Some(i), bx, v, self.mode.c_mutable())?;
        }
        for (i, (bx, &v)) in self.a.iter().zip(&p.a).enumerate() {
            check("a", Some(i), bx, v, self.mode.a_mutable())?;
        }
        check("b", None, &self.b, p.b, self.mode.b_mutable())
    }

    pub fn contains(&self, params: &Params) -> bool {
        self.c.iter().zip(&params.c).all(|(bx, &v)| bx.contains(v))
            && self.a.iter().zip(&params.a).all(|(bx, &v)| bx.contains(v))
            && self.b.contains(params.b)
    }

    /// Number of parameter triples in `ℋ` (saturating).
    pub fn grid_size(&self) -> u128 {
        self.c
            .iter()
            .chain(&self.a)
            .chain(core::iter::once(&self.b))
            .fold(1u128, |acc, bx| acc.saturating_mul(bx.len()))
    }

    pub fn a_max(&self) -> Vec<i64> {
        self.a.iter().map(|bx| bx.hi).collect()
    }

    pub fn b_min(&self) -> i64 {
        self.b.lo
    }
}

/// Weighted ℓ1 distance to the present parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Distance {
    pub c: Vec<i64>,
    pub a: Vec<i64>,
    pub b: i64,
}

impl Distance {
    pub fn unit(n: usize) -> Self {
        Distance { c: vec![1; n], a: vec![1; n], b: 1 }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.c.len() != n || self.a.len() != n {
            return Err(Error::Instance("distance weights do not match the item count".into()));
        }
        if self.c.iter().chain(&self.a).any(|&w| w < 0) || self.b < 0 {
            return Err(Error::Instance("distance weights must be nonnegative".into()));
        }
        Ok(())
    }

    pub fn cost(&self, params: &Params, present: &Params) -> i64 {
        let dev = |w: &[i64], x: &[i64], y: &[i64]| -> i64 {
            w.iter().zip(x.iter().zip(y)).map(|(&w, (&x, &y))| w * (x - y).abs()).sum()
        };
        dev(&self.c, &params.c, &present.c)
            + dev(&self.a, &params.a, &present.a)
            + self.b * (params.b - present.b).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Kind {
    Weak,
    Strong,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Weak => "weak",
            Kind::Strong => "strong",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CeStatus {
    Optimal,
    Infeasible,
    BudgetExceeded,
}

/// A value-sweep lower bound; `Infinite` when the bounding problem is infeasible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum LowerBound {
    Value(i64),
    Infinite,
}

impl LowerBound {
    pub fn reaches(self, cost: Option<i64>) -> bool {
        match (self, cost) {
            (LowerBound::Infinite, _) => true,
            (LowerBound::Value(_), None) => false,
            (LowerBound::Value(lb), Some(d)) => lb >= d,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TracePoint {
    pub v: i64,
    pub incumbent: Option<i64>,
    pub lower_bound: Option<LowerBound>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolveStats {
    /// Values `v` for which a master problem was solved.
    pub values_examined: u64,
    /// `(c̲, c̄)` of the value sweep, when one was run.
    pub value_range: Option<(i64, i64)>,
    pub cuts_master: u64,
    pub cuts_lower_bound: u64,
    pub subproblem_solves: u64,
    pub mip_nodes: u64,
    pub wall_ms: u64,
    pub lower_bound_enabled: bool,
    pub trace: Vec<TracePoint>,
}

impl SolveStats {
    pub fn cuts(&self) -> u64 {
        self.cuts_master + self.cuts_lower_bound
    }

    /// `|𝒞| = c̄ − c̲ + 1`.
    pub fn range_size(&self) -> u64 {
        self.value_range.map_or(0, |(lo, hi)| (hi - lo + 1).max(0) as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CeResult {
    pub kind: Kind,
    pub mode: Mode,
    pub status: CeStatus,
    pub params: Option<Params>,
    pub cost: Option<i64>,
    /// A favored solution that is optimal under `params`.
    pub witness: Option<Vec<u8>>,
    pub stats: SolveStats,
}

impl CeResult {
    pub fn is_optimal(&self) -> bool {
        self.status == CeStatus::Optimal
    }
}

/// Which part of `𝒳` a restricted minimization ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    All,
    Favored,
    Complement,
}

/// Solves `min cᵀx s.t. aᵀx ≥ b, x ∈ 𝒳 ∩ region`, returning the value and a
/// minimizer.
pub trait Minimizer {
    fn minimize(
        &mut self,
        p: &PresentProblem,
        favored: &FavoredSpace,
        params: &Params,
        region: Region,
    ) -> Result<Option<(i64, Vec<u8>)>>;
}

/// Exhaustive enumeration of `{0,1}ⁿ`; ties go to the first point in
/// increasing bitmask order.
#[derive(Debug, Clone, Copy, Default)]
pub struct Enumeration;

pub const ENUMERATION_MAX_ITEMS: usize = 24;

impl Minimizer for Enumeration {
    fn minimize(
        &mut self,
        p: &PresentProblem,
        favored: &FavoredSpace,
        params: &Params,
        region: Region,
    ) -> Result<Option<(i64, Vec<u8>)>> {
        let n = p.n();
        if n > ENUMERATION_MAX_ITEMS {
            return Err(Error::CeilingExceeded { size: 1u128 << n, ceiling: 1u128 << ENUMERATION_MAX_ITEMS });
        }
        let mut best: Option<(i64, Vec<u8>)> = None;
        let mut x = vec![0u8; n];
        for mask in 0u64..(1u64 << n) {
            for (i, xi) in x.iter_mut().enumerate() {
                *xi = ((mask >> i) & 1) as u8;
            }
            if !p.in_domain(&x) || !params.covers(&x) {
                continue;
            }
            let keep = match region {
                Region::All => true,
                Region::Favored => favored.contains(&x),
                Region::Complement => !favored.contains(&x),
            };
            if !keep {
                continue;
            }
            let v = params.value(&x);
            if best.as_ref().is_none_or(|(b, _)| v < *b) {
                best = Some((v, x.clone()));
            }
        }
        Ok(best)
    }
}

/// Outcome of a point check; the witness is the favored minimizer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub holds: bool,
    pub witness: Option<Vec<u8>>,
}

/// Weak condition: `min_{𝒳} cᵀx = min_{𝒳∩𝒟} cᵀx` under `aᵀx ≥ b`.
pub fn check_weak_with(
    solver: &mut impl Minimizer,
    p: &PresentProblem,
    favored: &FavoredSpace,
    params: &Params,
) -> Result<Check> {
    let Some((all, _)) = solver.minimize(p, favored, params, Region::All)? else {
        return Ok(Check { holds: false, witness: None });
    };
    let Some((fav, witness)) = solver.minimize(p, favored, params, Region::Favored)? else {
        return Ok(Check { holds: false, witness: None });
    };
    Ok(Check { holds: all == fav, witness: Some(witness) })
}

/// Strong condition: the weak condition plus every feasible non-favored
/// solution being at least one unit worse.
pub fn check_strong_with(
    solver: &mut impl Minimizer,
    p: &PresentProblem,
    favored: &FavoredSpace,
    params: &Params,
) -> Result<Check> {
    let weak = check_weak_with(solver, p, favored, params)?;
    if !weak.holds {
        return Ok(weak);
    }
    let (fav, _) = solver.minimize(p, favored, params, Region::Favored)?.expect("favored minimum exists");
    let holds = match solver.minimize(p, favored, params, Region::Complement)? {
        None => true,
        Some((other, _)) => fav <= other - 1,
    };
    Ok(Check { holds, witness: weak.witness })
}

pub fn check_with(
    solver: &mut impl Minimizer,
    kind: Kind,
    p: &PresentProblem,
    favored: &FavoredSpace,
    params: &Params,
) -> Result<Check> {
    match kind {
        Kind::Weak => check_weak_with(solver, p, favored, params),
        Kind::Strong => check_strong_with(solver, p, favored, params),
    }
}

/// [`check_weak_with`] on the exact MIP solver.
pub fn check_weak(p: &PresentProblem, favored: &FavoredSpace, params: &Params) -> Result<Check> {
    check_weak_with(&mut crate::ce::MipMinimizer::default(), p, favored, params)
}

/// [`check_strong_with`] on the exact MIP solver.
pub fn check_strong(p: &PresentProblem, favored: &FavoredSpace, params: &Params) -> Result<Check> {
    check_strong_with(&mut crate::ce::MipMinimizer::default(), p, favored, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn example1() -> (PresentProblem, FavoredSpace) {
        let p = PresentProblem::new(vec![1, 2, 2], vec![1, 3, 2], 3, vec![]).unwrap();
        (p, FavoredSpace::PositiveFix(vec![2]))
    }

    fn with_a(p: &PresentProblem, a2: i64, a3: i64) -> Params {
        Params { c: p.c.clone(), a: vec![1, a2, a3], b: 3 }
    }

    #[test]
    fn present_point_is_not_weak() {
        let (p, d) = example1();
        let check = check_weak(&p, &d, &p.params()).unwrap();
        assert!(!check.holds);
    }

    #[test]
    fn tie_point_is_weak_not_strong() {
        let (p, d) = example1();
        let params = with_a(&p, 3, 3);
        let weak = check_weak(&p, &d, &params).unwrap();
        assert!(weak.holds);
        assert_eq!(weak.witness, Some(vec![0, 0, 1]));
        assert!(!check_strong(&p, &d, &params).unwrap().holds);
    }

    #[test]
    fn strong_point() {
        let (p, d) = example1();
        let params = with_a(&p, 2, 3);
        assert!(check_strong(&p, &d, &params).unwrap().holds);
    }

    #[test]
    fn vacuous_favored_space() {
        let (p, _) = example1();
        let all = FavoredSpace::PositiveFix(vec![]);
        assert!(check_weak(&p, &all, &p.params()).unwrap().holds);
        assert!(check_strong(&p, &all, &p.params()).unwrap().holds);
    }

    #[test]
    fn infeasible_parameters_are_not_explanations() {
        let (p, d) = example1();
        let params = Params { c: p.c.clone(), a: vec![1, 0, 1], b: 3 };
        assert!(!check_weak(&p, &d, &params).unwrap().holds);
    }

    #[test]
    fn complement_rows() {
        let n = 4;
        let cases = [
            FavoredSpace::PositiveFix(vec![0, 2]),
            FavoredSpace::NegativeFix(vec![1, 3]),
            FavoredSpace::AtLeast { alpha: vec![1, 0, 2, 1], beta: 2 },
        ];
        for d in cases {
            for mask in 0..16u8 {
                let x: Vec<u8> = (0..n).map(|i| (mask >> i) & 1).collect();
                let inside = d.constraints(n).iter().all(|r| r.holds(&x));
                let outside = d.complement_constraints(n).iter().all(|r| r.holds(&x));
                assert_eq!(inside, d.contains(&x));
                assert_eq!(outside, !d.contains(&x));
            }
        }
    }

    #[test]
    fn mutable_space_must_contain_present() {
        let (p, _) = example1();
        let a = vec![Interval::point(1), Interval::new(0, 4), Interval::new(3, 4)];
        let c = p.c.iter().map(|&v| Interval::point(v)).collect();
        assert!(MutableSpace::new(&p, Mode::Constraint, c, a, Interval::point(3)).is_err());
    }

    #[test]
    fn immutable_components_must_be_degenerate() {
        let (p, _) = example1();
        let a = vec![Interval::point(1), Interval::new(0, 4), Interval::new(0, 4)];
        let c = p.c.iter().map(|&v| Interval::point(v)).collect();
        assert!(MutableSpace::new(&p, Mode::Objective, c, a, Interval::point(3)).is_err());
    }

    #[test]
    fn distance_is_weighted_l1() {
        let present = Params { c: vec![1, 2], a: vec![3, 4], b: 5 };
        let moved = Params { c: vec![0, 2], a: vec![3, 7], b: 3 };
        let d = Distance { c: vec![2, 1], a: vec![1, 1], b: 3 };
        assert_eq!(d.cost(&moved, &present), 2 + 3 + 6);
        assert_eq!(d.cost(&present, &present), 0);
    }
}
