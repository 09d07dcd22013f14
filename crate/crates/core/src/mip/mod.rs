//! Exact solver for small bounded-integer linear programs.
//!
//! All model data are integers. The search is a depth-first branch and bound
//! whose node relaxations are solved by a dense bounded dual simplex in
//! floating point; the float solution is only used as a *hint*. Every pruning
//! decision is justified by an exactly evaluated Lagrangian bound (or Farkas
//! certificate) computed in `i128` from the simplex multipliers, and every
//! incumbent is re-checked exactly. Numerical trouble can therefore only cost
//! extra nodes, never a wrong answer.
//!
//! Branching picks the most fractional 0/1 variable, falling back to the most
//! fractional general integer once all binaries are integral (lowest index on
//! ties).

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

mod bnb;
mod bound;
mod lp;

/// Largest magnitude accepted for a variable bound. Anything beyond is treated
/// as unbounded and rejected.
pub const MAX_BOUND: i64 = 1 << 40;

/// Default node ceiling for a single solve.
pub const DEFAULT_NODE_LIMIT: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Comparator {
    Le,
    Ge,
    Eq,
}

impl Comparator {
    pub fn holds(self, lhs: i128, rhs: i128) -> bool {
        match self {
            Comparator::Le => lhs <= rhs,
            Comparator::Ge => lhs >= rhs,
            Comparator::Eq => lhs == rhs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub lower: i64,
    pub upper: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    /// Dense row, one entry per variable.
    pub coefficients: Vec<i64>,
    pub comparator: Comparator,
    pub rhs: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Objective {
    pub coefficients: Vec<i64>,
    pub constant: i64,
    pub sense: Sense,
}

/// Sparse linear expression `Σ coef·var + constant`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinExpr {
    pub terms: Vec<(VarId, i64)>,
    pub constant: i64,
}

impl LinExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn term(mut self, var: VarId, coef: i64) -> Self {
        self.terms.push((var, coef));
        self
    }

    pub fn add(&mut self, var: VarId, coef: i64) {
        self.terms.push((var, coef));
    }

    pub fn extend(&mut self, other: &LinExpr) {
        self.terms.extend_from_slice(&other.terms);
        self.constant += other.constant;
    }

    pub fn evaluate(&self, assignment: &[i64]) -> i128 {
        self.terms.iter().map(|&(v, k)| k as i128 * assignment[v.0] as i128).sum::<i128>() + self.constant as i128
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MipModel {
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub objective: Objective,
}

impl Default for MipModel {
    fn default() -> Self {
        Self::new()
    }
}

impl MipModel {
    pub fn new() -> Self {
        MipModel {
            variables: Vec::new(),
            constraints: Vec::new(),
            objective: Objective { coefficients: Vec::new(), constant: 0, sense: Sense::Minimize },
        }
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: i64, upper: i64) -> VarId {
        let id = VarId(self.variables.len());
        self.variables.push(Variable { name: name.into(), lower, upper });
        for row in &mut self.constraints {
            row.coefficients.push(0);
        }
        self.objective.coefficients.push(0);
        id
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> VarId {
        self.add_var(name, 0, 1)
    }

    pub fn add_constraint(&mut self, expr: &LinExpr, comparator: Comparator, rhs: i64) {
        let mut coefficients = vec![0i64; self.variables.len()];
        for &(v, k) in &expr.terms {
            coefficients[v.0] += k;
        }
        self.constraints.push(Constraint { coefficients, comparator, rhs: rhs - expr.constant });
    }

    pub fn set_objective(&mut self, sense: Sense, expr: &LinExpr) {
        let mut coefficients = vec![0i64; self.variables.len()];
        for &(v, k) in &expr.terms {
            coefficients[v.0] += k;
        }
        self.objective = Objective { coefficients, constant: expr.constant, sense };
    }

    pub fn set_bounds(&mut self, var: VarId, lower: i64, upper: i64) {
        let v = &mut self.variables[var.0];
        v.lower = lower;
        v.upper = upper;
    }

    /// Checks the structural invariants: finite, ordered bounds and one
    /// coefficient per variable in every row.
    pub fn validate(&self) -> Result<()> {
        let n = self.variables.len();
        for (j, v) in self.variables.iter().enumerate() {
            if v.lower.abs() > MAX_BOUND || v.upper.abs() > MAX_BOUND {
                return Err(Error::Model(format!("variable {j} ({}) is unbounded", v.name)));
            }
        }
        if self.objective.coefficients.len() != n {
            return Err(Error::Model(format!(
                "objective has {} coefficients for {n} variables",
                self.objective.coefficients.len()
            )));
        }
        for (i, row) in self.constraints.iter().enumerate() {
            if row.coefficients.len() != n {
                return Err(Error::Model(format!(
                    "constraint {i} has {} coefficients for {n} variables",
                    row.coefficients.len()
                )));
            }
        }
        Ok(())
    }

    /// Exact feasibility test of an integer assignment.
    pub fn is_feasible(&self, x: &[i64]) -> bool {
        if x.len() != self.variables.len() {
            return false;
        }
        let in_bounds = self.variables.iter().zip(x).all(|(v, &xj)| v.lower <= xj && xj <= v.upper);
        in_bounds
            && self.constraints.iter().all(|row| {
                let lhs: i128 = row.coefficients.iter().zip(x).map(|(&k, &xj)| k as i128 * xj as i128).sum();
                row.comparator.holds(lhs, row.rhs as i128)
            })
    }

    pub fn objective_value(&self, x: &[i64]) -> i128 {
        self.objective.coefficients.iter().zip(x).map(|(&k, &xj)| k as i128 * xj as i128).sum::<i128>()
            + self.objective.constant as i128
    }
}

/// Adds `w = a·x` for a bounded integer `a` and binary `x` through the four
/// envelope rows
///
/// ```text
/// w ≤ hi·x    w ≥ lo·x    w ≤ a − lo·(1−x)    w ≥ a − hi·(1−x)
/// ```
///
/// which are exact for integral `(a, x)`.
pub fn add_product(model: &mut MipModel, a_var: VarId, x_var: VarId) -> Result<VarId> {
    let a = model.variables.get(a_var.0).ok_or_else(|| Error::Model("unknown factor".into()))?;
    let x = model.variables.get(x_var.0).ok_or_else(|| Error::Model("unknown factor".into()))?;
    if a.lower.abs() > MAX_BOUND || a.upper.abs() > MAX_BOUND || a.lower > a.upper {
        return Err(Error::Model(format!("product factor {} is unbounded", a.name)));
    }
    if x.lower < 0 || x.upper > 1 {
        return Err(Error::Model(format!("product factor {} is not binary", x.name)));
    }
    let (lo, hi) = (a.lower, a.upper);
    let name = format!("{}*{}", a.name, x.name);
    let w = model.add_var(name, lo.min(0), hi.max(0));
    // w - hi x <= 0
    model.add_constraint(&LinExpr::new().term(w, 1).term(x_var, -hi), Comparator::Le, 0);
    // w - lo x >= 0
    model.add_constraint(&LinExpr::new().term(w, 1).term(x_var, -lo), Comparator::Ge, 0);
    // w - a - lo x <= -lo
    model.add_constraint(&LinExpr::new().term(w, 1).term(a_var, -1).term(x_var, -lo), Comparator::Le, -lo);
    // w - a - hi x >= -hi
    model.add_constraint(&LinExpr::new().term(w, 1).term(a_var, -1).term(x_var, -hi), Comparator::Ge, -hi);
    Ok(w)
}

/// Builds `Σ weightᵢ·|varᵢ − centerᵢ|` through split deviations
/// `varᵢ − centerᵢ = d⁺ᵢ − d⁻ᵢ`. The returned expression equals the weighted
/// ℓ1 distance at any minimizer.
///
/// Coordinates whose variable is fixed at its center contribute nothing and
/// get no split variables.
pub fn l1_objective(model: &mut MipModel, vars: &[VarId], centers: &[i64], weights: &[i64]) -> Result<LinExpr> {
    if vars.len() != centers.len() || vars.len() != weights.len() {
        return Err(Error::Model("l1 objective: length mismatch".into()));
    }
    let mut expr = LinExpr::new();
    for ((&v, &center), &weight) in vars.iter().zip(centers).zip(weights) {
        if weight < 0 {
            return Err(Error::Model(format!("negative distance weight {weight}")));
        }
        let var = &model.variables[v.0];
        let (lo, hi) = (var.lower, var.upper);
        if lo == hi && lo == center {
            continue;
        }
        let name = var.name.clone();
        let plus = model.add_var(format!("{name}+"), 0, (hi - center).max(0));
        let minus = model.add_var(format!("{name}-"), 0, (center - lo).max(0));
        model.add_constraint(&LinExpr::new().term(v, 1).term(plus, -1).term(minus, 1), Comparator::Eq, center);
        expr.add(plus, weight);
        expr.add(minus, weight);
    }
    Ok(expr)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum MipStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MipSolution {
    pub status: MipStatus,
    pub assignment: Option<Vec<i64>>,
    /// Objective value in the model's own sense.
    pub objective: Option<i64>,
    pub nodes: u64,
}

impl MipSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == MipStatus::Optimal
    }

    pub fn value(&self, var: VarId) -> i64 {
        self.assignment.as_ref().expect("no assignment")[var.0]
    }
}

/// Source of wall-clock deadlines. The core crate has no clock of its own.
pub trait Stopwatch {
    fn expired(&self) -> bool;
    fn elapsed_ms(&self) -> u64;
}

#[cfg(feature = "std")]
#[derive(Debug, Clone, Copy)]
pub struct Deadline {
    start: std::time::Instant,
    limit: Option<std::time::Duration>,
}

#[cfg(feature = "std")]
impl Deadline {
    pub fn new(limit: Option<std::time::Duration>) -> Self {
        Deadline { start: std::time::Instant::now(), limit }
    }

    pub fn unlimited() -> Self {
        Self::new(None)
    }
}

#[cfg(feature = "std")]
impl Stopwatch for Deadline {
    fn expired(&self) -> bool {
        self.limit.is_some_and(|l| self.start.elapsed() >= l)
    }

    fn elapsed_ms(&self) -> u64 {
        self.start.elapsed().as_millis() as u64
    }
}

#[derive(Clone, Copy)]
pub struct Limits<'a> {
    pub node_limit: u64,
    pub stopwatch: Option<&'a dyn Stopwatch>,
}

impl Default for Limits<'_> {
    fn default() -> Self {
        Limits { node_limit: DEFAULT_NODE_LIMIT, stopwatch: None }
    }
}

impl<'a> Limits<'a> {
    pub fn with_stopwatch(stopwatch: &'a dyn Stopwatch) -> Self {
        Limits { node_limit: DEFAULT_NODE_LIMIT, stopwatch: Some(stopwatch) }
    }

    pub(crate) fn check_time(&self) -> Result<()> {
        match self.stopwatch {
            Some(s) if s.expired() => Err(Error::BudgetExceeded("wall-clock limit".into())),
            _ => Ok(()),
        }
    }

    pub fn elapsed_ms(&self) -> u64 {
        self.stopwatch.map_or(0, |s| s.elapsed_ms())
    }
}

/// Solves `model` to proven optimality.
///
/// With a `cutoff`, only solutions at least as good as the cutoff are of
/// interest: `Infeasible` then means "nothing feasible reaches the cutoff".
pub fn solve(model: &MipModel, cutoff: Option<i64>) -> Result<MipSolution> {
    solve_with(model, cutoff, &Limits::default())
}

pub fn solve_with(model: &MipModel, cutoff: Option<i64>, limits: &Limits<'_>) -> Result<MipSolution> {
    model.validate()?;
    limits.check_time()?;
    bnb::branch_and_bound(model, cutoff, limits)
}
