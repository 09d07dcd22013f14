//! Strong explanations: every optimum must be favored.
//!
//! The engines are shared with [`crate::weak`]; separation ranges over
//! `𝒳 ∖ 𝒟` only and the cuts carry a unit margin, so that at value `v` no
//! non-favored solution with `ĉᵀy ≤ v` stays feasible.

use crate::ce::{self, CeInstance, MipMinimizer, SolveOptions};
use crate::model::{CeResult, Kind, LowerBound, Mode};
use crate::weak::{lower_bound_in, master_in, CutPool, MasterSolution};
use crate::Result;

/// Lower bound on every strong value-`v'` master with `v' ≥ v`.
pub fn lower_bound_strong(inst: &CeInstance, v: i64) -> Result<LowerBound> {
    let mut pool = CutPool::new();
    let mut cuts = 0;
    Ok(lower_bound_in(&mut MipMinimizer::default(), inst, Kind::Strong, v, &mut pool, &mut cuts)?.0)
}

/// Cheapest `(a, b) ∈ ℋ` under which some favored `x` with `ĉᵀx = v` is
/// feasible and every non-favored `y` with `ĉᵀy ≤ v` is not.
pub fn solve_master_strong(inst: &CeInstance, v: i64, incumbent_cost: Option<i64>) -> Result<Option<MasterSolution>> {
    let mut pool = CutPool::new();
    let mut cuts = 0;
    master_in(&mut MipMinimizer::default(), inst, Kind::Strong, v, &mut pool, incumbent_cost, &mut cuts)
}

pub fn solve_objective_mutable_strong(inst: &CeInstance, options: &SolveOptions<'_>) -> Result<CeResult> {
    ce::require_mode(inst, &[Mode::Objective])?;
    ce::solve(inst, Kind::Strong, options)
}

/// Also serves rhs-only instances, whose `a` boxes are degenerate.
pub fn solve_constraint_mutable_strong(inst: &CeInstance, options: &SolveOptions<'_>) -> Result<CeResult> {
    ce::require_mode(inst, &[Mode::Constraint, Mode::Rhs])?;
    ce::solve(inst, Kind::Strong, options)
}

pub fn solve_all_mutable_strong(inst: &CeInstance, options: &SolveOptions<'_>) -> Result<CeResult> {
    ce::require_mode(inst, &[Mode::All])?;
    ce::solve(inst, Kind::Strong, options)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ce::fixtures::example1;
    use crate::model::{CeStatus, FavoredSpace};

    #[test]
    fn example_constraint_mode() {
        let res = solve_constraint_mutable_strong(&example1(Mode::Constraint), &SolveOptions::default()).unwrap();
        assert_eq!(res.status, CeStatus::Optimal);
        assert_eq!(res.cost, Some(2));
    }

    #[test]
    fn example_lower_bound() {
        assert_eq!(lower_bound_strong(&example1(Mode::Constraint), 2).unwrap(), LowerBound::Value(1));
    }

    #[test]
    fn example_master_at_two() {
        let inst = example1(Mode::Constraint);
        let sol = solve_master_strong(&inst, 2, None).unwrap().unwrap();
        assert_eq!(sol.cost, 2);
        assert_eq!(solve_master_strong(&inst, 2, Some(1)).unwrap(), None);
    }

    #[test]
    fn example_objective_mode() {
        let res = solve_objective_mutable_strong(&example1(Mode::Objective), &SolveOptions::default()).unwrap();
        assert_eq!(res.cost, Some(2));
    }

    #[test]
    fn example_all_mode() {
        let res = solve_all_mutable_strong(&example1(Mode::All), &SolveOptions::default()).unwrap();
        assert_eq!(res.cost, Some(2));
    }

    #[test]
    fn whole_space_favored_costs_nothing() {
        let mut inst = example1(Mode::Objective);
        inst.favored = FavoredSpace::NegativeFix(vec![]);
        let res = solve_objective_mutable_strong(&inst, &SolveOptions::default()).unwrap();
        assert_eq!(res.cost, Some(0));
    }
}
