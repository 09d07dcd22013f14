//! The all-mutable engine reduces to the specialised engines when `ℋ` only
//! varies the parameters they handle.

use cfex_core::instances::{random_instance, RandomShape};
use cfex_core::model::MutableSpace;
use cfex_core::strong::{solve_all_mutable_strong, solve_constraint_mutable_strong, solve_objective_mutable_strong};
use cfex_core::weak::{solve_all_mutable, solve_constraint_mutable, solve_objective_mutable};
use cfex_core::{CeInstance, Interval, Mode, SolveOptions};

fn retagged(inst: &CeInstance, mode: Mode) -> CeInstance {
    let h = MutableSpace { mode, ..inst.mutable.clone() };
    CeInstance::new(inst.present.clone(), inst.favored.clone(), h, inst.distance.clone()).unwrap()
}

fn shape(seed: u64, mode: Mode) -> RandomShape {
    RandomShape { n: 3 + (seed % 4) as usize, mode, max_grid: 5_000, side_row: seed % 3 == 0 }
}

#[test]
fn constraint_boxes_only() {
    let opts = SolveOptions::default();
    for seed in 0..50 {
        let mut inst = random_instance(seed, shape(seed, Mode::Constraint)).unwrap();
        let b = inst.present.b;
        inst.mutable.b = Interval::new((b - 1).max(0), b + 1);
        let all = retagged(&inst, Mode::All);
        let weak = solve_constraint_mutable(&inst, &opts).unwrap();
        assert_eq!(solve_all_mutable(&all, &opts).unwrap().cost, weak.cost, "seed {seed} weak");
        let strong = solve_constraint_mutable_strong(&inst, &opts).unwrap();
        assert_eq!(solve_all_mutable_strong(&all, &opts).unwrap().cost, strong.cost, "seed {seed} strong");
    }
}

#[test]
fn objective_boxes_only() {
    let opts = SolveOptions::default();
    for seed in 0..50 {
        let inst = random_instance(seed, shape(seed, Mode::Objective)).unwrap();
        let all = retagged(&inst, Mode::All);
        let weak = solve_objective_mutable(&inst, &opts).unwrap();
        assert_eq!(solve_all_mutable(&all, &opts).unwrap().cost, weak.cost, "seed {seed} weak");
        let strong = solve_objective_mutable_strong(&inst, &opts).unwrap();
        assert_eq!(solve_all_mutable_strong(&all, &opts).unwrap().cost, strong.cost, "seed {seed} strong");
    }
}
