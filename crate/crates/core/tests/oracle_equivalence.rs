//! Every engine against exhaustive classification of the parameter grid.

use cfex_core::instances::{random_instance, RandomShape};
use cfex_core::oracle::{enumerate, optimal_cost};
use cfex_core::{check_strong, check_weak, solve, CeStatus, Kind, Mode, SolveOptions};

fn agree(seed: u64, mode: Mode, n: usize, side_row: bool) {
    let shape = RandomShape { n, mode, max_grid: 20_000, side_row };
    let inst = random_instance(seed, shape).unwrap();
    let map = enumerate(&inst.present, &inst.favored, &inst.mutable).unwrap();
    for kind in [Kind::Weak, Kind::Strong] {
        let res = solve(&inst, kind, &SolveOptions::default()).unwrap();
        let expected = optimal_cost(&map, &inst.distance, kind);
        assert_eq!(res.cost, expected, "seed {seed} {mode:?} {kind:?}\n{inst:#?}");
        match res.status {
            CeStatus::Optimal => {
                let params = res.params.unwrap();
                assert!(inst.mutable.contains(&params));
                assert_eq!(inst.distance.cost(&params, &inst.present.params()), res.cost.unwrap());
                let check = match kind {
                    Kind::Weak => check_weak(&inst.present, &inst.favored, &params),
                    Kind::Strong => check_strong(&inst.present, &inst.favored, &params),
                }
                .unwrap();
                assert!(check.holds);
                let witness = res.witness.unwrap();
                assert!(inst.favored.contains(&witness) && params.covers(&witness));
                assert_eq!(Some(params.value(&witness)), map.get(&params).unwrap().optimum);
            }
            CeStatus::Infeasible => assert_eq!(expected, None),
            CeStatus::BudgetExceeded => panic!("budget exceeded without limits"),
        }
    }
}

#[test]
fn objective_mode() {
    for seed in 0..60 {
        agree(seed, Mode::Objective, 3 + seed as usize % 6, seed % 3 == 0);
    }
}

#[test]
fn constraint_mode() {
    for seed in 0..60 {
        agree(seed, Mode::Constraint, 3 + seed as usize % 6, seed % 3 == 0);
    }
}

#[test]
fn rhs_mode() {
    for seed in 0..60 {
        agree(seed, Mode::Rhs, 3 + seed as usize % 6, seed % 3 == 0);
    }
}

#[test]
fn all_mode() {
    for seed in 0..60 {
        agree(seed, Mode::All, 2 + seed as usize % 4, seed % 3 == 0);
    }
}
