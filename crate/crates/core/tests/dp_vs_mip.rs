//! The knapsack-cover DP agrees with the MIP and does linear work in `b`.

use cfex_core::dp::{knapsack_cover_dp, predicted_ops, Cover};
use cfex_core::mip::{solve, Comparator, LinExpr, MipModel, Sense};
use proptest::prelude::*;

fn mip_value(c: &[i64], a: &[i64], b: i64, covers: &[Cover]) -> Option<i64> {
    let mut m = MipModel::new();
    let x: Vec<_> = (0..c.len()).map(|j| m.add_var(format!("x{j}"), 0, 1)).collect();
    let expr = |k: &[i64]| {
        let mut e = LinExpr::new();
        for (&v, &k) in x.iter().zip(k) {
            e.add(v, k);
        }
        e
    };
    m.add_constraint(&expr(a), Comparator::Ge, b);
    for cover in covers {
        m.add_constraint(&expr(&cover.q), Comparator::Ge, cover.p);
    }
    m.set_objective(Sense::Minimize, &expr(c));
    solve(&m, None).unwrap().objective
}

fn arb_case() -> impl Strategy<Value = (Vec<i64>, Vec<i64>, i64, Vec<Cover>)> {
    (1usize..=10).prop_flat_map(|n| {
        let cover = (prop::collection::vec(0i64..=2, n), 0i64..=3).prop_map(|(q, p)| Cover { q, p });
        (
            prop::collection::vec(0i64..=20, n),
            prop::collection::vec(0i64..=15, n),
            0i64..=50,
            prop::collection::vec(cover, 0..=2),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn dp_matches_mip((c, a, b, covers) in arb_case()) {
        let dp = knapsack_cover_dp(&c, &a, b, &covers).unwrap();
        prop_assert_eq!(dp.value, mip_value(&c, &a, b, &covers));
        prop_assert_eq!(dp.ops as u128, predicted_ops(c.len(), b, &covers));
    }
}

#[test]
fn work_is_linear_in_b() {
    let c = [3, 5, 4, 7, 2, 6, 1, 8];
    let a = [4, 6, 3, 9, 2, 5, 1, 7];
    let covers = [Cover { q: vec![1, 0, 1, 0, 1, 0, 1, 0], p: 2 }];
    let per_value: Vec<f64> = [5i64, 10, 20, 40]
        .iter()
        .map(|&b| knapsack_cover_dp(&c, &a, b, &covers).unwrap().ops as f64 / (b + 1) as f64)
        .collect();
    for w in per_value.windows(2) {
        assert!(w[1] <= w[0] * 1.0001, "ops per unit of b grew: {per_value:?}");
    }
}
