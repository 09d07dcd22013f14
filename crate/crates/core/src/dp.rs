//! Pseudopolynomial DP for `min cᵀx s.t. aᵀx ≥ b, qᵢᵀx ≥ pᵢ, x ∈ {0,1}ⁿ`
//! with nonnegative `a` and `qᵢ`.
//!
//! States are the covered amounts clamped at their demands, so the table has
//! `(b+1)·Π(pᵢ+1)` cells and each item touches every cell once.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::model::PresentProblem;
use crate::{Error, Result};

/// A covering side constraint `qᵀx ≥ p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cover {
    pub q: Vec<i64>,
    pub p: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DpOutcome {
    /// `None` when no selection meets every demand.
    pub value: Option<i64>,
    /// Cell updates performed.
    pub ops: u64,
}

/// Cell updates [`knapsack_cover_dp`] will perform.
pub fn predicted_ops(n: usize, b: i64, covers: &[Cover]) -> u128 {
    covers.iter().fold(n as u128 * (b.max(0) as u128 + 1), |acc, c| acc.saturating_mul(c.p.max(0) as u128 + 1))
}

/// DP over the present objective and weights of `p` (which must have no
/// immutable rows) at right-hand side `b`.
pub fn dp_restricted_min(p: &PresentProblem, covers: &[Cover], b: i64) -> Result<DpOutcome> {
    if !p.rows.is_empty() {
        return Err(Error::Unsupported("the DP does not handle immutable rows".into()));
    }
    knapsack_cover_dp(&p.c, &p.a, b, covers)
}

pub fn knapsack_cover_dp(c: &[i64], a: &[i64], b: i64, covers: &[Cover]) -> Result<DpOutcome> {
    let n = c.len();
    if a.len() != n || covers.iter().any(|k| k.q.len() != n) {
        return Err(Error::Instance(format!("DP input lengths differ from {n} items")));
    }
    if a.iter().chain(covers.iter().flat_map(|k| &k.q)).any(|&v| v < 0) {
        return Err(Error::Unsupported("the DP requires nonnegative coefficients".into()));
    }
    // dims[0] is the main demand, then one per cover.
    let caps: Vec<i64> = core::iter::once(b.max(0)).chain(covers.iter().map(|k| k.p.max(0))).collect();
    let mut strides = vec![1usize; caps.len()];
    for d in 1..caps.len() {
        strides[d] = strides[d - 1] * (caps[d - 1] as usize + 1);
    }
    let size = strides[caps.len() - 1] * (caps[caps.len() - 1] as usize + 1);
    const NONE: i64 = i64::MAX;
    let mut cur = vec![NONE; size];
    cur[0] = 0;
    let mut next = cur.clone();
    let mut coords = vec![0i64; caps.len()];
    let mut ops: u64 = 0;
    for i in 0..n {
        let gains: Vec<i64> = core::iter::once(a[i]).chain(covers.iter().map(|k| k.q[i])).collect();
        next.copy_from_slice(&cur);
        coords.iter_mut().for_each(|v| *v = 0);
        for &value in &cur {
            ops += 1;
            if value != NONE {
                let t: usize = coords
                    .iter()
                    .zip(&gains)
                    .zip(caps.iter().zip(&strides))
                    .map(|((&at, &g), (&cap, &stride))| (at + g).min(cap) as usize * stride)
                    .sum();
                let cand = value + c[i];
                if cand < next[t] {
                    next[t] = cand;
                }
            }
            // Advance the mixed-radix coordinates to the next cell.
            for (v, &cap) in coords.iter_mut().zip(&caps) {
                if *v < cap {
                    *v += 1;
                    break;
                }
                *v = 0;
            }
        }
        core::mem::swap(&mut cur, &mut next);
    }
    let value = cur[size - 1];
    Ok(DpOutcome { value: (value != NONE).then_some(value), ops })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example1() -> PresentProblem {
        PresentProblem::new(vec![1, 2, 2], vec![1, 3, 2], 3, vec![]).unwrap()
    }

    #[test]
    fn example_optimum() {
        let out = dp_restricted_min(&example1(), &[], 3).unwrap();
        assert_eq!(out.value, Some(2));
        assert_eq!(out.ops, 3 * 4);
    }

    #[test]
    fn restricted_to_favored() {
        let cover = Cover { q: vec![0, 0, 1], p: 1 };
        assert_eq!(dp_restricted_min(&example1(), &[cover], 3).unwrap().value, Some(3));
    }

    #[test]
    fn zero_demand_is_free() {
        assert_eq!(dp_restricted_min(&example1(), &[], 0).unwrap().value, Some(0));
    }

    #[test]
    fn unreachable_demand() {
        assert_eq!(dp_restricted_min(&example1(), &[], 7).unwrap().value, None);
    }

    #[test]
    fn negative_costs_are_allowed() {
        let out = knapsack_cover_dp(&[-1, 2], &[1, 1], 1, &[]).unwrap();
        assert_eq!(out.value, Some(-1));
    }

    #[test]
    fn negative_weights_are_rejected() {
        assert!(matches!(knapsack_cover_dp(&[1, 1], &[1, -1], 1, &[]), Err(Error::Unsupported(_))));
    }

    #[test]
    fn op_count_matches_prediction() {
        let covers = [Cover { q: vec![1, 0, 1], p: 2 }];
        let out = dp_restricted_min(&example1(), &covers, 5).unwrap();
        assert_eq!(out.ops as u128, predicted_ops(3, 5, &covers));
    }
}
