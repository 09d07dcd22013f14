//! Exact bounds from approximate multipliers.
//!
//! For any multipliers `y` of the right sign, the Lagrangian
//! `yᵀb + Σⱼ min_{lⱼ≤xⱼ≤uⱼ} (cⱼ − yᵀAⱼ)xⱼ` is a valid lower bound on the
//! minimum over the box. Rounding `y` to a dyadic grid keeps it valid, so the
//! bound is evaluated exactly in `i128` regardless of how the multipliers were
//! obtained.

use alloc::vec::Vec;

use super::{Comparator, MipModel};

/// Multipliers rounded to integers with a common power-of-two scale.
struct Scaled {
    y: Vec<i128>,
    shift: u32,
}

fn scale(y: &[f64]) -> Option<Scaled> {
    let max = y.iter().fold(0.0f64, |m, v| if v.is_finite() { m.max(v.abs()) } else { f64::INFINITY });
    if !max.is_finite() {
        return None;
    }
    // Aim for |y·2^shift| ≤ 2^40.
    let mut shift: u32 = 40;
    let mut mag = max;
    while mag >= 1.0 && shift > 0 {
        mag /= 2.0;
        shift -= 1;
    }
    if mag >= 1.0 {
        return None;
    }
    let factor = (1u64 << shift) as f64;
    let y = y.iter().map(|v| libm::round(v * factor) as i128).collect();
    Some(Scaled { y, shift })
}

fn clamp_signs(model: &MipModel, y: &mut [i128]) {
    for (yi, row) in y.iter_mut().zip(&model.constraints) {
        match row.comparator {
            Comparator::Le => *yi = (*yi).min(0),
            Comparator::Ge => *yi = (*yi).max(0),
            Comparator::Eq => {}
        }
    }
}

/// `⌈x / 2^shift⌉` for possibly negative `x`.
fn ceil_shift(x: i128, shift: u32) -> i128 {
    let d = 1i128 << shift;
    -((-x).div_euclid(d))
}

/// Exact lower bound on the minimum of `cost·x` over the node box and model
/// rows, or `None` when the multipliers are unusable.
pub(crate) fn lagrangian_bound(model: &MipModel, cost: &[i64], lo: &[i64], hi: &[i64], y: &[f64]) -> Option<i128> {
    let Scaled { mut y, shift } = scale(y)?;
    clamp_signs(model, &mut y);
    let mut total: i128 = 0;
    for (yi, row) in y.iter().zip(&model.constraints) {
        total = total.checked_add(yi.checked_mul(row.rhs as i128)?)?;
    }
    for j in 0..cost.len() {
        let mut reduced: i128 = (cost[j] as i128) << shift;
        for (yi, row) in y.iter().zip(&model.constraints) {
            let k = row.coefficients[j];
            if k != 0 && *yi != 0 {
                reduced = reduced.checked_sub(yi.checked_mul(k as i128)?)?;
            }
        }
        let at = if reduced >= 0 { lo[j] } else { hi[j] };
        total = total.checked_add(reduced.checked_mul(at as i128)?)?;
    }
    Some(ceil_shift(total, shift))
}

/// Whether `z` (a combination of rows) certifies that no point of the box
/// satisfies the rows. Slack multipliers of the wrong sign are float noise;
/// both directions are tried with them clamped away.
pub(crate) fn farkas_certifies(model: &MipModel, lo: &[i64], hi: &[i64], z: &[f64]) -> bool {
    let Some(Scaled { y: z, .. }) = scale(z) else {
        return false;
    };
    [false, true].into_iter().any(|above| {
        let mut z = z.clone();
        for (zi, row) in z.iter_mut().zip(&model.constraints) {
            // Below: every zᵢsᵢ must be ≥ 0; above: ≤ 0.
            let keep_positive = matches!(row.comparator, Comparator::Le) != above;
            match row.comparator {
                Comparator::Eq => {}
                _ if keep_positive => *zi = (*zi).max(0),
                _ => *zi = (*zi).min(0),
            }
        }
        certify(model, lo, hi, &z, above).unwrap_or(false)
    })
}

fn certify(model: &MipModel, lo: &[i64], hi: &[i64], z: &[i128], above: bool) -> Option<bool> {
    // With the slack terms signed, zᵀAx = zᵀb − zᵀs must be unattainable for
    // x in the box.
    let mut rhs: i128 = 0;
    for (zi, row) in z.iter().zip(&model.constraints) {
        rhs = rhs.checked_add(zi.checked_mul(row.rhs as i128)?)?;
    }
    let mut min: i128 = 0;
    let mut max: i128 = 0;
    for j in 0..lo.len() {
        let mut coef: i128 = 0;
        for (zi, row) in z.iter().zip(&model.constraints) {
            let k = row.coefficients[j];
            if k != 0 && *zi != 0 {
                coef = coef.checked_add(zi.checked_mul(k as i128)?)?;
            }
        }
        let a = coef.checked_mul(lo[j] as i128)?;
        let b = coef.checked_mul(hi[j] as i128)?;
        min = min.checked_add(a.min(b))?;
        max = max.checked_add(a.max(b))?;
    }
    Some(if above { rhs > max } else { rhs < min })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mip::LinExpr;

    fn two_binaries(rows: &[([i64; 2], Comparator, i64)]) -> MipModel {
        let mut m = MipModel::new();
        let x = [m.add_binary("x"), m.add_binary("y")];
        for (k, cmp, rhs) in rows {
            let mut e = LinExpr::new();
            e.add(x[0], k[0]);
            e.add(x[1], k[1]);
            m.add_constraint(&e, *cmp, *rhs);
        }
        m
    }

    #[test]
    fn noisy_farkas_rows_still_certify() {
        let m = two_binaries(&[([1, 1], Comparator::Ge, 3), ([1, -1], Comparator::Le, 0)]);
        assert!(farkas_certifies(&m, &[0, 0], &[1, 1], &[1.0, 0.0]));
        assert!(farkas_certifies(&m, &[0, 0], &[1, 1], &[1.0, 1e-9]));
        assert!(farkas_certifies(&m, &[0, 0], &[1, 1], &[-1.0, -1e-9]));
    }

    #[test]
    fn feasible_rows_never_certify() {
        let m = two_binaries(&[([1, 1], Comparator::Ge, 1), ([1, -1], Comparator::Le, 0)]);
        for z in [[1.0, 0.0], [-1.0, 0.0], [1.0, 1.0], [0.0, -1.0], [1e-9, 1.0]] {
            assert!(!farkas_certifies(&m, &[0, 0], &[1, 1], &z), "{z:?}");
        }
    }

    #[test]
    fn lagrangian_bound_is_exact_for_optimal_duals() {
        let mut m = two_binaries(&[([2, 3], Comparator::Ge, 2)]);
        let mut e = LinExpr::new();
        e.add(crate::mip::VarId(0), 4);
        e.add(crate::mip::VarId(1), 5);
        m.set_objective(crate::mip::Sense::Minimize, &e);
        // LP optimum y = 2/3 with dual 5/3 and value 10/3; the integer optimum is 4.
        assert_eq!(lagrangian_bound(&m, &[4, 5], &[0, 0], &[1, 1], &[5.0 / 3.0]), Some(4));
        assert_eq!(lagrangian_bound(&m, &[4, 5], &[0, 0], &[1, 1], &[2.0]), Some(3));
        assert_eq!(lagrangian_bound(&m, &[4, 5], &[0, 0], &[1, 1], &[0.0]), Some(0));
    }
}
