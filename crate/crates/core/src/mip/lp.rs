//! Dense bounded dual simplex used for node relaxations.
//!
//! Rows are `Aᵢx + sᵢ = bᵢ` with one slack per row; the slack bounds encode
//! the comparator. Every structural variable has finite bounds, so the slack
//! basis with each structural at the bound favoured by its cost is dual
//! feasible and no phase one is needed. Branching only tightens bounds, which
//! keeps a parent's final basis dual feasible for its children.

use alloc::vec;
use alloc::vec::Vec;

use super::{Comparator, MipModel, Sense};

const PRIMAL_TOL: f64 = 1e-9;
/// Violations this small with no entering column are rounding noise.
const NOISE_TOL: f64 = 1e-6;
const PIVOT_TOL: f64 = 1e-9;
const DUAL_TOL: f64 = 1e-9;
const REFACTOR_EVERY: usize = 256;
/// Degenerate pivots in a row before switching to Bland's rule.
const STALL_LIMIT: usize = 20;

/// Static relaxation data shared by all nodes.
pub(crate) struct LpData {
    pub n: usize,
    pub m: usize,
    /// Row-major `m × n`.
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// Minimization costs (the objective is negated for maximization).
    pub c: Vec<f64>,
    pub slack_lo: Vec<f64>,
    pub slack_hi: Vec<f64>,
}

impl LpData {
    pub fn from_model(model: &MipModel) -> Self {
        let n = model.num_vars();
        let m = model.constraints.len();
        let mut a = Vec::with_capacity(n * m);
        let mut b = Vec::with_capacity(m);
        let mut slack_lo = Vec::with_capacity(m);
        let mut slack_hi = Vec::with_capacity(m);
        for row in &model.constraints {
            a.extend(row.coefficients.iter().map(|&k| k as f64));
            b.push(row.rhs as f64);
            let (lo, hi) = match row.comparator {
                Comparator::Le => (0.0, f64::INFINITY),
                Comparator::Ge => (f64::NEG_INFINITY, 0.0),
                Comparator::Eq => (0.0, 0.0),
            };
            slack_lo.push(lo);
            slack_hi.push(hi);
        }
        let sign = match model.objective.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let c = model.objective.coefficients.iter().map(|&k| sign * k as f64).collect();
        LpData { n, m, a, b, c, slack_lo, slack_hi }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LpOutcome {
    Optimal,
    /// No entering column for this row: the relaxation is infeasible and the
    /// row of `B⁻¹` is a candidate Farkas certificate.
    Infeasible(usize),
    /// The current objective already exceeds the requested limit.
    Cutoff,
    IterationLimit,
}

#[derive(Clone)]
pub(crate) struct Tableau {
    width: usize,
    /// `m × (n + m)`, equal to `B⁻¹[A | I]`.
    t: Vec<f64>,
    /// Reduced costs.
    d: Vec<f64>,
    /// Current values of all structural and slack variables.
    pub x: Vec<f64>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    basis: Vec<usize>,
    /// `row + 1` when basic, `0` when nonbasic.
    pos: Vec<usize>,
    at_upper: Vec<bool>,
    pivots: usize,
}

impl Tableau {
    pub fn new(lp: &LpData, lo: &[f64], hi: &[f64]) -> Self {
        let (n, m) = (lp.n, lp.m);
        let width = n + m;
        let mut tab = Tableau {
            width,
            t: vec![0.0; m * width],
            d: vec![0.0; width],
            x: vec![0.0; width],
            lo: vec![0.0; width],
            hi: vec![0.0; width],
            basis: (n..n + m).collect(),
            pos: vec![0; width],
            at_upper: vec![false; width],
            pivots: 0,
        };
        tab.lo[..n].copy_from_slice(lo);
        tab.hi[..n].copy_from_slice(hi);
        tab.lo[n..].copy_from_slice(&lp.slack_lo);
        tab.hi[n..].copy_from_slice(&lp.slack_hi);
        tab.reset_to_slack_basis(lp);
        tab
    }

    fn reset_to_slack_basis(&mut self, lp: &LpData) {
        let (n, m, w) = (lp.n, lp.m, self.width);
        self.t.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..m {
            self.t[i * w..i * w + n].copy_from_slice(&lp.a[i * n..(i + 1) * n]);
            self.t[i * w + n + i] = 1.0;
            self.basis[i] = n + i;
        }
        self.pos.iter_mut().for_each(|p| *p = 0);
        for i in 0..m {
            self.pos[n + i] = i + 1;
        }
        for j in 0..n {
            self.d[j] = lp.c[j];
            self.at_upper[j] = lp.c[j] < 0.0;
        }
        for j in n..w {
            self.d[j] = 0.0;
            self.at_upper[j] = false;
        }
        self.pivots = 0;
        self.recompute_primal(lp);
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        if self.at_upper[j] {
            self.hi[j]
        } else {
            self.lo[j]
        }
    }

    /// `x_B = B⁻¹b − Σ_N B⁻¹A_j x_j`, using the slack block of the tableau as `B⁻¹`.
    pub fn recompute_primal(&mut self, lp: &LpData) {
        let (n, m, w) = (lp.n, lp.m, self.width);
        for j in 0..w {
            if self.pos[j] == 0 {
                self.x[j] = self.nonbasic_value(j);
            }
        }
        for i in 0..m {
            let row = &self.t[i * w..(i + 1) * w];
            let mut v: f64 = (0..m).map(|k| row[n + k] * lp.b[k]).sum();
            for j in 0..w {
                if self.pos[j] == 0 && row[j] != 0.0 {
                    v -= row[j] * self.x[j];
                }
            }
            self.x[self.basis[i]] = v;
        }
    }

    /// Tightens the bounds of structural variable `j`. Nonbasic variables stay
    /// on the same side, which preserves dual feasibility.
    pub fn set_bounds(&mut self, j: usize, lo: f64, hi: f64) {
        self.lo[j] = lo;
        self.hi[j] = hi;
        if self.pos[j] == 0 {
            self.x[j] = self.nonbasic_value(j);
        }
    }

    /// Objective value `cᵀx` of the current (possibly primal infeasible) point.
    fn objective(&self, lp: &LpData) -> f64 {
        lp.c.iter().zip(&self.x).map(|(c, x)| c * x).sum()
    }

    /// Simplex multipliers `y` with `dⱼ = cⱼ − yᵀAⱼ`.
    pub fn duals(&self, lp: &LpData) -> Vec<f64> {
        (0..lp.m).map(|i| -self.d[lp.n + i]).collect()
    }

    /// Row `r` of `B⁻¹`.
    pub fn inverse_row(&self, lp: &LpData, r: usize) -> Vec<f64> {
        let w = self.width;
        self.t[r * w + lp.n..(r + 1) * w].to_vec()
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let w = self.width;
        let m = self.basis.len();
        let piv = self.t[r * w + q];
        {
            let row = &mut self.t[r * w..(r + 1) * w];
            row.iter_mut().for_each(|v| *v /= piv);
            row[q] = 1.0;
        }
        let (head, tail) = self.t.split_at_mut(r * w);
        let (prow, rest) = tail.split_at_mut(w);
        for i in 0..m {
            if i == r {
                continue;
            }
            let target = if i < r {
                &mut head[i * w..(i + 1) * w]
            } else {
                let k = i - r - 1;
                &mut rest[k * w..(k + 1) * w]
            };
            let f = target[q];
            if f != 0.0 {
                for (t, p) in target.iter_mut().zip(prow.iter()) {
                    *t -= f * p;
                }
                target[q] = 0.0;
            }
        }
        let f = self.d[q];
        if f != 0.0 {
            for (d, p) in self.d.iter_mut().zip(prow.iter()) {
                *d -= f * p;
            }
            self.d[q] = 0.0;
        }
        let leaving = self.basis[r];
        self.pos[leaving] = 0;
        self.basis[r] = q;
        self.pos[q] = r + 1;
        self.pivots += 1;
    }

    /// Rebuilds `B⁻¹[A | I]` from the original data for the current basis,
    /// refreshing reduced costs and primal values. Falls back to the slack
    /// basis when the basis has become numerically singular.
    fn refactor(&mut self, lp: &LpData) {
        let (n, m, w) = (lp.n, lp.m, self.width);
        let basic: Vec<usize> = self.basis.clone();
        let saved_upper = self.at_upper.clone();
        self.reset_to_slack_basis(lp);
        self.at_upper = saved_upper;
        let mut assigned = vec![false; m];
        let mut ok = true;
        for &q in basic.iter().filter(|&&q| q < n) {
            let mut best = None;
            let mut best_abs = 1e-9;
            for i in 0..m {
                if !assigned[i] && self.basis[i] >= n {
                    let v = self.t[i * w + q].abs();
                    if v > best_abs {
                        best_abs = v;
                        best = Some(i);
                    }
                }
            }
            match best {
                Some(r) => {
                    assigned[r] = true;
                    self.pivot(r, q);
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            self.reset_to_slack_basis(lp);
            return;
        }
        // Restore dual feasibility by moving nonbasic variables to the bound
        // their reduced cost prefers.
        for j in 0..w {
            if self.pos[j] != 0 {
                self.at_upper[j] = false;
                continue;
            }
            if j >= n {
                self.at_upper[j] = self.lo[j] == f64::NEG_INFINITY;
                let finite_ok = if self.at_upper[j] { self.d[j] <= DUAL_TOL } else { self.d[j] >= -DUAL_TOL };
                if !finite_ok && self.lo[j] != self.hi[j] {
                    self.reset_to_slack_basis(lp);
                    return;
                }
            } else if self.d[j] < -DUAL_TOL {
                self.at_upper[j] = true;
            } else if self.d[j] > DUAL_TOL {
                self.at_upper[j] = false;
            }
        }
        self.pivots = 0;
        self.recompute_primal(lp);
    }

    /// Runs the dual simplex until primal feasibility, proven infeasibility,
    /// the objective exceeding `limit`, or `max_iter` pivots.
    pub fn dual_simplex(&mut self, lp: &LpData, limit: Option<f64>, max_iter: usize) -> LpOutcome {
        let (m, w) = (lp.m, self.width);
        let mut noisy = vec![false; m];
        let mut stalled = 0;
        for _ in 0..max_iter {
            let bland = stalled >= STALL_LIMIT;
            if self.pivots >= REFACTOR_EVERY {
                self.refactor(lp);
            }
            if let Some(lim) = limit {
                if self.objective(lp) > lim {
                    return LpOutcome::Cutoff;
                }
            }
            // Leaving row: largest bound violation, lowest row on ties. After a
            // stall, Bland's rule: lowest basic index, then lowest entering index.
            let mut leave = None;
            let mut worst = PRIMAL_TOL;
            for i in 0..m {
                if noisy[i] {
                    continue;
                }
                let p = self.basis[i];
                let xv = self.x[p];
                let viol = if xv < self.lo[p] {
                    (self.lo[p] - xv) / (1.0 + self.lo[p].abs())
                } else if xv > self.hi[p] {
                    (xv - self.hi[p]) / (1.0 + self.hi[p].abs())
                } else {
                    0.0
                };
                let better = match leave {
                    _ if viol <= PRIMAL_TOL => false,
                    None => true,
                    Some(l) if bland => p < self.basis[l],
                    Some(_) => viol > worst,
                };
                if better {
                    worst = viol;
                    leave = Some(i);
                }
            }
            let Some(r) = leave else {
                return LpOutcome::Optimal;
            };
            let p = self.basis[r];
            let below = self.x[p] < self.lo[p];
            let row = &self.t[r * w..(r + 1) * w];
            // Entering column by the dual ratio test.
            let mut enter = None;
            let mut best_ratio = f64::INFINITY;
            let mut best_alpha = 0.0;
            for j in 0..w {
                if self.pos[j] != 0 || self.lo[j] == self.hi[j] {
                    continue;
                }
                let alpha = row[j];
                if alpha.abs() <= PIVOT_TOL {
                    continue;
                }
                // x_p = β − Σ α_j x_j. To raise x_p we need α_j x_j to fall.
                let can_rise = !self.at_upper[j] && self.x[j] < self.hi[j];
                let can_fall = self.at_upper[j] || self.lo[j] == f64::NEG_INFINITY;
                let eligible = if below {
                    (alpha < 0.0 && can_rise) || (alpha > 0.0 && can_fall)
                } else {
                    (alpha > 0.0 && can_rise) || (alpha < 0.0 && can_fall)
                };
                if !eligible {
                    continue;
                }
                let ratio = self.d[j].abs() / alpha.abs();
                let tie_wins = !bland && alpha.abs() > best_alpha;
                if ratio < best_ratio - 1e-12 || (ratio <= best_ratio + 1e-12 && tie_wins) {
                    best_ratio = ratio;
                    best_alpha = alpha.abs();
                    enter = Some(j);
                }
            }
            stalled = if best_ratio <= 1e-12 { stalled + 1 } else { 0 };
            let Some(q) = enter else {
                if worst <= NOISE_TOL {
                    noisy[r] = true;
                    continue;
                }
                return LpOutcome::Infeasible(r);
            };
            let target = if below { self.lo[p] } else { self.hi[p] };
            let alpha_q = self.t[r * w + q];
            let delta = (self.x[p] - target) / alpha_q;
            for i in 0..m {
                let a = self.t[i * w + q];
                if a != 0.0 {
                    let bi = self.basis[i];
                    self.x[bi] -= a * delta;
                }
            }
            self.x[q] += delta;
            self.x[p] = target;
            self.at_upper[p] = !below;
            self.pivot(r, q);
            noisy.iter_mut().for_each(|f| *f = false);
        }
        LpOutcome::IterationLimit
    }
}
