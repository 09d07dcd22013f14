use alloc::format;
use alloc::vec::Vec;

use super::bound::{farkas_certifies, lagrangian_bound};
use super::lp::{LpData, LpOutcome, Tableau};
use super::{Limits, MipModel, MipSolution, MipStatus, Sense};
use crate::{Error, Result};

const INTEGRALITY_TOL: f64 = 1e-6;

struct Node {
    lo: Vec<i64>,
    hi: Vec<i64>,
    tableau: Tableau,
}

struct Search<'m> {
    model: &'m MipModel,
    lp: LpData,
    /// Minimization form of the objective.
    cost: Vec<i64>,
    best: Option<(i128, Vec<i64>)>,
    /// Largest acceptable minimization value (from the caller's cutoff).
    cutoff: Option<i128>,
    /// Variables with domain `[0, 1]`, branched on first.
    binary: Vec<bool>,
}

impl Search<'_> {
    /// Nodes whose exact bound exceeds this cannot contribute.
    fn threshold(&self) -> Option<i128> {
        let from_best = self.best.as_ref().map(|(v, _)| v - 1);
        match (from_best, self.cutoff) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    fn prunable(&self, bound: i128) -> bool {
        self.threshold().is_some_and(|t| bound > t)
    }

    fn min_value(&self, x: &[i64]) -> i128 {
        self.cost.iter().zip(x).map(|(&c, &v)| c as i128 * v as i128).sum()
    }

    fn offer(&mut self, x: Vec<i64>) {
        if !self.model.is_feasible(&x) {
            return;
        }
        let value = self.min_value(&x);
        if self.cutoff.is_some_and(|c| value > c) {
            return;
        }
        if self.best.as_ref().is_none_or(|(b, _)| value < *b) {
            self.best = Some((value, x));
        }
    }

    fn box_bound(&self, lo: &[i64], hi: &[i64]) -> i128 {
        self.cost
            .iter()
            .zip(lo.iter().zip(hi))
            .map(|(&c, (&l, &h))| c as i128 * if c >= 0 { l } else { h } as i128)
            .sum()
    }
}

pub(super) fn branch_and_bound(model: &MipModel, cutoff: Option<i64>, limits: &Limits<'_>) -> Result<MipSolution> {
    let n = model.num_vars();
    let sign: i64 = match model.objective.sense {
        Sense::Minimize => 1,
        Sense::Maximize => -1,
    };
    let constant = model.objective.constant as i128;
    let cost: Vec<i64> = model.objective.coefficients.iter().map(|&c| sign * c).collect();
    // cutoff on the model's objective -> cutoff on the minimization form
    let cutoff = cutoff.map(|k| sign as i128 * (k as i128 - constant));
    let lp = LpData::from_model(model);
    let lo: Vec<i64> = model.variables.iter().map(|v| v.lower).collect();
    let hi: Vec<i64> = model.variables.iter().map(|v| v.upper).collect();

    let binary = model.variables.iter().map(|v| v.lower == 0 && v.upper == 1).collect();
    let mut search = Search { model, lp, cost, best: None, cutoff, binary };
    let mut nodes: u64 = 0;
    let finish = |search: Search<'_>, nodes: u64| {
        Ok(match search.best {
            Some((value, x)) => MipSolution {
                status: MipStatus::Optimal,
                assignment: Some(x),
                objective: Some((sign as i128 * value + constant) as i64),
                nodes,
            },
            None => MipSolution { status: MipStatus::Infeasible, assignment: None, objective: None, nodes },
        })
    };
    if lo.iter().zip(&hi).any(|(l, h)| l > h) {
        return finish(search, nodes);
    }

    let to_f64 = |v: &[i64]| v.iter().map(|&x| x as f64).collect::<Vec<_>>();
    let root_tab = Tableau::new(&search.lp, &to_f64(&lo), &to_f64(&hi));
    let mut stack = Vec::new();
    stack.push(Node { lo, hi, tableau: root_tab });
    let max_iter = 50 * (search.lp.n + search.lp.m) + 100;

    while let Some(mut node) = stack.pop() {
        if nodes >= limits.node_limit {
            return Err(Error::BudgetExceeded(format!("node limit {} reached", limits.node_limit)));
        }
        nodes += 1;
        if nodes % 64 == 0 {
            limits.check_time()?;
        }
        if search.prunable(search.box_bound(&node.lo, &node.hi)) {
            continue;
        }
        if node.lo == node.hi {
            search.offer(node.lo.clone());
            continue;
        }
        let limit = search.threshold().map(|t| t as f64 + 0.5);
        node.tableau.recompute_primal(&search.lp);
        let mut outcome = node.tableau.dual_simplex(&search.lp, limit, max_iter);
        if outcome == LpOutcome::Cutoff {
            let y = node.tableau.duals(&search.lp);
            match lagrangian_bound(model, &search.cost, &node.lo, &node.hi, &y) {
                Some(b) if search.prunable(b) => continue,
                _ => outcome = node.tableau.dual_simplex(&search.lp, None, max_iter),
            }
        }
        if let LpOutcome::Infeasible(r) = outcome {
            let z = node.tableau.inverse_row(&search.lp, r);
            if farkas_certifies(model, &node.lo, &node.hi, &z) {
                continue;
            }
        } else {
            let y = node.tableau.duals(&search.lp);
            if let Some(b) = lagrangian_bound(model, &search.cost, &node.lo, &node.hi, &y) {
                if search.prunable(b) {
                    continue;
                }
            }
        }

        let x = &node.tableau.x[..n];
        let mut branch_var = None;
        if outcome == LpOutcome::Optimal {
            // Most fractional binary, then most fractional general integer;
            // lowest index on ties.
            for binary_pass in [true, false] {
                let mut best_frac = INTEGRALITY_TOL;
                for (j, &v) in x.iter().enumerate() {
                    if search.binary[j] != binary_pass {
                        continue;
                    }
                    let f = v - libm::floor(v);
                    let dist = f.min(1.0 - f);
                    if dist > best_frac + 1e-12 {
                        best_frac = dist;
                        branch_var = Some(j);
                    }
                }
                if branch_var.is_some() {
                    break;
                }
            }
            if branch_var.is_none() {
                let candidate: Vec<i64> = x
                    .iter()
                    .zip(node.lo.iter().zip(&node.hi))
                    .map(|(&v, (&l, &h))| (libm::round(v) as i64).clamp(l, h))
                    .collect();
                let value = search.min_value(&candidate);
                search.offer(candidate);
                if search.best.as_ref().is_some_and(|(b, _)| *b == value) {
                    // The relaxation optimum is attained by an integral point;
                    // confirm with the exact bound before closing the node.
                    let y = node.tableau.duals(&search.lp);
                    if lagrangian_bound(model, &search.cost, &node.lo, &node.hi, &y).is_some_and(|b| search.prunable(b))
                    {
                        continue;
                    }
                }
            }
        }

        let branch_var = branch_var.filter(|&j| node.lo[j] < node.hi[j]);
        let (j, split, up_first) = match branch_var {
            Some(j) => {
                let v = x[j];
                let fl = (libm::floor(v) as i64).clamp(node.lo[j], node.hi[j] - 1);
                (j, fl, v - libm::floor(v) >= 0.5)
            }
            None => {
                // Numerically doubtful node: split the first free variable.
                let Some(j) = (0..n).find(|&j| node.lo[j] < node.hi[j]) else {
                    search.offer(node.lo.clone());
                    continue;
                };
                (j, node.lo[j] + (node.hi[j] - node.lo[j]) / 2, false)
            }
        };
        let (down_hi, up_lo) = (split, split + 1);

        let mut down = Node { lo: node.lo.clone(), hi: node.hi.clone(), tableau: node.tableau.clone() };
        down.hi[j] = down_hi;
        down.tableau.set_bounds(j, down.lo[j] as f64, down_hi as f64);
        let mut up = node;
        up.lo[j] = up_lo;
        up.tableau.set_bounds(j, up_lo as f64, up.hi[j] as f64);
        let (first, second) = if up_first { (up, down) } else { (down, up) };
        stack.push(second);
        stack.push(first);
    }
    finish(search, nodes)
}
