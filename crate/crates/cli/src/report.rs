//! The JSON result document written by `cfex solve`.

use cfex_core::{CeInstance, CeResult, CeStatus};
use serde::{Deserialize, Serialize};

use crate::exit;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDoc {
    pub schema: u32,
    pub instance: Option<String>,
    /// Cost as a percentage of the summed magnitude of the mutable present
    /// parameters.
    pub relative_change_pct: Option<f64>,
    #[serde(flatten)]
    pub result: CeResult,
}

impl ResultDoc {
    pub fn new(instance: Option<String>, inst: &CeInstance, result: CeResult) -> Self {
        let relative_change_pct = result.cost.and_then(|c| relative_change_pct(inst, c));
        ResultDoc { schema: SCHEMA, instance, relative_change_pct, result }
    }
}

/// `100 · cost / Σ|v|` over the present values whose boxes are not points.
pub fn relative_change_pct(inst: &CeInstance, cost: i64) -> Option<f64> {
    let p = &inst.present;
    let h = &inst.mutable;
    let movable = |boxes: &[cfex_core::Interval], values: &[i64]| -> i64 {
        boxes.iter().zip(values).filter(|(bx, _)| !bx.is_point()).map(|(_, v)| v.abs()).sum()
    };
    let mut total = movable(&h.c, &p.c) + movable(&h.a, &p.a);
    if !h.b.is_point() {
        total += p.b.abs();
    }
    (total > 0).then(|| 100.0 * cost as f64 / total as f64)
}

pub fn status_name(status: CeStatus) -> &'static str {
    match status {
        CeStatus::Optimal => "optimal",
        CeStatus::Infeasible => "infeasible",
        CeStatus::BudgetExceeded => "budget_exceeded",
    }
}

pub fn exit_code(status: CeStatus) -> u8 {
    match status {
        CeStatus::Optimal => exit::OPTIMAL,
        CeStatus::Infeasible => exit::INFEASIBLE,
        CeStatus::BudgetExceeded => exit::BUDGET,
    }
}
