//! Cross-checks the algorithms against exhaustive enumeration.

use std::fmt::Write as _;

use cfex_core::instances::{random_instance, RandomShape};
use cfex_core::oracle::{enumerate_with, Ceilings, RegionMap, RegionPoint};
use cfex_core::{solve, CeInstance, CeResult, CeStatus, Kind, Mode, Params, SolveOptions};

use crate::Result;

#[derive(Debug, Clone)]
pub struct Agreement {
    pub kind: Kind,
    pub algorithm: CeResult,
    /// Cheapest grid point of the right label, with its cost.
    pub oracle: Option<(RegionPoint, i64)>,
    /// Why the two disagree; `None` when they agree.
    pub problem: Option<String>,
}

impl Agreement {
    pub fn agrees(&self) -> bool {
        self.problem.is_none()
    }
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub weak: Agreement,
    pub strong: Agreement,
    pub map: RegionMap,
}

impl VerifyReport {
    pub fn agrees(&self) -> bool {
        self.weak.agrees() && self.strong.agrees()
    }

    /// `AGREE weak=1 strong=2`, or the disagreement with the points involved.
    pub fn summary(&self) -> String {
        let cost = |a: &Agreement| a.algorithm.cost.map_or("none".to_string(), |c| c.to_string());
        if self.agrees() {
            return format!("AGREE weak={} strong={}", cost(&self.weak), cost(&self.strong));
        }
        let mut out = String::new();
        for a in [&self.weak, &self.strong] {
            let Some(problem) = &a.problem else { continue };
            let _ = writeln!(out, "DISAGREE {}: {problem}", a.kind.name());
            if let Some((pt, c)) = &a.oracle {
                let _ =
                    writeln!(out, "  oracle optimum: {} label={} cost={c}", fmt_params(&pt.params), pt.label.name());
            }
            if let Some(p) = &a.algorithm.params {
                let label = self.map.get(p).map_or("not in grid", |pt| pt.label.name());
                let _ = writeln!(out, "  algorithm point: {} label={label}", fmt_params(p));
            }
        }
        out.trim_end().to_string()
    }
}

pub fn fmt_params(p: &Params) -> String {
    format!("c={:?} a={:?} b={}", p.c, p.a, p.b)
}

fn compare(inst: &CeInstance, map: &RegionMap, kind: Kind, algorithm: CeResult) -> Agreement {
    let oracle = map.optimal_point(&inst.distance, kind).map(|(pt, c)| (pt.clone(), c));
    let expected = oracle.as_ref().map(|(_, c)| *c);
    let problem = if algorithm.status == CeStatus::BudgetExceeded {
        Some("the algorithm ran out of budget".to_string())
    } else if algorithm.cost != expected {
        Some(format!(
            "algorithm cost {} but oracle cost {}",
            algorithm.cost.map_or("none".into(), |c| c.to_string()),
            expected.map_or("none".into(), |c| c.to_string())
        ))
    } else if let Some(p) = &algorithm.params {
        match map.get(p) {
            None => Some("the algorithm's parameters lie outside the mutable space".to_string()),
            Some(pt) if !pt.label.satisfies(kind) => {
                Some(format!("the algorithm's parameters are labelled {}", pt.label.name()))
            }
            Some(_) if Some(inst.distance.cost(p, &map.present)) != algorithm.cost => {
                Some("the reported cost is not the distance of the reported parameters".to_string())
            }
            Some(_) => None,
        }
    } else {
        None
    };
    Agreement { kind, algorithm, oracle, problem }
}

pub fn verify(inst: &CeInstance, options: &SolveOptions<'_>, ceilings: Ceilings) -> Result<VerifyReport> {
    let map = enumerate_with(&inst.present, &inst.favored, &inst.mutable, ceilings)?;
    let weak = compare(inst, &map, Kind::Weak, solve(inst, Kind::Weak, options)?);
    let strong = compare(inst, &map, Kind::Strong, solve(inst, Kind::Strong, options)?);
    Ok(VerifyReport { weak, strong, map })
}

/// Shape of the `i`-th instance of a random batch: modes rotate, `n` cycles
/// through `3..=8`.
pub fn batch_shape(i: u64, max_grid: u128) -> RandomShape {
    let modes = [Mode::Objective, Mode::Constraint, Mode::Rhs, Mode::All];
    RandomShape { n: 3 + (i / 4 % 6) as usize, mode: modes[(i % 4) as usize], max_grid, side_row: i % 3 == 0 }
}

pub fn random_batch_instance(seed: u64, i: u64, max_grid: u128) -> Result<CeInstance> {
    Ok(random_instance(seed.wrapping_add(i), batch_shape(i, max_grid))?)
}

/// Writes every grid point with its label, optimum and optimal solutions.
pub fn map_csv(map: &RegionMap) -> Result<String> {
    let n = map.present.c.len();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
    header.extend((0..n).map(|i| format!("a{i}")));
    header.extend(["b", "label", "optimum", "argmin"].map(String::from));
    w.write_record(&header)?;
    for pt in &map.points {
        let mut row: Vec<String> = pt.params.c.iter().chain(&pt.params.a).map(|v| v.to_string()).collect();
        row.push(pt.params.b.to_string());
        row.push(pt.label.name().to_string());
        row.push(pt.optimum.map_or(String::new(), |v| v.to_string()));
        let sets: Vec<String> = pt
            .argmin
            .iter()
            .map(|&m| {
                let items: Vec<String> = (0..n).filter(|i| m >> i & 1 == 1).map(|i| i.to_string()).collect();
                format!("{{{}}}", items.join(","))
            })
            .collect();
        row.push(sets.join(" "));
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| crate::Error::Usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// A region-map plot when exactly two coordinates of the grid vary.
pub fn map_svg(map: &RegionMap, inst: &CeInstance) -> Option<String> {
    let h = &inst.mutable;
    let n = h.c.len();
    let boxes: Vec<_> = h.c.iter().chain(&h.a).chain(std::iter::once(&h.b)).collect();
    let name = |k: usize| match k {
        k if k < n => format!("c{k}"),
        k if k < 2 * n => format!("a{}", k - n),
        _ => "b".to_string(),
    };
    let varying: Vec<usize> = (0..boxes.len()).filter(|&k| !boxes[k].is_point()).collect();
    let &[ky, kx] = varying.as_slice() else { return None };
    let coord = |p: &Params, k: usize| match k {
        k if k < n => p.c[k],
        k if k < 2 * n => p.a[k - n],
        _ => p.b,
    };
    let cells: Vec<(i64, i64, &str)> =
        map.points.iter().map(|pt| (coord(&pt.params, kx), coord(&pt.params, ky), pt.label.name())).collect();
    let present = (coord(&map.present, kx), coord(&map.present, ky));
    Some(crate::svg::region_map("Counterfactual regions", (&name(kx), &name(ky)), &cells, present))
}
