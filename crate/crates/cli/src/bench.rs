//! Benchmark sweeps over generated cover instances.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use cfex_core::instances::{build_favored, build_mutable, generate, to_cover, BoxBasis, Correlation, FavoredKind};
use cfex_core::mip::{Deadline, Limits};
use cfex_core::model::{LowerBound, TracePoint};
use cfex_core::{check_strong, check_weak, solve, CeInstance, Distance, Kind, Mode, Params, SolveOptions};
use serde::{Deserialize, Serialize};

use crate::report::{relative_change_pct, status_name};
use crate::svg::{self, ProgressRun};
use crate::Result;

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub correlations: Vec<Correlation>,
    pub per_cell: usize,
    pub kinds: Vec<Kind>,
    pub seed: u64,
    pub mode: Mode,
    pub range: i64,
    pub pct: u32,
    pub basis: BoxBasis,
    pub favored: FavoredKind,
    pub time_limit: Option<Duration>,
    pub ablate_lb: bool,
    pub jobs: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            sizes: vec![10],
            correlations: vec![Correlation::Uncorrelated, Correlation::Strong],
            per_cell: 5,
            kinds: vec![Kind::Weak, Kind::Strong],
            seed: 0,
            mode: Mode::Constraint,
            range: 1000,
            pct: 5,
            basis: BoxBasis::DataRange(1000),
            favored: FavoredKind::Positive,
            time_limit: Some(Duration::from_secs(600)),
            ablate_lb: false,
            jobs: 1,
        }
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance_id: String,
    pub correlation: String,
    pub n: usize,
    pub seed: u64,
    pub kind: String,
    pub mode: String,
    pub lower_bound: bool,
    /// `optimal`, `infeasible`, `budget_exceeded` or `error`.
    pub status: String,
    pub cost: Option<i64>,
    pub relative_change_pct: Option<f64>,
    pub values_examined: u64,
    pub range_size: u64,
    pub cuts: u64,
    pub cuts_master: u64,
    pub cuts_lower_bound: u64,
    pub subproblem_solves: u64,
    pub wall_ms: u64,
    /// Whether the returned parameters pass the independent check.
    pub verified: Option<bool>,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct BenchRun {
    pub record: RunRecord,
    pub instance: Option<CeInstance>,
    pub params: Option<Params>,
    pub value_range: Option<(i64, i64)>,
    pub trace: Vec<TracePoint>,
}

struct Job {
    id: String,
    correlation: Correlation,
    n: usize,
    seed: u64,
    kind: Kind,
    lower_bound: bool,
}

fn jobs(config: &BenchConfig) -> Vec<Job> {
    let mut out = Vec::new();
    for &n in &config.sizes {
        for (ci, &correlation) in config.correlations.iter().enumerate() {
            for k in 0..config.per_cell {
                let seed = config.seed.wrapping_add(n as u64 * 1_000_000 + ci as u64 * 10_000 + k as u64);
                let id = format!("{}-n{n}-{k:02}", correlation.name());
                for &kind in &config.kinds {
                    let flags: &[bool] = if config.ablate_lb { &[true, false] } else { &[true] };
                    for &lower_bound in flags {
                        out.push(Job { id: id.clone(), correlation, n, seed, kind, lower_bound });
                    }
                }
            }
        }
    }
    out
}

pub fn build_instance(config: &BenchConfig, n: usize, correlation: Correlation, seed: u64) -> Result<CeInstance> {
    let p = to_cover(&generate(n, config.range, correlation, seed)?);
    let favored = build_favored(&p, config.favored, seed)?;
    let mutable = build_mutable(&p, config.mode, config.pct, config.basis)?;
    let distance = Distance::unit(n);
    Ok(CeInstance::new(p, favored, mutable, distance)?)
}

fn run_job(config: &BenchConfig, job: &Job) -> BenchRun {
    let mut record = RunRecord {
        instance_id: job.id.clone(),
        correlation: job.correlation.name().to_string(),
        n: job.n,
        seed: job.seed,
        kind: job.kind.name().to_string(),
        mode: config.mode.name().to_string(),
        lower_bound: job.lower_bound,
        status: "error".to_string(),
        cost: None,
        relative_change_pct: None,
        values_examined: 0,
        range_size: 0,
        cuts: 0,
        cuts_master: 0,
        cuts_lower_bound: 0,
        subproblem_solves: 0,
        wall_ms: 0,
        verified: None,
        error: None,
    };
    let mut run =
        BenchRun { record: record.clone(), instance: None, params: None, value_range: None, trace: Vec::new() };
    let inst = match build_instance(config, job.n, job.correlation, job.seed) {
        Ok(inst) => inst,
        Err(e) => {
            record.error = Some(e.to_string());
            run.record = record;
            return run;
        }
    };
    let deadline = Deadline::new(config.time_limit);
    let options = SolveOptions {
        limits: Limits::with_stopwatch(&deadline),
        lower_bound: job.lower_bound,
        ..SolveOptions::default()
    };
    match solve(&inst, job.kind, &options) {
        Ok(result) => {
            let s = &result.stats;
            record.status = status_name(result.status).to_string();
            record.cost = result.cost;
            record.relative_change_pct = result.cost.and_then(|c| relative_change_pct(&inst, c));
            record.values_examined = s.values_examined;
            record.range_size = s.range_size();
            record.cuts = s.cuts();
            record.cuts_master = s.cuts_master;
            record.cuts_lower_bound = s.cuts_lower_bound;
            record.subproblem_solves = s.subproblem_solves;
            record.wall_ms = s.wall_ms;
            if let (true, Some(params)) = (result.is_optimal(), &result.params) {
                let check = match job.kind {
                    Kind::Weak => check_weak(&inst.present, &inst.favored, params),
                    Kind::Strong => check_strong(&inst.present, &inst.favored, params),
                };
                record.verified = Some(check.is_ok_and(|c| c.holds));
            }
            run.value_range = s.value_range;
            run.trace = result.stats.trace.clone();
            run.params = result.params;
        }
        Err(e) => record.error = Some(e.to_string()),
    }
    log::info!("{} {} lb={}: {} {:?}", record.instance_id, record.kind, record.lower_bound, record.status, record.cost);
    run.record = record;
    run.instance = Some(inst);
    run
}

/// Runs every (instance, kind[, lower-bound flag]) row, `config.jobs` at a
/// time. Failures are recorded in their row.
pub fn run(config: &BenchConfig) -> Vec<BenchRun> {
    let jobs = jobs(config);
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<BenchRun>>> = Mutex::new(vec![None; jobs.len()]);
    std::thread::scope(|scope| {
        for _ in 0..config.jobs.clamp(1, jobs.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(job) = jobs.get(i) else { break };
                let run = run_job(config, job);
                results.lock().expect("result lock")[i] = Some(run);
            });
        }
    });
    results.into_inner().expect("result lock").into_iter().map(|r| r.expect("every job ran")).collect()
}

pub fn records_csv(runs: &[BenchRun]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in runs {
        w.serialize(&r.record)?;
    }
    let bytes = w.into_inner().map_err(|e| crate::Error::Usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Per-row trajectory: the position of each examined `v` within the value
/// range, the incumbent cost and the lower bound after it.
pub fn progress_csv(runs: &[BenchRun]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["instance_id", "kind", "lower_bound", "step", "fraction", "v", "incumbent", "dual"])?;
    for r in runs {
        let Some((lo, hi)) = r.value_range else { continue };
        let size = (hi - lo + 1).max(1) as f64;
        for (step, t) in r.trace.iter().enumerate() {
            let dual = match t.lower_bound {
                Some(LowerBound::Value(v)) => v.to_string(),
                Some(LowerBound::Infinite) => "inf".to_string(),
                None => String::new(),
            };
            w.write_record([
                r.record.instance_id.clone(),
                r.record.kind.clone(),
                r.record.lower_bound.to_string(),
                step.to_string(),
                format!("{:.6}", (t.v - lo + 1) as f64 / size),
                t.v.to_string(),
                t.incumbent.map_or(String::new(), |c| c.to_string()),
                dual,
            ])?;
        }
    }
    let bytes = w.into_inner().map_err(|e| crate::Error::Usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Trajectories of the optimal rows with positive cost for one kind, bounds
/// divided by the optimum.
pub fn progress_runs(runs: &[BenchRun], kind: &str) -> Vec<ProgressRun> {
    runs.iter()
        .filter(|r| r.record.kind == kind && r.record.status == "optimal" && r.record.lower_bound)
        .filter_map(|r| {
            let opt = r.record.cost.filter(|&c| c > 0)? as f64;
            let (lo, hi) = r.value_range?;
            let size = (hi - lo + 1).max(1) as f64;
            let mut out = ProgressRun::default();
            for t in &r.trace {
                let x = (t.v - lo + 1) as f64 / size;
                if let Some(c) = t.incumbent {
                    out.primal.push((x, c as f64 / opt));
                }
                match t.lower_bound {
                    Some(LowerBound::Value(v)) => out.dual.push((x, v.max(0) as f64 / opt)),
                    Some(LowerBound::Infinite) => out.dual.push((x, f64::MAX)),
                    None => {}
                }
            }
            Some(out)
        })
        .collect()
}

/// `(file name, contents)` of the runtime and cut-count boxplots and one
/// progress chart per kind.
pub fn plots(runs: &[BenchRun]) -> Vec<(String, String)> {
    let mut groups: Vec<(String, Vec<f64>, Vec<f64>)> = Vec::new();
    for r in runs.iter().filter(|r| r.record.lower_bound && r.record.error.is_none()) {
        let name = format!("{} n={}", r.record.kind, r.record.n);
        let slot = match groups.iter().position(|(g, _, _)| *g == name) {
            Some(i) => i,
            None => {
                groups.push((name, Vec::new(), Vec::new()));
                groups.len() - 1
            }
        };
        groups[slot].1.push(r.record.wall_ms as f64 / 1000.0);
        groups[slot].2.push(r.record.cuts as f64);
    }
    let runtime: Vec<(String, Vec<f64>)> = groups.iter().map(|(g, t, _)| (g.clone(), t.clone())).collect();
    let cuts: Vec<(String, Vec<f64>)> = groups.iter().map(|(g, _, c)| (g.clone(), c.clone())).collect();
    let mut out = vec![
        ("runtime.svg".to_string(), svg::boxplot("Runtime", "seconds (log scale)", &runtime, true)),
        ("cuts.svg".to_string(), svg::boxplot("Generated cuts", "cuts", &cuts, false)),
    ];
    for kind in ["weak", "strong"] {
        if runs.iter().any(|r| r.record.kind == kind) {
            let title = format!("Progress of {kind} explanations");
            out.push((format!("progress_{kind}.svg"), svg::progress(&title, &progress_runs(runs, kind))));
        }
    }
    out
}

/// Mean relative reduction in examined values from the lower bound, over
/// rows solved to optimality both with and without it.
pub fn lower_bound_reduction(runs: &[BenchRun]) -> Option<f64> {
    let mut ratios = Vec::new();
    for with in runs.iter().filter(|r| r.record.lower_bound && r.record.status == "optimal") {
        let without = runs.iter().find(|r| {
            !r.record.lower_bound
                && r.record.instance_id == with.record.instance_id
                && r.record.kind == with.record.kind
        })?;
        if without.record.status == "optimal" && without.record.values_examined > 0 {
            let (a, b) = (with.record.values_examined as f64, without.record.values_examined as f64);
            ratios.push((b - a) / b);
        }
    }
    (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> BenchConfig {
        BenchConfig { sizes: vec![6], per_cell: 2, time_limit: Some(Duration::from_secs(60)), ..BenchConfig::default() }
    }

    #[test]
    fn arity_and_determinism() {
        let config = small();
        let a = run(&config);
        assert_eq!(a.len(), 2 * 2 * 2);
        let b = run(&BenchConfig { jobs: 3, ..config });
        let strip = |runs: &[BenchRun]| -> Vec<(String, String, Option<i64>)> {
            runs.iter().map(|r| (r.record.instance_id.clone(), r.record.kind.clone(), r.record.cost)).collect()
        };
        assert_eq!(strip(&a), strip(&b));
    }

    #[test]
    fn ablation_pairs_rows() {
        let runs = run(&BenchConfig { ablate_lb: true, kinds: vec![Kind::Weak], ..small() });
        assert_eq!(runs.len(), 2 * 2 * 2);
        for pair in runs.chunks(2) {
            assert!(pair[0].record.lower_bound && !pair[1].record.lower_bound);
            assert_eq!(pair[0].record.cost, pair[1].record.cost);
            assert!(pair[0].record.values_examined <= pair[1].record.values_examined);
        }
    }

    #[test]
    fn csv_has_one_row_per_run() {
        let runs = run(&small());
        let text = records_csv(&runs).unwrap();
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let rows: Vec<RunRecord> = reader.deserialize().collect::<std::result::Result<_, _>>().unwrap();
        assert_eq!(rows.len(), runs.len());
        assert_eq!(rows[0], runs[0].record);
        assert!(progress_csv(&runs).unwrap().starts_with("instance_id,"));
        assert_eq!(plots(&runs).len(), 4);
    }

    #[test]
    fn failures_stay_in_their_row() {
        let runs = run(&BenchConfig { range: 5, ..small() });
        assert_eq!(runs.len(), 8);
        for r in &runs {
            assert_eq!(r.record.status, "error");
            assert!(r.record.error.as_deref().is_some_and(|e| e.contains("data range")));
        }
    }
}
