//! End-to-end runs of the `cfex` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cfex::bench::RunRecord;
use cfex::report::ResultDoc;
use cfex_core::instances::{parse_kplib, KplibFormat};
use cfex_core::{check_strong, check_weak, CeStatus, FavoredSpace, Kind, PresentProblem};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn cfex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cfex")).args(args).output().expect("cfex runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn example1() -> String {
    data("example1.cfex").display().to_string()
}

fn solve_doc(args: &[&str]) -> (i32, ResultDoc) {
    let out = cfex(args);
    let doc = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(&out)));
    (out.status.code().unwrap(), doc)
}

#[test]
fn solve_example_weak_and_strong() {
    let (code, doc) = solve_doc(&["solve", "--instance", &example1(), "--kind", "weak", "--mode", "constraint"]);
    assert_eq!(code, 0);
    assert_eq!(doc.schema, 1);
    assert_eq!(doc.result.cost, Some(1));
    let (code, doc) = solve_doc(&["solve", "--instance", &example1(), "--kind", "strong"]);
    assert_eq!(code, 0);
    assert_eq!(doc.result.cost, Some(2));
}

#[test]
fn json_results_recheck() {
    let p = PresentProblem::new(vec![1, 2, 2], vec![1, 3, 2], 3, vec![]).unwrap();
    let d = FavoredSpace::PositiveFix(vec![2]);
    let dir = tempfile::tempdir().unwrap();
    for kind in ["weak", "strong"] {
        let path = dir.path().join(format!("{kind}.json"));
        let out = cfex(&["solve", "--instance", &example1(), "--kind", kind, "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
        let doc: ResultDoc = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let params = doc.result.params.unwrap();
        let check = match doc.result.kind {
            Kind::Weak => check_weak(&p, &d, &params),
            Kind::Strong => check_strong(&p, &d, &params),
        };
        assert!(check.unwrap().holds, "{kind}");
    }
}

#[test]
fn zero_time_limit_exits_with_budget_status() {
    let (code, doc) = solve_doc(&["solve", "--instance", &example1(), "--time-limit", "0"]);
    assert_eq!(code, 3);
    assert_eq!(doc.result.status, CeStatus::BudgetExceeded);
    assert_eq!(doc.result.params, None);
    assert_eq!(doc.result.cost, None);
}

#[test]
fn infeasible_exit_code() {
    let (code, doc) = solve_doc(&["solve", "--instance", &example1(), "--mutable", "mode=constraint;pct=0"]);
    assert_eq!(code, 2);
    assert_eq!(doc.result.status, CeStatus::Infeasible);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(cfex(&["solve", "--instance", "/no/such/file"]).status.code(), Some(1));
    assert_eq!(cfex(&["solve", "--instance", &example1(), "--favored", "fix*:1"]).status.code(), Some(1));
    assert_eq!(cfex(&["solve", "--frobnicate"]).status.code(), Some(1));
    let table1 = data("table1.kp").display().to_string();
    assert_eq!(cfex(&["solve", "--instance", &table1]).status.code(), Some(1));
}

#[test]
fn verify_example_and_map() {
    let dir = tempfile::tempdir().unwrap();
    let map = dir.path().join("map.csv");
    let out = cfex(&["verify", "--instance", &example1(), "--map-out", map.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "AGREE weak=1 strong=2");
    let mut reader = csv::Reader::from_path(&map).unwrap();
    let labels: Vec<String> = reader.records().map(|r| r.unwrap()[7].to_string()).collect();
    assert_eq!(labels.len(), 25);
    assert_eq!(labels.iter().filter(|l| *l == "strong").count(), 9);
    assert_eq!(labels.iter().filter(|l| *l == "weak").count(), 5);
    let svg = std::fs::read_to_string(map.with_extension("svg")).unwrap();
    assert!(svg.trim_end().ends_with("</svg>"));
}

#[test]
fn verify_degenerate_space_agrees() {
    let out = cfex(&["verify", "--instance", &example1(), "--mutable", "pct=0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "AGREE weak=none strong=none");
}

#[test]
fn verify_refuses_large_grids() {
    let out = cfex(&["verify", "--instance", &example1(), "--max-grid", "10"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ceiling"));
}

#[test]
fn verify_random_batch() {
    let out = cfex(&["verify", "--random", "100", "--seed", "11", "--max-grid", "20000"]);
    assert_eq!(stdout(&out).trim(), "AGREE 100/100");
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn gen_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = cfex(&[
            "gen",
            "--n",
            "10",
            "--count",
            "3",
            "--seed",
            "7",
            "--correlation",
            "strong",
            "--range",
            "1000",
            "--out-dir",
            dir.path().to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let mut names: Vec<_> = std::fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 4);
    for name in &names {
        let x = std::fs::read(a.path().join(name)).unwrap();
        assert_eq!(x, std::fs::read(b.path().join(name)).unwrap());
        if name.to_str().unwrap().ends_with(".kp") {
            let raw = parse_kplib(std::str::from_utf8(&x).unwrap(), KplibFormat::ProfitWeight).unwrap();
            assert_eq!(raw.n(), 10);
            assert!(raw.items.iter().all(|&(c, w)| c - w == 100));
        }
    }
    let manifest = std::fs::read_to_string(a.path().join("manifest.csv")).unwrap();
    assert_eq!(manifest.lines().count(), 4);
}

#[test]
fn gen_reports_unwritable_directories() {
    let file = tempfile::NamedTempFile::new().unwrap();
    let out = cfex(&["gen", "--n", "3", "--out-dir", file.path().join("sub").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bench_rows_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("runs.csv");
    let out = cfex(&[
        "bench",
        "--sizes",
        "6",
        "--per-cell",
        "5",
        "--kinds",
        "weak,strong",
        "--jobs",
        "4",
        "--out",
        csv_path.to_str().unwrap(),
        "--progress-out",
        dir.path().join("progress.csv").to_str().unwrap(),
        "--svg-dir",
        dir.path().join("svg").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows: Vec<RunRecord> =
        csv::Reader::from_path(&csv_path).unwrap().deserialize().collect::<Result<_, _>>().unwrap();
    assert_eq!(rows.len(), 20);
    for r in &rows {
        if r.status == "optimal" {
            assert_eq!(r.verified, Some(true), "{}", r.instance_id);
        }
    }
    for name in ["runtime.svg", "cuts.svg", "progress_weak.svg", "progress_strong.svg"] {
        assert!(dir.path().join("svg").join(name).exists(), "{name}");
    }
}
