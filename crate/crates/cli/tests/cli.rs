use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn qreg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qreg"))
        .args(args)
        .output()
        .expect("qreg runs")
}

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/running_example.csv")
}

fn report(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

// exhaustive optimum of the fixture, through its first and fourth points
const PINNED: f64 = 5.711346384538487;

#[test]
fn solve_running_example_with_oracle() {
    let input = fixture();
    let out = qreg(&["solve", "--input", input.to_str().unwrap(), "--tau", "0.5", "--algo", "oracle"]);
    let r = report(&out);
    assert_eq!(r["n"], 7);
    assert_eq!(r["d"], 2);
    assert_eq!(r["algorithm"], "oracle");
    assert!((r["objective"].as_f64().unwrap() - PINNED).abs() < 1e-9);
    assert_eq!(r["support_ids"], serde_json::json!([0, 3]));
}

#[test]
fn every_algorithm_reports_the_same_objective() {
    let input = fixture();
    for algo in ["oracle", "neighbor", "kset", "randqr"] {
        let out = qreg(&["solve", "--input", input.to_str().unwrap(), "--algo", algo, "--json"]);
        assert_eq!(String::from_utf8_lossy(&out.stdout).trim().lines().count(), 1);
        let r = report(&out);
        assert!((r["objective"].as_f64().unwrap() - PINNED).abs() < 1e-9, "{algo}");
    }
}

#[test]
fn seeds_agree_on_objective() {
    let input = fixture();
    let objective = |seed: &str| {
        let out = qreg(&["solve", "--input", input.to_str().unwrap(), "--algo", "randqr", "--seed", seed]);
        report(&out)["objective"].as_f64().unwrap()
    };
    assert_eq!(objective("1"), objective("2"));
}

#[test]
fn report_round_trips() {
    let input = fixture();
    let out = qreg(&["solve", "--input", input.to_str().unwrap(), "--json"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let parsed: qreg_core::RunReport = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string(&parsed).unwrap(), text.trim());
}

#[test]
fn bad_quantile_exits_2() {
    let input = fixture();
    let out = qreg(&["solve", "--input", input.to_str().unwrap(), "--tau", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--tau"));
}

#[test]
fn data_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "x,y\n1,2\n3,oops\n").unwrap();
    let out = qreg(&["solve", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let missing = dir.path().join("missing.csv");
    assert_eq!(qreg(&["solve", "--input", missing.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn flag_combinations_are_checked() {
    let input = fixture();
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.csv");
    let out = qreg(&["solve", "--input", input.to_str().unwrap(), "--algo", "kset", "--trace", trace.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn trace_and_level_files() {
    let input = fixture();
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let level = dir.path().join("level.csv");
    report(&qreg(&["solve", "--input", input.to_str().unwrap(), "--algo", "randqr", "--trace", trace.to_str().unwrap()]));
    let text = std::fs::read_to_string(&trace).unwrap();
    assert!(text.starts_with("iteration,v,s_in,decision,best_objective,lo,hi"));
    assert!(text.trim_end().lines().last().unwrap().contains("Optimal"));

    report(&qreg(&["solve", "--input", input.to_str().unwrap(), "--algo", "kset", "--dump-level", level.to_str().unwrap()]));
    let text = std::fs::read_to_string(&level).unwrap();
    assert!(text.starts_with("z1,z2,line_a,line_b"));
    assert!(text.lines().count() > 1);
}

#[test]
fn noiseless_data_fits_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.csv");
    let g = dir.path().join("g.csv");
    for path in [&f, &g] {
        let out = qreg(&["gen", "--n", "7", "--d", "2", "--seed", "1", "--noise", "0", "--out", path.to_str().unwrap()]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&f).unwrap(), std::fs::read(&g).unwrap());
    let r = report(&qreg(&["solve", "--input", f.to_str().unwrap(), "--algo", "oracle"]));
    assert!(r["objective"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn gen_rejects_too_few_points() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.csv");
    let out = qreg(&["gen", "--n", "1", "--d", "2", "--out", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gen_three_dimensional_solves() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.csv");
    assert!(qreg(&["gen", "--n", "20", "--d", "3", "--seed", "4", "--out", f.to_str().unwrap()]).status.success());
    let a = report(&qreg(&["solve", "--input", f.to_str().unwrap(), "--algo", "oracle"]));
    let b = report(&qreg(&["solve", "--input", f.to_str().unwrap(), "--algo", "randqr", "--seed", "3"]));
    assert_eq!(a["d"], 3);
    let (x, y) = (a["objective"].as_f64().unwrap(), b["objective"].as_f64().unwrap());
    assert!((x - y).abs() <= 1e-9 * x.max(1.0));
    let out = qreg(&["solve", "--input", f.to_str().unwrap(), "--algo", "kset"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bench_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("bench.csv");
    let out = qreg(&[
        "bench", "--sizes", "32,64", "--algos", "oracle,kset,randqr", "--reps", "3", "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut rdr = csv::Reader::from_path(&out_path).unwrap();
    let header = rdr.headers().unwrap().clone();
    assert_eq!(
        header.iter().collect::<Vec<_>>(),
        ["algo", "n", "d", "rep", "seed", "wall_ms", "objective", "oracle_gap", "vertices_visited", "iterations"]
    );
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 18);
    assert!(rows.iter().all(|r| r[7].parse::<f64>().unwrap() == 0.0));
}

#[test]
fn bench_sizes_accept_ranges() {
    let out = qreg(&["bench", "--sizes", "16..64", "--algos", "kset"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let ns: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(ns, ["16", "32", "64"]);
}

#[test]
fn bench_rejects_empty_algo_list() {
    assert_eq!(qreg(&["bench", "--sizes", "16", "--algos", ""]).status.code(), Some(2));
    assert_eq!(qreg(&["bench", "--sizes", "16"]).status.code(), Some(2));
}
