//! The `xychain` binary: exit codes, output files and their formats.

use std::path::Path;
use std::process::{Command, Output};

use xychain::scan::ScanResult;

fn xychain(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xychain")).args(args).output().expect("binary runs")
}

fn read(path: &Path) -> ScanResult {
    let file = std::fs::File::open(path).unwrap();
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => ScanResult::read_json(file).unwrap(),
        _ => ScanResult::read_csv(file).unwrap(),
    }
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["ed-check", "--n", "3", "--gamma", "1", "--h", "0.5"][..],
        &["ed-check", "--n", "15", "--gamma", "1", "--h", "0.5"],
        &["chsh-scan", "--gamma", "0.5", "--h-min", "2", "--h-max", "1"],
        &["chsh-scan", "--gamma", "0.5", "--h-steps", "0"],
        &["quench", "--gamma", "0.5", "--h0", "0.5", "--hf", "0", "--samples", "1"],
        &["quench", "--gamma", "0.5", "--h0", "0.5", "--hf", "0", "--t-max", "150"],
        &["mermin-scan", "--gamma", "0.5", "--config", "1"],
        &["chsh-scan", "--gamma", "0.5", "--format", "xml"],
    ] {
        let out = xychain(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn isotropic_chain_saturates_the_local_bound_above_the_transition() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("xx.csv");
    let out = xychain(&[
        "chsh-scan", "--gamma", "0", "--h-min", "1", "--h-max", "3", "--h-steps", "21", "--r", "1",
        "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let scan = read(&path);
    assert_eq!(scan.rows.len(), 21);
    assert_eq!(scan.column("h")[0], 1.0 + 1e-6);
    for b in scan.column("chsh_max") {
        assert!((b - 2.0).abs() < 1e-9, "{b}");
    }
}

#[test]
fn csv_and_json_outputs_agree() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["chsh-scan", "--gamma", "0.5", "--h-steps", "31", "--workers", "2"];
    let csv = dir.path().join("scan.csv");
    let json = dir.path().join("scan.json");
    assert!(xychain(&[&base[..], &["--out", csv.to_str().unwrap()]].concat()).status.success());
    assert!(xychain(&[&base[..], &["--format", "json", "--out", json.to_str().unwrap()]].concat())
        .status
        .success());
    let (a, b) = (read(&csv), read(&json));
    assert_eq!(a, b);
    assert_eq!(a.columns, ["gamma", "h", "r", "chsh_max", "concurrence", "mz", "t_xy"]);
    // grid order: h outer, R inner
    assert_eq!(a.rows.len(), 31 * 3);
    assert_eq!(a.column("r")[..4], [1.0, 2.0, 3.0, 1.0]);

    let mut rewritten = Vec::new();
    b.write_json(&mut rewritten).unwrap();
    assert_eq!(rewritten, std::fs::read(&json).unwrap());
}

#[test]
fn output_is_deterministic() {
    let args = ["mermin-scan", "--gamma", "0.5", "--h-min", "0.5", "--h-max", "2", "--h-steps", "4", "--config", "1,1"];
    let (a, b) = (xychain(&args), xychain(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn mermin_rows_respect_their_bounds() {
    let out = xychain(&[
        "mermin-scan", "--gamma", "0.5", "--gamma", "1", "--h-min", "0", "--h-max", "3", "--h-steps", "7",
        "--format", "json",
    ]);
    assert!(out.status.success());
    let scan = ScanResult::read_json(&out.stdout[..]).unwrap();
    assert_eq!(scan.rows.len(), 2 * 7 * 3);
    let (lb, max, ub) = (scan.column("mermin_lb"), scan.column("mermin_max"), scan.column("mermin_ub"));
    for i in 0..max.len() {
        assert!(lb[i] <= max[i] + 1e-9 && max[i] <= ub[i] + 1e-9, "row {i}");
        assert!(max[i] <= 2.0 + 1e-9);
    }
    let last = scan
        .rows
        .iter()
        .rev()
        .find(|r| r["gamma"].as_f64() == Some(0.5) && r["a"] == 1usize.into() && r["b"] == 1usize.into())
        .unwrap();
    assert_eq!(last["h"].as_f64(), Some(3.0));
    assert!(last["mermin_max"].as_f64().unwrap() > 1.99);
}

#[test]
fn quench_reports_the_equilibrium_gap() {
    let out = xychain(&["quench", "--gamma", "0.5", "--h0", "0.5", "--hf", "0", "--t-max", "40", "--samples", "401"]);
    assert!(out.status.success());
    let scan = ScanResult::read_csv(&out.stdout[..]).unwrap();
    assert_eq!(scan.rows.len(), 401);
    assert!(scan.report["gap"].as_f64().unwrap() > 0.1);
    for key in ["tail_average", "equilibrium_value", "stationary_value", "tail_start", "tail_samples"] {
        assert!(scan.report.contains_key(key), "{key}");
    }

    let flat = xychain(&["quench", "--gamma", "0.5", "--h0", "0.5", "--hf", "0.5", "--t-max", "10", "--samples", "201"]);
    let scan = ScanResult::read_csv(&flat.stdout[..]).unwrap();
    assert!(scan.report["gap"].as_f64().unwrap() < 1e-10);
    let b = scan.column("chsh_max");
    assert!(b.iter().all(|&v| v == b[0]));
}

#[test]
fn ed_check_passes_away_from_the_transition() {
    for (gamma, h) in [("1", "0.5"), ("0.5", "2")] {
        let out = xychain(&["ed-check", "--n", "12", "--gamma", gamma, "--h", h]);
        assert_eq!(out.status.code(), Some(0));
        let scan = ScanResult::read_csv(&out.stdout[..]).unwrap();
        assert_eq!(scan.rows.len(), 21);
        assert!(scan.rows.iter().all(|r| r["pass"] == "true".into()));
    }
}

#[test]
fn ed_check_failure_still_writes_the_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ed.json");
    let out = xychain(&[
        "ed-check", "--n", "6", "--gamma", "1", "--h", "1", "--max-diff", "1e-6", "--format", "json", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let scan = read(&path);
    assert!(scan.rows.iter().any(|r| r["pass"] == "false".into()));
}
