//! End-to-end runs of the `dzeros` binary.

use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, cmd: &str, config: &str, extra: &[&str]) -> Output {
    let cfg = dir.join(format!("{cmd}.json"));
    std::fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_dzeros"))
        .arg(cmd)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .env("DZEROS_THREADS", "1")
        .output()
        .unwrap()
}

fn json(dir: &Path, name: &str) -> serde_json::Value {
    let text = std::fs::read_to_string(dir.join("out").join(name)).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn cantor_writes_criteria_and_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), "cantor", r#"{"spec": {"ratio": 0.25, "depth": 6}, "terms": 1024}"#, &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let crit = json(dir.path(), "cantor_criteria.json");
    assert_eq!(crit["criteria"]["valid"], true);
    // ℓ_n = 2π 4^{-n}: Σ 2^{-n} log 1/ℓ_n converges, so the capacity is positive
    assert_eq!(crit["criteria"]["capacity"]["verdict"], "converges");
    assert_eq!(crit["criteria"]["capacity_zero"], false);
    let set = json(dir.path(), "cantor_set.json");
    assert_eq!(set["arcs"].as_array().unwrap().len(), 64);
    let csv = std::fs::read_to_string(dir.path().join("out/cantor_capacity.csv")).unwrap();
    assert!(csv.starts_with("cutoff,sum\n"));
}

#[test]
fn capacity_curve_for_a_point() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"set": {"kind": "points", "points": [0.0]}, "t_grid": {"from": 1e-4, "to": 1e-1, "count": 4}, "solver": {"cells": 40}}"#;
    let out = run(dir.path(), "capacity", cfg, &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(dir.path(), "capacity.json");
    assert_eq!(report["violations"], 0);
    let csv = std::fs::read_to_string(dir.path().join("out/capacity.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,cap,upper_bound"));
    // 17 significant digits: one leading digit, 16 after the point
    let first = lines.next().unwrap();
    let mantissa = first.split(',').next().unwrap().split('e').next().unwrap();
    assert_eq!(mantissa.len(), 18, "{first}");
}

#[test]
fn full_circle_capacity_prints_inf() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"set": {"kind": "full"}, "t": [0.5], "solver": {"cells": 16}}"#;
    let out = run(dir.path(), "capacity", cfg, &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("out/capacity.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().contains(",inf,"), "{csv}");
}

#[test]
fn carleson_check_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"random": {"instances": 5}}"#;
    let a = run(dir.path(), "carleson-check", cfg, &["--seed", "3"]);
    assert_eq!(a.status.code(), Some(0));
    let first = std::fs::read_to_string(dir.path().join("out/carleson.json")).unwrap();
    run(dir.path(), "carleson-check", cfg, &["--seed", "3"]);
    let second = std::fs::read_to_string(dir.path().join("out/carleson.json")).unwrap();
    assert_eq!(first, second);
    run(dir.path(), "carleson-check", cfg, &["--seed", "4"]);
    let other = std::fs::read_to_string(dir.path().join("out/carleson.json")).unwrap();
    assert_ne!(first, other);
}

#[test]
fn carleson_check_explicit_and_coarse_grid() {
    let dir = tempfile::tempdir().unwrap();
    // |f| = 1 on the circle and each Poisson kernel has mean 1, so D(Bf) = D(f) + 1
    let cfg = r#"{"zeros": [[0.5, 0.0]], "f": [[0.0, 0.0], [0.0, 1.0]]}"#;
    let ok = run(dir.path(), "carleson-check", cfg, &[]);
    assert_eq!(ok.status.code(), Some(0));
    let report = json(dir.path(), "carleson.json");
    assert!((report["rhs"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert!((report["lhs"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    let coarse = r#"{"zeros": [[0.99, 0.0]], "f": [[1.0, 0.0]], "grid": 8}"#;
    let out = run(dir.path(), "carleson-check", coarse, &[]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn zeros_reports_conditions() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"generator": {"name": "shapiro"}, "terms": 1024, "omega": {"family": "power", "exponent": 1.5}, "write_zeros": 8}"#;
    let out = run(dir.path(), "zeros", cfg, &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(dir.path(), "zeros_report.json");
    let conditions = report["conditions"].as_array().unwrap();
    let verdict = |name: &str| {
        conditions
            .iter()
            .find(|c| c["condition"] == name)
            .map(|c| c["verdict"].as_str().unwrap().to_string())
            .unwrap()
    };
    assert_eq!(verdict("blaschke"), "converges");
    assert_eq!(verdict("shapiro_shields"), "converges");
    assert_eq!(json(dir.path(), "sequence.json")["zeros"].as_array().unwrap().len(), 8);
    assert!(dir.path().join("out/partial_sums_theorem1.csv").exists());
}

#[test]
fn exceptional_levels_shrink() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"generator": {"name": "power", "p": 2.0}, "terms": 256, "lambda": [1.0, 10.0, 100.0], "grid": 1024}"#;
    let out = run(dir.path(), "exceptional", cfg, &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(dir.path(), "exceptional.json");
    let m: Vec<f64> = report["levels"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l["measure"].as_f64().unwrap())
        .collect();
    assert!(m[0] >= m[1] && m[1] >= m[2]);
    assert!(dir.path().join("out/cover_bound.csv").exists());
}

#[test]
fn bad_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), "zeros", r#"{"generator": {"name": "nope"}}"#, &[]).status.code(), Some(2));
    assert_eq!(run(dir.path(), "cantor", "not json", &[]).status.code(), Some(2));
    let empty = r#"{"set": {"kind": "arcs", "arcs": []}, "t": [0.1]}"#;
    assert_eq!(run(dir.path(), "capacity", empty, &[]).status.code(), Some(2));
    let missing = Command::new(env!("CARGO_BIN_EXE_dzeros"))
        .args(["cantor", "--config", "/nonexistent/config.json"])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(2));
    let threads = Command::new(env!("CARGO_BIN_EXE_dzeros"))
        .args(["cantor", "--config", "/nonexistent/config.json"])
        .env("DZEROS_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(threads.status.code(), Some(2));
}
