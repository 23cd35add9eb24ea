use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn mulop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mulop")).args(args).output().expect("spawn mulop")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn analyze_reports_a_plateau_flat() {
    let out = mulop(&["analyze", "--space", "64", "--multiplier", "plateau(0.25,0.5)", "--theta", "0.1"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["schema"], 1);
    assert_eq!(report["command"], "analyze");
    assert_eq!(report["flats"].as_array().unwrap().len(), 1);
}

#[test]
fn witness_flat_is_a_verdict_failure() {
    let out = mulop(&["witness", "--space", "256", "--multiplier", "plateau(0.25,0.5)", "--theta", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["stop"]["kind"], "FlatAtScale");
}

#[test]
fn precondition_and_config_errors_exit_3() {
    for args in [
        &["witness", "--space", "64", "--operator", "reversal"][..],
        &["analyze", "--multiplier", "cosine"][..],
        &["analyze", "--space", "no-such-file.json"][..],
        &["witness", "--space", "64", "--p", "0.5"][..],
    ] {
        let out = mulop(args);
        assert_eq!(out.status.code(), Some(3), "{args:?}");
        let report = json(&out);
        assert_eq!(report["schema"], 1);
        assert!(report["error"]["message"].is_string());
    }
}

#[test]
fn out_directory_receives_report_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let out = mulop(&[
        "witness", "--space", "512", "--operator", "scaled-multiplier", "--steps", "4", "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(saved, json(&out));
    let trace = std::fs::read_to_string(out_dir.join("trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 5);
}

#[test]
fn compact_decay_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = mulop(&["compact-decay", "--n", "512", "--terms", "16", "--out", dir.path().to_str().unwrap()]);
    let report = json(&out);
    assert_eq!(report["command"], "compact-decay");
    assert!(Path::new(&dir.path().join("decay.csv")).exists());
    assert_eq!(out.status.code(), Some(if report["pass"] == true { 0 } else { 2 }));
}

#[test]
fn same_seed_same_bytes() {
    let args = ["commutant-check", "--grid", "8x8", "--alphas", "6", "--seed", "42"];
    let (a, b) = (mulop(&args), mulop(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let other = mulop(&["commutant-check", "--grid", "8x8", "--alphas", "6", "--seed", "43"]);
    assert_ne!(a.stdout, other.stdout);
}
