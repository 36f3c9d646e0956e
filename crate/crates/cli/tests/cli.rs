//! Exit-code and output contracts of the `microdss` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn microdss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_microdss"))
        .args(args)
        .output()
        .unwrap()
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("../../scenarios/{name}.json"))
}

#[test]
fn malformed_scenario_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"width":3,"height":2,"rows":["..."]}"#).unwrap();
    let out = microdss(&[
        "run",
        "--scenario",
        bad.to_str().unwrap(),
        "--seed",
        "1",
        "--cycles",
        "5",
        "--policy",
        "none",
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_set_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = microdss(&[
        "run",
        "--scenario",
        scenario("quiet").to_str().unwrap(),
        "--seed",
        "1",
        "--cycles",
        "5",
        "--policy",
        "none",
        "--out",
        dir.path().join("out").to_str().unwrap(),
        "--set",
        "nosuch.key=1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn set_overrides_change_the_kernel() {
    let dir = tempfile::tempdir().unwrap();
    let default_out = dir.path().join("default");
    let tight_out = dir.path().join("tight");
    let cluster = scenario("cluster");
    for (out_dir, extra) in [(&default_out, None), (&tight_out, Some("proximity.dMax=2"))] {
        let mut args = vec![
            "run",
            "--scenario",
            cluster.to_str().unwrap(),
            "--seed",
            "1",
            "--cycles",
            "10",
            "--policy",
            "none",
            "--out",
            out_dir.to_str().unwrap(),
        ];
        if let Some(set) = extra {
            args.push("--set");
            args.push(set);
        }
        assert!(microdss(&args).status.success());
    }
    let default_events = fs::read_to_string(default_out.join("events.jsonl")).unwrap();
    let tight_events = fs::read_to_string(tight_out.join("events.jsonl")).unwrap();
    // Brigades sit 6 cells from the fires: with dMax=2 no opposition links form.
    assert!(default_events.contains("opposition"));
    assert!(!tight_events.contains("opposition"));
}

#[test]
fn replay_parse_error_exits_2_and_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("bad.log");
    fs::write(&log, "(fire#2, fieriness, 1, time, 3)\n").unwrap();
    let out = microdss(&[
        "replay",
        "--log",
        log.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 1"), "stderr was: {stderr}");
    assert!(stderr.contains("localisation"), "stderr was: {stderr}");
}

#[test]
fn casebase_init_then_list_shows_four_half_weight_cases() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cases.json");
    assert!(microdss(&["casebase", "init", "--path", path.to_str().unwrap()])
        .status
        .success());
    let out = microdss(&["casebase", "list", "--path", path.to_str().unwrap()]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 4);
    for line in &lines {
        assert!(line.contains("0.50"), "unexpected weight in {line}");
    }
    assert!(stdout.contains("ATTACK_STRONGEST"));
    assert!(stdout.contains("ATTACK_NEAREST"));
    assert!(stdout.contains("REGROUP"));
    assert!(stdout.contains("HOLD"));
}

#[test]
fn casebase_list_on_empty_base_prints_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.json");
    fs::write(&path, r#"{"version":1,"nextId":0,"cases":[]}"#).unwrap();
    let out = microdss(&["casebase", "list", "--path", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
}

#[test]
fn casebase_version_mismatch_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v2.json");
    fs::write(&path, r#"{"version":2,"nextId":0,"cases":[]}"#).unwrap();
    let out = microdss(&["casebase", "list", "--path", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn dss_without_casebase_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = microdss(&[
        "run",
        "--scenario",
        scenario("quiet").to_str().unwrap(),
        "--seed",
        "1",
        "--cycles",
        "5",
        "--policy",
        "dss",
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dss_creates_a_missing_casebase_from_the_default() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fresh.json");
    let out = microdss(&[
        "run",
        "--scenario",
        scenario("quiet").to_str().unwrap(),
        "--seed",
        "1",
        "--cycles",
        "5",
        "--policy",
        "dss",
        "--casebase",
        path.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(path.exists());
    let events =
        fs::read_to_string(dir.path().join("out").join("events.jsonl")).unwrap();
    assert_eq!(events.lines().count(), 15);
}

#[test]
fn run_summary_line_counts_match_the_log() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = microdss(&[
        "run",
        "--scenario",
        scenario("scattered").to_str().unwrap(),
        "--seed",
        "7",
        "--cycles",
        "12",
        "--policy",
        "baseline",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let events = fs::read_to_string(out_dir.join("events.jsonl")).unwrap();
    assert_eq!(events.lines().count(), 12 * 3);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["recommendationsIssued"], 0);
    assert_eq!(summary["perCycleLogPath"], "events.jsonl");
    assert!(summary["finalMetrics"]["intact"].is_number());
}
