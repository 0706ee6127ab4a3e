use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn critint(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_critint"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn classify_exit_codes_follow_the_verdict() {
    let out = critint(&["classify", "--k", "2", "--mu", "1,5,7", "--eps", "-1"]);
    assert_eq!(out.status.code(), Some(0));
    let c = json(&out);
    assert_eq!(c["schema"], 1);
    assert_eq!(c["verdict"], "Integrable");

    let out = critint(&["classify", "--k", "3", "--mu", "1,4", "--eps", "1"]);
    assert_eq!(out.status.code(), Some(10));
    assert_eq!(json(&out)["reason"], "kimura_contradiction");

    let out = critint(&["classify", "--k", "3", "--mu", "0,1", "--eps", "1"]);
    assert_eq!(out.status.code(), Some(10));
    assert_eq!(json(&out)["reason"], "kovacic_type_iv");
}

#[test]
fn bad_input_exits_one() {
    let out = critint(&["classify", "--k", "3", "--mu", "0.5,1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exact rational"));
    assert_eq!(
        critint(&["classify", "--k", "1", "--mu", "1,2"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        critint(&["classify", "--k", "3", "--mu", "1,2", "--eps", "2"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn certificates_round_trip_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    for mu in ["1,4", "0,1", "-1,2,9", "3,3"] {
        let out = critint(&["classify", "--k", "3", "--mu", mu]);
        let file = dir.path().join("cert.json");
        std::fs::write(&file, &out.stdout).unwrap();
        let v = critint(&["verify", path_str(&file)]);
        assert_eq!(
            v.status.code(),
            Some(0),
            "{mu}: {}",
            String::from_utf8_lossy(&v.stdout)
        );
        assert_eq!(json(&v)["ok"], true);
    }
    let mut c = json(&critint(&["classify", "--k", "3", "--mu", "1,4"]));
    c["verdict"] = "Integrable".into();
    let file = dir.path().join("tampered.json");
    std::fs::write(&file, c.to_string()).unwrap();
    let v = critint(&["verify", path_str(&file)]);
    assert_eq!(v.status.code(), Some(1));
    assert_eq!(json(&v)["ok"], false);
}

#[test]
fn classify_output_is_deterministic() {
    let a = critint(&["classify", "--k", "5", "--mu", "0,2,1/2", "--eps", "-1"]);
    let b = critint(&["classify", "--k", "5", "--mu", "0,2,1/2", "--eps", "-1"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn anve_examples() {
    let d = json(&critint(&[
        "anve", "--k", "3", "--mu", "1,9", "--pivot", "1", "--other", "2",
    ]));
    assert_eq!(d["differences"]["rho"], "3/2");
    assert_eq!(d["differences"]["tau"], "1");
    assert_eq!(d["differences"]["sigma"], "1/2");
    assert_eq!(d["kimura"]["via"], "condition_i");

    let d = json(&critint(&[
        "anve", "--k", "3", "--mu", "1,9", "--pivot", "2", "--other", "1",
    ]));
    assert_eq!(d["differences"]["rho"], "1/6");
    assert_eq!(d["kimura"]["solvable"], false);

    let d = json(&critint(&[
        "anve", "--k", "4", "--mu", "1,1", "--pivot", "1", "--other", "2",
    ]));
    assert_eq!(d["differences"]["rho"], "1/3");

    let out = critint(&[
        "anve", "--k", "3", "--mu", "0,1", "--pivot", "1", "--other", "2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Kovacic"));
}

#[test]
fn kovacic_examples() {
    let v = json(&critint(&["kovacic", "--r", "-3/32;0,0,0,1"]));
    assert_eq!(v["type"], "type_iv");
    let v = json(&critint(&["kovacic", "--r", "1/4; z^2"]));
    assert_eq!(v["type"], "type_ii");
    assert_eq!(v["certificate"]["d"], 0);
    let v = json(&critint(&["kovacic", "--r", "0;1"]));
    assert_ne!(v["type"], "type_iv");
    assert_eq!(
        critint(&["kovacic", "--r", "1;z^2-2"]).status.code(),
        Some(1)
    );
}

#[test]
fn simulate_writes_files_and_reports_conservation() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("traj.csv");
    let report = dir.path().join("drift.json");
    let args = [
        "simulate",
        "--k",
        "2",
        "--eps",
        "-1",
        "--mu",
        "1,1",
        "--x0",
        "1,0,0,1",
        "--dt",
        "1e-3",
        "--T",
        "20",
        "--monitor",
        "H,L12",
        "--out",
        path_str(&csv),
        "--report",
        path_str(&report),
    ];
    let out = critint(&args);
    assert_eq!(out.status.code(), Some(0));
    let drift: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(drift[1]["observable"], "L12");
    assert!(drift[1]["relative"].as_f64().unwrap() < 1e-8);
    let first = std::fs::read_to_string(&csv).unwrap();
    assert!(first.starts_with("t,u1,u2,v1,v2,H\n"));
    assert_eq!(first.lines().count(), 20_002);

    critint(&args);
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), first);
    let leftovers = std::fs::read_dir(dir.path()).unwrap().count();
    assert_eq!(leftovers, 2, "temporary files left behind");
}

#[test]
fn simulate_escape_keeps_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("escape.csv");
    let out = critint(&[
        "simulate",
        "--k",
        "2",
        "--eps",
        "1",
        "--mu",
        "1",
        "--x0",
        "2,1",
        "--dt",
        "1e-3",
        "--T",
        "10",
        "--out",
        path_str(&csv),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["error"]["kind"], "escape");
    assert!(std::fs::read_to_string(&csv).unwrap().lines().count() > 2);
}

#[test]
fn poincare_without_seeds_is_header_only() {
    let out = critint(&[
        "poincare", "--k", "3", "--eps", "-1", "--mu", "1,4", "--T", "1", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "seed,tcross,u2,v2\n");
}

#[test]
fn poincare_collects_crossings() {
    let out = critint(&[
        "poincare",
        "--k",
        "2",
        "--eps",
        "-1",
        "--mu",
        "1,1",
        "--seeds",
        "0,0.1,0.5,0.2;0,-0.1,0.5,0.2",
        "--T",
        "40",
        "--dt",
        "1e-2",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let seeds: std::collections::BTreeSet<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(seeds.into_iter().collect::<Vec<_>>(), ["0", "1"]);
}

#[test]
fn quadrature_cross_check() {
    let out = critint(&[
        "quadrature",
        "--k",
        "3",
        "--eps",
        "1",
        "--mu",
        "1",
        "--h",
        "0.3333333333333333",
        "--ua",
        "0",
        "--ub",
        "0.9",
        "--cross-check",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["relative_deviation"].as_f64().unwrap() <= 1e-6);
    let out = critint(&[
        "quadrature",
        "--k",
        "3",
        "--mu",
        "1",
        "--h",
        "0.1",
        "--ua",
        "0.5",
        "--ub",
        "0.5",
    ]);
    assert_eq!(json(&out)["time"], 0.0);
}
