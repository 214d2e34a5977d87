//! The `solwave` binary: exit codes, layering of settings and artifacts.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn solwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_solwave"))
        .args(args)
        .env_remove("SOLWAVE_JOBS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn summary(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

const QUICK: &[&str] = &["--points", "256", "--half-length", "30", "--starts", "gaussian"];

#[test]
fn fast_verify_passes() {
    let o = solwave(&["verify", "--fast"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.lines().any(|l| l.starts_with("PASS  closed form: symmetric pair")));
    assert!(!out.contains("FAIL  "));
}

#[test]
fn corrupted_amplitude_fails_verify_with_names() {
    let o = solwave(&["verify", "--fast", "--amplitude-factor", "1.01"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("FAILED: closed form: symmetric pair, omega = 1"), "{err}");
    assert!(stdout(&o).contains("FAIL  closed form: symmetric pair"));
}

#[test]
fn configuration_errors_exit_with_two() {
    let cases: &[&[&str]] = &[
        &["groundstate", "--s", "-1", "--t", "1"],
        &["groundstate", "--set", "minimizer.bogus=1"],
        &["groundstate", "--set", "not-an-assignment"],
        &["groundstate", "--config", "/nonexistent/config.json"],
        &["groundstate", "--params", "{\"alpha\": 1"],
        &["evolve", "--family", "symmetric-pair", "--omega", "1", "--params",
          "{\"alpha\":1,\"beta\":1,\"p\":5,\"r\":4,\"couplings\":[{\"tau\":1,\"q\":2}]}"],
        &["stability", "--delta", "-0.1"],
        &["bogus-command"],
    ];
    for args in cases {
        let o = solwave(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(stderr(&o).contains("error"), "{args:?}");
    }
}

#[test]
fn numerical_failure_exits_with_three() {
    let mut args = vec!["groundstate", "--s", "2", "--t", "2", "--max-iter", "3"];
    args.extend(QUICK);
    let o = solwave(&args);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("did not converge"));
}

#[test]
fn jobs_come_from_environment_unless_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let base = ["rearrange-check", "--samples", "2", "--points", "256", "--out", out];
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_solwave"));
        c.args(base).args(extra).env_remove("SOLWAVE_JOBS");
        if let Some(v) = env {
            c.env("SOLWAVE_JOBS", v);
        }
        c.output().unwrap()
    };
    assert_eq!(run(Some("3"), &[]).status.code(), Some(0));
    assert_eq!(summary(dir.path())["config"]["jobs"], 3);
    assert_eq!(run(Some("3"), &["--jobs", "2"]).status.code(), Some(0));
    assert_eq!(summary(dir.path())["config"]["jobs"], 2);
    assert_eq!(run(Some("0"), &[]).status.code(), Some(2));
    assert_eq!(run(Some("many"), &[]).status.code(), Some(2));
}

#[test]
fn flags_override_set_which_overrides_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"constraints": {"s": 1.0, "t": 1.5}, "minimizer": {"tol": 1e-6}}"#).unwrap();
    let out = dir.path().join("out");
    let common = [
        "groundstate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--set",
        "constraints.s=1.25",
        "--set",
        "constraints.t=1.75",
    ];
    let mut args = common.to_vec();
    args.extend(QUICK);
    args.extend(["--t", "2"]);
    let o = solwave(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let config = &summary(&out)["config"];
    assert_eq!(config["constraints"]["s"], 1.25);
    assert_eq!(config["constraints"]["t"], 2.0);
    assert_eq!(config["minimizer"]["tol"], 1e-6);
    assert_eq!(config["minimizer"]["max_iter"], 20000);
}

#[test]
fn groundstate_writes_profiles_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["groundstate", "--s", "2", "--t", "2", "--out", dir.path().to_str().unwrap()];
    args.extend(QUICK);
    let o = solwave(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for name in ["profile_u.csv", "profile_v.csv", "summary.json"] {
        assert!(stdout(&o).contains(&format!("wrote {}", dir.path().join(name).display())));
    }
    let csv = std::fs::read_to_string(dir.path().join("profile_u.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,re,im"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 256);
    assert!((rows[0][0] + 30.0).abs() < 1e-12);
    let dx = 60.0 / 256.0;
    let mass: f64 = rows.iter().map(|r| r[1] * r[1] + r[2] * r[2]).sum::<f64>() * dx;
    assert!((mass - 2.0).abs() < 1e-12, "{mass}");
    let s = summary(dir.path());
    assert_eq!(s["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(s["config"]["command"], "groundstate");
    assert_eq!(s["result"]["converged"], true);
    assert!(s["result"]["theta"].as_f64().unwrap() < 0.0);
}

#[test]
fn evolve_snapshots_and_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let o = solwave(&[
        "evolve", "--family", "symmetric-pair", "--omega", "1", "--horizon", "0.5", "--dt", "1e-3",
        "--stride", "100", "--snapshots", "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let traj = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let mut lines = traj.lines();
    assert_eq!(lines.next(), Some("t,q_u,q_v,h"));
    assert_eq!(lines.count(), 6);
    for name in ["initial_u.csv", "initial_v.csv", "final_u.csv", "final_v.csv"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
}

#[test]
fn evolve_reads_field_files_written_by_groundstate() {
    let dir = tempfile::tempdir().unwrap();
    let gs = dir.path().join("gs");
    let mut args = vec!["groundstate", "--s", "2", "--t", "2", "--out", gs.to_str().unwrap()];
    args.extend(QUICK);
    assert_eq!(solwave(&args).status.code(), Some(0));
    let (u, v) = (gs.join("profile_u.csv"), gs.join("profile_v.csv"));
    let ev = dir.path().join("ev");
    let o = solwave(&[
        "evolve", "--family", "file", "--initial-u", u.to_str().unwrap(), "--initial-v", v.to_str().unwrap(),
        "--points", "256", "--half-length", "30", "--horizon", "0.1", "--out", ev.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = summary(&ev);
    assert!(s["result"]["drift_q_u"].as_f64().unwrap() < 1e-12);
    let wrong = solwave(&[
        "evolve", "--family", "file", "--initial-u", u.to_str().unwrap(), "--initial-v", v.to_str().unwrap(),
        "--horizon", "0.1",
    ]);
    assert_eq!(wrong.status.code(), Some(2), "grid mismatch: {}", stderr(&wrong));
}

#[test]
fn repeated_runs_are_identical() {
    let run = || {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut args = vec!["solwave", "groundstate", "--s", "1.5", "--t", "2.5", "--starts", "random,gaussian"];
        args.extend(&QUICK[..4]);
        let code = solwave::cli::main_with(args, &mut out, &mut err);
        assert_eq!(code, 0, "{}", String::from_utf8_lossy(&err));
        out
    };
    assert_eq!(run(), run());
}
