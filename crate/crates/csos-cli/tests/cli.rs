use std::process::Command;

use csos_cli::config::ExperimentConfig;
use csos_cli::registry;
use csos_cli::report::{strip_timing, Outcome};

fn csos(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_csos")).args(args).output().expect("binary runs")
}

fn write_cfg(dir: &std::path::Path, text: &str) -> String {
    let p = dir.join("run.cfg");
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn qarith_run_exits_zero_and_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "N = 3\nj = 2\nL = 2\nsuites = qarith\n");
    let out = dir.path().join("out");
    let o = csos(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let json = std::fs::read_to_string(out.join("report.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["config"]["N"], 3);
    assert!(v["summary"]["pass"].as_u64().unwrap() >= 3);
    let csv = std::fs::read_to_string(out.join("degeneracy.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "Q,charge,cluster,R,Pa,Pb,m_E,multiplicity,verdict");
    assert!(String::from_utf8_lossy(&o.stdout).contains("qarith"));
}

#[test]
fn suite_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "N = 3\nj = 2\nL = 2\n");
    let out = dir.path().join("out");
    let o = csos(&["run", "--config", &cfg, "--suite", "weights", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    let suites: Vec<&str> = v["suites"].as_array().unwrap().iter().map(|s| s["suite"].as_str().unwrap()).collect();
    assert_eq!(suites, ["weights"]);
}

#[test]
fn malformed_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "N = 3\nj 2\n");
    assert_eq!(csos(&["run", "--config", &cfg]).status.code(), Some(2));
    let cfg = write_cfg(dir.path(), "N = 3\nj = 5\nL = 2\n");
    assert_eq!(csos(&["run", "--config", &cfg]).status.code(), Some(2));
    assert_eq!(csos(&["run", "--config", "/nonexistent/x.cfg"]).status.code(), Some(2));
    assert_eq!(csos(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn dimension_cap_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "N = 4\nj = 4\nL = 7\n");
    assert_eq!(csos(&["run", "--config", &cfg]).status.code(), Some(3));
    let cfg = write_cfg(dir.path(), "N = 4\nj = 2\nL = 6\nsuites = curve\n");
    assert_eq!(csos(&["run", "--config", &cfg]).status.code(), Some(3));
}

#[test]
fn explain_known_and_unknown() {
    let o = csos(&["explain", "tauY"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("By iteration, we obtain the T-functional relation"));
    let o = csos(&["explain", "bethe"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("anchor:    bethe"));
    assert_eq!(csos(&["explain", "no such identity"]).status.code(), Some(2));
}

#[test]
fn every_entry_is_registered_and_anchored() {
    let cfg = ExperimentConfig::parse("N = 3\nj = 2\nL = 3\nrng_seed = 5\n").unwrap();
    let r = csos_cli::run(&cfg, 2).unwrap();
    for s in &r.suites {
        assert!(s.error.is_none(), "{}: {:?}", s.suite, s.error);
        assert!(!s.entries.is_empty(), "{} is empty", s.suite);
        for e in &s.entries {
            let id = registry::key_for(&e.id).unwrap_or_else(|| panic!("unregistered {}", e.id));
            assert_eq!(id.anchor, e.anchor);
            assert_eq!(id.suite, s.suite, "{} reported by {}", e.id, s.suite);
        }
    }
    assert_eq!(r.summary.fail, 0, "{}", r.table());
}

#[test]
fn anomaly_row_in_ledger() {
    let cfg = ExperimentConfig::parse("N = 3\nj = 2\nL = 6\nQ_list = 1\nsuites = degeneracy\n").unwrap();
    let r = csos_cli::run(&cfg, 1).unwrap();
    let row = r.degeneracy.iter().find(|row| row.verdict == "anomaly").expect("anomaly row");
    assert_eq!((row.q, row.r, row.m_e, row.multiplicity), (1, Some(3), Some(-1), 1));
    let entry_rows = r.suites[0].entries.iter().filter(|e| matches!(e.outcome, Outcome::Cluster(_))).count();
    assert_eq!(entry_rows, r.degeneracy.len());
}

#[test]
fn seed_changes_draws_not_structure() {
    let a = ExperimentConfig::parse("N = 3\nj = 2\nL = 2\nsuites = qarith, weights\nrng_seed = 1\n").unwrap();
    let b = ExperimentConfig::parse("N = 3\nj = 2\nL = 2\nsuites = qarith, weights\nrng_seed = 2\n").unwrap();
    let (ra, rb) = (csos_cli::run(&a, 1).unwrap(), csos_cli::run(&b, 1).unwrap());
    let ids = |r: &csos_cli::report::RunReport| -> Vec<String> {
        r.suites.iter().flat_map(|s| s.entries.iter().map(|e| e.id.clone())).collect()
    };
    assert_eq!(ids(&ra), ids(&rb));
    assert_ne!(strip_timing(&ra.to_json()), strip_timing(&rb.to_json()));
    let again = csos_cli::run(&a, 3).unwrap();
    assert_eq!(strip_timing(&ra.to_json()), strip_timing(&again.to_json()));
}
