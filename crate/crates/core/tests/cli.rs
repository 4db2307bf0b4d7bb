//! End-to-end runs of the `nlinterp` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn nlinterp(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlinterp"))
        .args(args)
        .env("NLINTERP_OUT", out)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_json(p: impl AsRef<Path>) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(p.as_ref()).unwrap()).unwrap()
}

/// All files below `dir` with their contents, sorted by path.
fn tree(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn list_prints_every_check() {
    let dir = tempfile::tempdir().unwrap();
    let o = nlinterp(dir.path(), &["--list"]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    for id in ["pointwise", "norm-equivalence", "hardy", "mean-k", "crandall-liggett", "qlaplace-regularity"] {
        assert!(text.contains(id), "{id} missing from --list");
    }
}

#[test]
fn k_profile_writes_csv_and_versioned_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = nlinterp(dir.path(), &["k-profile", "--op", "scalar:a=2", "--x", "1.5", "--nodes", "65"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("k_profile.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("t,K_over_t"));
    assert_eq!(lines.count(), 65);
    let j = read_json(dir.path().join("k_profile.json"));
    assert_eq!(j["schema_version"], 1);
    assert!(dir.path().join("config.json").exists());
}

#[test]
fn verify_is_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["verify", "mean-k", "--samples", "6", "--epsilon", "0.1", "--seed", "11"];
    let oa = nlinterp(a.path(), &args);
    let ob = nlinterp(b.path(), &args);
    assert!(oa.status.success() && ob.status.success());
    let (ta, tb) = (tree(a.path()), tree(b.path()));
    assert!(!ta.is_empty());
    assert_eq!(ta, tb);
    let summary = read_json(a.path().join("verify/summary.json"));
    assert_eq!(summary["schema_version"], 1);
}

#[test]
fn seed_changes_random_instances() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    nlinterp(a.path(), &["verify", "mean-k", "--samples", "4", "--epsilon", "0.1", "--seed", "1"]);
    nlinterp(b.path(), &["verify", "mean-k", "--samples", "4", "--epsilon", "0.1", "--seed", "2"]);
    assert_ne!(
        fs::read(a.path().join("verify/mean-k/rows.csv")).unwrap(),
        fs::read(b.path().join("verify/mean-k/rows.csv")).unwrap()
    );
}

#[test]
fn out_dir_flag_beats_environment() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let o = nlinterp(
        env_dir.path(),
        &["hardy-norm", "--trials", "8", "--out-dir", flag_dir.path().to_str().unwrap()],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(flag_dir.path().join("hardy_norm.json").exists());
    assert!(!env_dir.path().join("hardy_norm.json").exists());
}

#[test]
fn config_file_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"op": "scalar:a=3", "x": [2.0], "steps": 32}"#).unwrap();
    let out = dir.path().join("out");
    let o = nlinterp(
        &out,
        &["evolve", "--op", "scalar:a=1", "--steps", "8", "--config", cfg.to_str().unwrap()],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let used = read_json(out.join("config.json"));
    assert_eq!(used["steps"], 32);
    let csv = fs::read_to_string(out.join("trajectory.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 33);
}

#[test]
fn unknown_config_field_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"tua": 1.0}"#).unwrap();
    let o = nlinterp(dir.path(), &["k-profile", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn theta_at_least_half_is_rejected_for_subgradient() {
    let dir = tempfile::tempdir().unwrap();
    let o = nlinterp(dir.path(), &["verify", "subgradient", "--space", "theta=0.6,p=2"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("θ < 1/2"), "{}", stderr(&o));
}

#[test]
fn tau_omega_at_least_one_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = nlinterp(dir.path(), &["verify", "pointwise", "--op", "scalar:a=0,omega=2", "--tau", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("τω < 1"), "{}", stderr(&o));
}

#[test]
fn unknown_check_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = nlinterp(dir.path(), &["verify", "no-such-check"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failing_check_exits_one() {
    // four Euler steps cannot reach the 1e-4 tolerance of the exponential formula
    let dir = tempfile::tempdir().unwrap();
    let o = nlinterp(dir.path(), &["verify", "crandall-liggett", "--op", "scalar:a=1", "--steps", "4"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let summary = read_json(dir.path().join("verify/summary.json"));
    assert_eq!(summary["passed"], false);
}

#[test]
fn qlaplace_writes_report_per_sample() {
    let dir = tempfile::tempdir().unwrap();
    let o = nlinterp(dir.path(), &["qlaplace", "--q", "2", "--theta", "0.25", "--n", "16", "--horizon", "0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let reports: Vec<_> = fs::read_dir(dir.path().join("qlaplace"))
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.path().extension().is_some_and(|x| x == "json"))
        .collect();
    assert_eq!(reports.len(), 1);
}

#[test]
fn evolve_defaults_to_seeded_point() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["evolve", "--op", "qlaplace:q=3,n=16", "--steps", "16", "--seed", "5"];
    assert!(nlinterp(a.path(), &args).status.success());
    assert!(nlinterp(b.path(), &args).status.success());
    let ta = fs::read(a.path().join("trajectory.csv")).unwrap();
    assert_eq!(ta, fs::read(b.path().join("trajectory.csv")).unwrap());
}
