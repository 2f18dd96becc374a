use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str], envs: &[(&str, &Path)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rwre-lab"));
    cmd.args(args).env_remove("RWRE_LAB_OUTPUT_DIR").env_remove("RWRE_LAB_WORKERS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const SMALL_TRAPS: &str = r#"{"experiment": "hydro_traps", "seed": 3, "params": {"a_ns": [10, 100], "replicas": 10}}"#;

#[test]
fn unknown_key_exits_1_with_its_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"experiment": "hydro_traps", "params": {"replica": 3}}"#);
    let out = lab(&["validate", &cfg], &[]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("params.replica"), "{err}");
}

#[test]
fn validate_prints_the_resolved_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"experiment": "speed"}"#);
    let out = lab(&["validate", &cfg], &[]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["experiment"], "speed");
    assert!(v["params"].is_object());
}

#[test]
fn run_then_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", SMALL_TRAPS);
    let res = dir.path().join("res");
    let out = lab(&["run", &cfg, "--output-dir", res.to_str().unwrap(), "--workers", "1"], &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(res.join("manifest.json").is_file() && res.join("summary.csv").is_file());
    let out = lab(&["summary", res.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn failed_threshold_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMALL_TRAPS.replace(r#""replicas": 10"#, r#""replicas": 10, "slope_range": [5, 6]"#);
    let cfg = write(dir.path(), "c.json", &text);
    let res = dir.path().join("res");
    let out = lab(&["run", &cfg, "--output-dir", res.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL hydro_traps.variance_slope"));
    assert!(res.join("manifest.json").is_file());
    assert_eq!(lab(&["summary", res.to_str().unwrap()], &[]).status.code(), Some(2));
}

#[test]
fn errors_leave_no_output_behind() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.csv");
    let text = format!(
        r#"{{"experiment": "hydro_traps", "params": {{"traps": {{"file": {{"path": {:?}}}}}}}}}"#,
        missing.to_str().unwrap()
    );
    let cfg = write(dir.path(), "c.json", &text);
    let res = dir.path().join("res");
    let out = lab(&["run", &cfg, "--output-dir", res.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!res.exists());
    assert!(!dir.path().join("res.partial").exists());
}

#[test]
fn output_dir_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", SMALL_TRAPS);
    let res = dir.path().join("from-env");
    let out = lab(&["run", &cfg], &[("RWRE_LAB_OUTPUT_DIR", &res), ("RWRE_LAB_WORKERS", Path::new("2"))]);
    assert_eq!(out.status.code(), Some(0));
    let manifest: serde_json::Value = serde_json::from_slice(&std::fs::read(res.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["workers"], 2);
}
