use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn resolab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_resolab"))
        .args(args)
        .env_remove("RESOLAB_TOL_SCALE")
        .env("RUST_LOG", "off")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn poles_of_one_d_gamma() {
    let out = resolab(&["poles", "--model", "builtin:oneD-gamma", "--region", "-2,2,-2,0"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["resonance_count"], 2);
    assert_eq!(doc["audit_ok"], true);
    assert_eq!(doc["search"]["resonances"].as_array().unwrap().len(), 2);
}

#[test]
fn eigenvector_at_minus_i_is_case_i_b() {
    let out = resolab(&["theorem2", "--model", "builtin:twoK-oneE", "--check-eigen", "-i"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    let checks = doc["eigen_checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for c in checks {
        assert_eq!(c["case"], "(i)(b)");
        assert_eq!(c["eigenvector"], true);
    }
    assert_eq!(doc["pass"], true);
}

#[test]
fn wrong_k0_is_rejected() {
    let dir = TempDir::new().unwrap();
    let probe = |k0: &str| {
        let d = dir.path().to_str().unwrap();
        resolab(&["theorem2", "--model", "builtin:twoK-oneE", "--check-eigen", "-i", "--k0", k0, "--out", d])
    };
    // not in the kernel of A(−i)
    assert_eq!(probe("1,0").status.code(), Some(1));
    assert_eq!(read_json(&dir.path().join("theorem2.json"))["eigen_checks"][0]["eigenvector"], false);
    assert_eq!(probe("1,2,3").status.code(), Some(2));
    assert_eq!(read_json(&dir.path().join("error.json"))["error"]["kind"], "usage");
}

#[test]
fn bad_model_file_exits_2_with_schema_path() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"name": "bad", "dim_k": 1, "dim_e": 1, "h_e": [[1.0]], "coupling": []}"#).unwrap();
    let out_dir = dir.path().join("out");
    let out = resolab(&["validate", "--model", bad.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = read_json(&out_dir.join("error.json"));
    assert_eq!(err["schema_version"], 1);
    assert_eq!(err["error"]["kind"], "schema");
    assert_eq!(err["error"]["path"], "h_e[0][0]");
    assert_eq!(err["error"]["exit_code"], 2);
}

#[test]
fn stderr_mirror_without_out_dir() {
    let out = resolab(&["validate", "--model", "builtin:no-such-model"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    let line = stderr.lines().find(|l| l.starts_with('{')).expect("json line on stderr");
    let err: Value = serde_json::from_str(line).unwrap();
    assert_eq!(err["error"]["kind"], "unknown-model");
}

#[test]
fn example_round_trips_through_validate() {
    let dir = TempDir::new().unwrap();
    let d = dir.path().to_str().unwrap();
    for name in ["paper-1d", "oneD-gamma", "twoK-oneE", "conjugate-pair"] {
        assert!(resolab(&["example", name, "--out", d]).status.success());
        let file = dir.path().join(format!("{name}.json"));
        let out = resolab(&["validate", "--model", file.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{name}");
        assert_eq!(stdout_json(&out)["model"], name);
    }
}

#[test]
fn invariant_violation_is_reported() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("skew.json");
    let doc = r#"{
      "name": "skew", "dim_k": 1, "dim_e": 2,
      "h_e": [[[0.0, 0.0], [1.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]],
      "coupling": [[{"num": [[1.0, 0.0]], "den": [[0.0, 1.0], [1.0, 0.0]]},
                    {"num": [[1.0, 0.0]], "den": [[0.0, 2.0], [1.0, 0.0]]}]]
    }"#;
    fs::write(&file, doc).unwrap();
    let out = resolab(&["validate", "--model", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let report = stdout_json(&out);
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["name"] == "hermitian" && c["pass"] == false));
}

#[test]
fn reports_are_byte_identical() {
    let run = || {
        let dir = TempDir::new().unwrap();
        let d = dir.path().to_str().unwrap();
        assert!(resolab(&["smatrix", "--model", "builtin:twoK-oneE", "--lambda", "-10,10,21", "--out", d]).status.success());
        assert!(resolab(&["poles", "--model", "builtin:oneD-gamma", "--region", "-2,2,-2,0", "--out", d]).status.success());
        let read = |f: &str| fs::read(dir.path().join(f)).unwrap();
        (read("smatrix.json"), read("smatrix.csv"), read("poles.json"))
    };
    assert_eq!(run(), run());
}

#[test]
fn csv_where_there_is_no_table_is_a_usage_error() {
    let out = resolab(&["lemma", "--model", "builtin:paper-1d", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn decay_csv_starts_at_one() {
    let out = resolab(&["decay", "--t-grid", "0:5:6", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,ReA,ImA,P,ReA_half,ImA_half,P_half");
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(first[0], 0.0);
    assert!((first[3] - 1.0).abs() < 1e-12 && (first[6] - 1.0).abs() < 1e-12);
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn nogo_detects_non_exponential_tail() {
    let out = resolab(&["nogo"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["non_exponential"], true);
}

#[test]
fn conjugate_pair_fails_lemma_and_hypotheses() {
    let lemma = resolab(&["lemma", "--model", "builtin:conjugate-pair"]);
    assert_eq!(lemma.status.code(), Some(1));
    assert!(!stdout_json(&lemma)["inapplicable"].as_array().unwrap().is_empty());
    let t2 = resolab(&["theorem2", "--model", "builtin:conjugate-pair"]);
    assert_eq!(t2.status.code(), Some(1));
    assert_eq!(stdout_json(&t2)["conditions"]["no_conjugate_pairs"], false);
}

#[test]
fn tolerance_scale_must_be_positive() {
    let out = Command::new(env!("CARGO_BIN_EXE_resolab"))
        .args(["poles", "--model", "builtin:oneD-gamma"])
        .env("RESOLAB_TOL_SCALE", "-1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
