//! Behavioural tests for the `qicli` binary: exit codes, flags, and
//! report invariants that do not need golden files.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn qicli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qicli"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 report")
}

#[test]
fn entropy_reports_theorem_values() {
    let out = qicli(&["entropy", fixture("state_qubit_tracial.json").to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("S = 0.693147181"));
    assert!(text.contains("H_closed = 1.38629436"));
    assert!(text.contains("algebra_rank = 2"));
    assert!(text.contains("algebra_dim = 4"));
    assert!(text.contains("units = nats"));
}

#[test]
fn entropy_pure_state_is_zero() {
    let out = qicli(&["entropy", fixture("state_qubit_pure.json").to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("S = 0\n"));
    assert!(text.contains("H_closed = 0\n"));
}

#[test]
fn bits_flag_rescales() {
    let out = qicli(&[
        "entropy",
        "--bits",
        fixture("state_qubit_tracial.json").to_str().unwrap(),
    ]);
    let text = stdout(&out);
    assert!(text.contains("S = 1\n"));
    assert!(text.contains("H_closed = 2\n"));
    assert!(text.contains("units = bits"));
}

#[test]
fn json_flag_emits_parseable_json_with_same_keys() {
    let human = stdout(&qicli(&[
        "entropy",
        fixture("state_block.json").to_str().unwrap(),
    ]));
    let json = stdout(&qicli(&[
        "entropy",
        "--json",
        fixture("state_block.json").to_str().unwrap(),
    ]));
    let v: serde_json::Value = serde_json::from_str(&json).expect("valid json");
    for line in human.lines() {
        let key = line.split(" = ").next().unwrap();
        assert!(v.get(key).is_some(), "missing key {key} in json report");
    }
    assert!((v["H_closed"].as_f64().unwrap() - 1.56071041).abs() < 1e-8);
}

#[test]
fn relent_commuting_case() {
    let out = qicli(&[
        "relent",
        fixture("state_qubit_pure.json").to_str().unwrap(),
        fixture("state_qubit_tracial.json").to_str().unwrap(),
    ]);
    let text = stdout(&out);
    assert!(text.contains("R_bs = 0.693147181"));
    assert!(text.contains("R_umegaki = 0.693147181"));
    assert!(text.contains("support_ok = true"));
}

#[test]
fn relent_support_failure_is_flagged() {
    let out = qicli(&[
        "relent",
        fixture("state_qubit_tracial.json").to_str().unwrap(),
        fixture("state_qubit_pure.json").to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("R_bs = inf"));
    assert!(text.contains("finite = false"));
    assert!(text.contains("support_ok = false"));
}

#[test]
fn channel_info_depolarizing() {
    let out = qicli(&[
        "channel-info",
        "--seed",
        "3",
        fixture("channel_depolarizing_qubit.json").to_str().unwrap(),
        fixture("state_qubit_tracial.json").to_str().unwrap(),
    ]);
    let text = stdout(&out);
    assert!(text.contains("I_q = "));
    let json = stdout(&qicli(&[
        "channel-info",
        "--json",
        "--seed",
        "3",
        fixture("channel_depolarizing_qubit.json").to_str().unwrap(),
        fixture("state_qubit_tracial.json").to_str().unwrap(),
    ]));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert!(v["I_q"].as_f64().unwrap().abs() < 1e-9);
    assert!(v["I_c"].as_f64().unwrap().abs() < 1e-6);
    assert!((v["I_s"].as_f64().unwrap() + std::f64::consts::LN_2).abs() < 1e-6);
}

#[test]
fn missing_file_is_parse_failure() {
    let out = qicli(&["entropy", "definitely_missing.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_json_is_parse_failure() {
    let dir = std::env::temp_dir().join("qicli_cli_tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("broken.json");
    std::fs::write(&path, "{ this is not json").unwrap();
    let out = qicli(&["entropy", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("parse failure"));
}

#[test]
fn invariant_violation_is_semantic_failure() {
    let dir = std::env::temp_dir().join("qicli_cli_tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("not_tp.json");
    std::fs::write(
        &path,
        r#"{"version":1,"kind":"channel","data":{"shape_in":[2],"shape_out":[2],
            "kraus":[[[[0.9486832980505138,0.0],[0.0,0.0]],[[0.0,0.0],[0.9486832980505138,0.0]]]]}}"#,
    )
    .unwrap();
    let out = qicli(&["capacity", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("trace preserving"));
}

#[test]
fn dimension_guard_has_its_own_exit_code() {
    let out = Command::new(env!("CARGO_BIN_EXE_qicli"))
        .env("QENT_MAX_DIM", "2")
        .args(["entropy", fixture("state_block.json").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn capacity_c_dimension_guard() {
    let dir = std::env::temp_dir().join("qicli_cli_tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("identity5.json");
    // 5-dimensional identity channel: fine for C_q, over the C_c desk guard.
    let mut kraus_rows = Vec::new();
    for i in 0..5 {
        let row: Vec<String> = (0..5)
            .map(|j| format!("[{}.0, 0.0]", if i == j { 1 } else { 0 }))
            .collect();
        kraus_rows.push(format!("[{}]", row.join(",")));
    }
    let doc = format!(
        r#"{{"version":1,"kind":"channel","data":{{"shape_in":[5],"shape_out":[5],"kraus":[[{}]]}}}}"#,
        kraus_rows.join(",")
    );
    std::fs::write(&path, doc).unwrap();
    let out = qicli(&[
        "capacity",
        "--with-cc",
        "--restarts",
        "2",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
}
