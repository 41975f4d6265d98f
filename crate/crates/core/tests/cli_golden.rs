//! Golden tests for the command-line driver: fixed outputs for the
//! documented invocations, byte-stable across runs.

use std::process::{Command, Output};

fn qa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qa"))
        .args(args)
        .env_remove("QA_TRUNC_BOXES")
        .env_remove("QA_TRUNC_DET")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = qa(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn rootdata_golden() {
    let expected = r#"{
  "cartan": [
    "2",
    "-2",
    "-2",
    "2"
  ],
  "comarks": [
    "1",
    "1"
  ],
  "coxeter": "2",
  "d": "1",
  "d_i": [
    "1",
    "1"
  ],
  "dual_coxeter": "2",
  "gram": [
    "2",
    "-2",
    "-2",
    "2"
  ],
  "marks": [
    "1",
    "1"
  ],
  "rank": 1,
  "type": "A1~1"
}
"#;
    assert_eq!(stdout(&["rootdata", "--type", "A1~1"]), expected);
}

#[test]
fn dcount_golden() {
    assert_eq!(stdout(&["dcount", "--type", "A2~1", "--lambda", "1,1"]), "9\n");
}

#[test]
fn form_golden() {
    let expected = "{\n  \"value\": \"(q^4)/(q^4 - 2*q^2 + 1)\"\n}\n";
    assert_eq!(
        stdout(&["form", "--type", "A1~1", "--x", "E0*E1", "--y", "E0*E1"]),
        expected
    );
}

#[test]
fn outputs_byte_stable_across_runs() {
    for args in [
        vec!["rootdata", "--type", "A2~2"],
        vec!["roots", "--type", "A2~1", "--cutoff", "2"],
        vec!["weyl", "--type", "A1~1", "--betas", "-4..4"],
        vec!["crystal", "--type", "A2~1", "--lambda", "1,0", "--dot"],
        vec!["canonical", "--type", "A1~1", "--weight", "1,1"],
        vec!["afn", "--type", "A1~1", "--lambda", "2"],
        vec!["jring", "--type", "A1~1", "--lambda", "1", "--trunc-boxes", "1", "--trunc-det", "1", "--csv"],
    ] {
        let first = stdout(&args);
        let second = stdout(&args);
        assert_eq!(first, second, "{args:?} not byte-stable");
        assert!(!first.is_empty());
    }
}

#[test]
fn json_outputs_reparse() {
    // Matrices re-parse into exact entries.
    let text = stdout(&["rootdata", "--type", "A2~2"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let gram: Vec<String> = serde_json::from_value(v["gram"].clone()).unwrap();
    assert_eq!(gram.len(), 4);
    assert_eq!(gram[0], "4");
    // Crystal listings re-parse with consistent sizes.
    let text = stdout(&["crystal", "--type", "A2~1", "--lambda", "1,1"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let elements = v["elements"].as_array().unwrap();
    assert_eq!(elements.len(), v["size"].as_u64().unwrap() as usize);
    // Beta tables re-parse into roots.
    let text = stdout(&["weyl", "--type", "A1~1", "--betas=-2..2"]);
    let rows: Vec<serde_json::Value> = serde_json::from_str(&text).unwrap();
    assert_eq!(rows.len(), 5);
    let coords: Vec<i64> = serde_json::from_value(rows[0]["root"].clone()).unwrap();
    assert_eq!(coords.len(), 2);
}

#[test]
fn exit_codes() {
    // Domain error: 2.
    let out = qa(&["rootdata", "--type", "B2~1"]);
    assert_eq!(out.status.code(), Some(2));
    // Usage error: 2.
    let out = qa(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    // Inconclusive: 3.
    let out = qa(&["cells", "--type", "A1~1", "--lambda", "1", "--trunc-boxes", "0", "--trunc-det", "0"]);
    assert_eq!(out.status.code(), Some(3));
    // Frame-infeasible PBW listing: 3 with partial output.
    let out = qa(&["pbw", "--type", "A2~1", "--weight", "1,2,1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!out.stdout.is_empty());
}

#[test]
fn env_truncation_defaults() {
    let out = Command::new(env!("CARGO_BIN_EXE_qa"))
        .args(["cells", "--type", "A1~1", "--lambda", "1"])
        .env("QA_TRUNC_BOXES", "0")
        .env("QA_TRUNC_DET", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "env truncation must apply");
    let out = Command::new(env!("CARGO_BIN_EXE_qa"))
        .args(["cells", "--type", "A1~1", "--lambda", "1"])
        .env_remove("QA_TRUNC_BOXES")
        .env_remove("QA_TRUNC_DET")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "defaults must be conclusive");
}
