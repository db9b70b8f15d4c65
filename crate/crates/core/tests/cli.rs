use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn run(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_conic-hurwitz"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn binary");
    let mut pipe = child.stdin.take().unwrap();
    if let Some(text) = stdin {
        pipe.write_all(text.as_bytes()).unwrap();
    }
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json_lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("JSON line"))
        .collect()
}

#[test]
fn validate_exit_codes() {
    assert_eq!(code(&run(&["validate", "2: 2 | 2"], None)), 0);
    let bad = run(&["validate", "4: 2,2 | 2,2"], None);
    assert_eq!(code(&bad), 1);
    let v = &json_lines(&bad)[0];
    assert_eq!(v["violations"][0]["constraint"], "defect-equals-2d-minus-2");
    assert_eq!(code(&run(&["validate", "4: 3,x"], None)), 3);
    assert_eq!(code(&run(&["validate"], None)), 3);
}

#[test]
fn admissible_reports_case() {
    let out = run(&["admissible", "1/2,1/2,1/2"], None);
    assert_eq!(code(&out), 0);
    assert_eq!(json_lines(&out)[0]["case"], "A");
    let out = run(&["admissible", "1,1,1"], None);
    assert_eq!(code(&out), 0);
    assert_eq!(json_lines(&out)[0]["case"], "EMPTY");
    assert_eq!(code(&run(&["admissible", "1/2,3/2"], None)), 1);
    assert_eq!(code(&run(&["admissible", "0.5,1"], None)), 3);
}

#[test]
fn certificate_round_trip_through_stdin() {
    let out = run(
        &[
            "certify",
            "9: 2,2,2,2,1 | 3,3,3 | 3,3,3",
            "--beta",
            "1/2,2/3,2/3",
        ],
        None,
    );
    assert_eq!(code(&out), 0);
    let cert = String::from_utf8(out.stdout).unwrap();
    let check = run(&["verify-certificate", "-"], Some(&cert));
    assert_eq!(code(&check), 0);
    assert_eq!(json_lines(&check)[0]["valid"], true);

    let mut tampered: Value = serde_json::from_str(&cert).unwrap();
    tampered["beta"] = Value::from(vec!["1/2", "1/2", "1/2"]);
    let check = run(&["verify-certificate"], Some(&tampered.to_string()));
    assert_eq!(code(&check), 1);
}

#[test]
fn certify_search_and_refusal() {
    let out = run(&["certify", "4: 3,1 | 2,2 | 2,2"], None);
    assert_eq!(code(&out), 0);
    assert!(json_lines(&out)[0]["lifted_verdict"]["admissible"] == false);
    let out = run(&["certify", "2: 2 | 2"], None);
    assert_eq!(code(&out), 1);
    assert_eq!(json_lines(&out)[0]["reason"], "no witness found");
}

#[test]
fn realize_and_verify_witness() {
    let out = run(&["realize", "4: 2,2 | 2,2 | 2,2"], None);
    assert_eq!(code(&out), 0);
    let v = &json_lines(&out)[0];
    assert_eq!(v["result"], "realizable");
    let file = serde_json::json!({ "datum": "4: 2,2 | 2,2 | 2,2", "witness": v["witness"] });
    assert_eq!(code(&run(&["verify-witness"], Some(&file.to_string()))), 0);

    let hard = "9: 2,2,2,2,1 | 3,3,3 | 3,3,3";
    assert_eq!(code(&run(&["realize", hard, "--budget", "5"], None)), 2);
    assert_eq!(code(&run(&["realize", hard], None)), 1);
}

#[test]
fn enumerate_and_catalog() {
    let out = run(
        &["enumerate", "--degree", "4", "--branch-points", "3"],
        None,
    );
    assert_eq!(code(&out), 0);
    assert_eq!(json_lines(&out).len(), 6);

    let out = run(&["catalog", "--max-degree", "4"], None);
    assert_eq!(code(&out), 0);
    let lines = json_lines(&out);
    let summary = &lines.last().unwrap()["summary"];
    assert_eq!(summary["contradictions"], 0);
    assert_eq!(summary["by_degree"]["4"]["EXCEPTIONAL_CERTIFIED"], 1);
    assert!(lines[..lines.len() - 1]
        .iter()
        .all(|l| l.get("timings").is_none()));
}

#[test]
fn families() {
    let out = run(&["families", "--nonprime", "15"], None);
    assert_eq!(code(&out), 0);
    assert_eq!(json_lines(&out)[0]["family_id"], "PRK_A");
    assert_eq!(code(&run(&["families", "--nonprime", "7"], None)), 3);
    let out = run(&["families", "--family", "p3k", "--params", "3"], None);
    assert_eq!(code(&out), 0);
    assert_eq!(
        json_lines(&out)[0]["datum"]["rows"][0],
        serde_json::json!([2, 2, 2, 2, 1])
    );
}
