use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;
use transversal_cli::Job;
use transversal_core::gates::compute_groups;
use transversal_core::monomial::{evaluate, Monomial};
use transversal_core::zmod::{howell_form, ZModule, ZVector};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn transversal(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_transversal"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn report(args: &[&str]) -> Value {
    let out = transversal(args, None);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn module(v: &Value, n: usize, ell: u32) -> ZModule {
    let rows: Vec<ZVector> = v["generators"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| {
            let entries = r
                .as_array()
                .unwrap()
                .iter()
                .map(|e| e.as_u64().unwrap())
                .collect();
            ZVector::new(entries, ell).unwrap()
        })
        .collect();
    let m = howell_form(&rows, n, ell).unwrap();
    assert_eq!(m.length() as u64, v["length"].as_u64().unwrap());
    m
}

fn job(name: &str) -> Job {
    Job::from_json(&std::fs::read_to_string(data(name)).unwrap()).unwrap()
}

fn factors(action: &Value) -> Vec<(Vec<u64>, u64)> {
    action["factors"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| {
            let j = f["J"]
                .as_array()
                .unwrap()
                .iter()
                .map(|x| x.as_u64().unwrap())
                .collect();
            (j, f["a"].as_u64().unwrap())
        })
        .collect()
}

#[test]
fn running_example_report() {
    let path = data("ex1.json");
    let r = report(&["run", "--input", path.to_str().unwrap()]);
    assert_eq!(r["params"], serde_json::json!([16, 5]));
    let h = module(&r["H"], 16, 3);
    for u in ["1", "x1", "x2"] {
        let ev = ZVector::lift(&evaluate(Monomial::parse(u, 4).unwrap()), 3, 1);
        assert!(h.contains(&ev).unwrap(), "ev({u})");
    }

    let actions = r["logical_actions"].as_array().unwrap();
    let labels: Vec<&str> = actions
        .iter()
        .map(|a| a["label"].as_str().unwrap())
        .collect();
    assert_eq!(labels, ["ev(1)", "ev(x1)", "ev(x2)"]);
    assert_eq!(
        factors(&actions[0]),
        vec![
            (vec![5], 4),
            (vec![3, 5], 4),
            (vec![4, 5], 4),
            (vec![3, 4, 5], 4)
        ]
    );
    for a in actions {
        let f = factors(a);
        let keys: Vec<(usize, Vec<u64>)> = f.iter().map(|(j, _)| (j.len(), j.clone())).collect();
        assert!(
            keys.windows(2).all(|w| w[0] < w[1]),
            "factors sorted by (|J|, J)"
        );
    }
}

#[test]
fn repetition_report() {
    let path = data("ex2.json");
    let r = report(&["groups", "--input", path.to_str().unwrap()]);
    assert_eq!(r["H"]["generators"], serde_json::json!([[2, 2]]));
    assert!(r.get("verify").is_none());

    let r = report(&["run", "--input", path.to_str().unwrap()]);
    assert_eq!(r["verify"]["agreement"], Value::Bool(true));
    assert_eq!(r["verify"]["mode"], "exhaustive");
}

#[test]
fn verify_classifies_the_job_gate() {
    let text = std::fs::read_to_string(data("ex2.json"))
        .unwrap()
        .replace("\"tasks\"", "\"gate\": [1, 3], \"tasks\"");
    let out = transversal(&["verify"], Some(&text));
    assert!(out.status.success());
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    let gate = &r["verify"]["gate"];
    assert_eq!(gate["classification"], "NotInH");
    assert_eq!(gate["witness"]["kind"], "coset");
    assert_eq!(gate["agreement"], Value::Bool(true));
}

#[test]
fn malformed_input_names_the_field() {
    let bad = r#"{"version":1,"ell":2,"code":{"type":"matrix","n":3,"C1":["11"],"C2":[]}}"#;
    let out = transversal(&["groups"], Some(bad));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("code.C1[0]"));
    assert!(out.stdout.is_empty());

    let out = transversal(&["groups"], Some("{"));
    assert_eq!(out.status.code(), Some(1));
    let out = transversal(&["groups", "--input", "/nonexistent/job.json"], None);
    assert_eq!(out.status.code(), Some(1));
    let out = transversal(&["frobnicate"], None);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn info_reports_reed_muller_bound() {
    let path = data("ex3.json");
    let r = report(&["info", "--input", path.to_str().unwrap()]);
    assert_eq!(r["n"], 16);
    assert_eq!(r["K"], 4);
    let rm = &r["monomial"]["reed_muller"];
    assert_eq!((rm["q"].as_u64(), rm["r"].as_u64()), (Some(0), Some(1)));
    assert_eq!(rm["bound"], 3);
    assert_eq!(rm["applies"], Value::Bool(true));
    assert_eq!(r["monomial"]["h_levels"], serde_json::json!([1, 2, 3, 4]));
    assert_eq!(r["monomial"]["minimal_full_level"], 5);
}

#[test]
fn closed_form_falls_back() {
    let path = data("ex3.json");
    let r = report(&["closed-form", "--input", path.to_str().unwrap()]);
    let cf = &r["closed_form"];
    assert_eq!(cf["H"]["source"], "closed-form");
    assert_eq!(cf["H"]["matches_generic"], Value::Bool(true));
    assert_eq!(cf["T"]["source"], "generic");
    assert_eq!(cf["fallback"], Value::Bool(true));
    // span(ev(Delta)) is strictly inside H here
    assert_eq!(cf["delta"]["contained_in_h"], Value::Bool(true));
    assert_eq!(cf["delta"]["equals_h"], Value::Bool(false));
    let w = cf["delta"]["witness"].as_array().unwrap();
    assert_eq!(w.len(), 16);

    let path = data("steane.json");
    let r = report(&["closed-form", "--input", path.to_str().unwrap()]);
    assert_eq!(r["closed_form"]["fallback"], Value::Bool(true));
    assert_eq!(r["closed_form"]["H"]["source"], "generic");
}

#[test]
fn closed_form_mismatch_exits_two() {
    // the hypotheses hold, yet ev(x1) is not in H_4: 0101 . 1111 = 2 mod 4
    let text =
        r#"{"version":1,"ell":2,"code":{"type":"monomial","m":2,"M1":["1","x1"],"M2":["1"]}}"#;
    let out = transversal(&["closed-form"], Some(text));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("closed-form H"));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["closed_form"]["H"]["matches_generic"], Value::Bool(false));
    assert!(r["closed_form"]["H"]["witness"].is_array());
}

#[test]
fn output_is_deterministic() {
    let path = data("steane.json");
    let path = path.to_str().unwrap();
    let one = transversal(&["run", "--input", path, "--threads", "1"], None);
    let four = transversal(&["run", "--input", path, "--threads", "4"], None);
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);

    let file = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("steane-report.json");
    let out = transversal(
        &["run", "--input", path, "--output", file.to_str().unwrap()],
        None,
    );
    assert!(out.status.success() && out.stdout.is_empty());
    assert_eq!(std::fs::read(&file).unwrap(), one.stdout);

    let seeded = transversal(&["run", "--input", path, "--seed", "8"], None);
    let r: Value = serde_json::from_slice(&seeded.stdout).unwrap();
    assert_eq!(r["verify"]["agreement"], Value::Bool(true));
}

#[test]
fn generators_round_trip() {
    for name in ["ex1.json", "ex2.json", "ex3.json", "steane.json"] {
        let j = job(name);
        let path = data(name);
        let r = report(&["groups", "--input", path.to_str().unwrap()]);
        let g = compute_groups(&j.css, j.ell).unwrap();
        let n = j.css.len();
        assert_eq!(module(&r["H"], n, j.ell), g.h, "{name}");
        assert_eq!(module(&r["T"], n, j.ell), g.t, "{name}");
        assert_eq!(module(&r["Id"], n, j.ell), g.id, "{name}");
    }
}

#[test]
fn steane_transversal_s() {
    let path = data("steane.json");
    let r = report(&["action", "--input", path.to_str().unwrap()]);
    let a = &r["logical_actions"][0];
    assert_eq!(a["in_t"], Value::Bool(true));
    assert_eq!(factors(a), vec![(vec![1], 3)]);
}
