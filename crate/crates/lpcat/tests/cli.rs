use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lpcat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lpcat")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = lpcat(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    lpcat(args).status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn norm_examples() {
    let v = json(&["norm", "--genset", "F", "--coeffs", "1", "--k", "20"]);
    assert_eq!(v["q"], "1");
    assert_eq!(v["bound"], "1/1048576");
    let v = json(&["norm", "--genset", "E", "--p", "2", "--coeffs", "3,4"]);
    assert_eq!(v["q"], "5");
    let v = json(&["norm", "--p", "1", "--ce-set", "odds", "--coeffs", "1,1", "--k", "12"]);
    assert_eq!(v["q"], "2");
    assert_eq!(v["enumeration_stages_consulted"], 1);
    assert!(v.get("elapsed_ms").is_none());
    let timed = json(&["norm", "--coeffs", "1", "--timing"]);
    assert!(timed["elapsed_ms"].is_u64());
    let c = json(&["norm", "--field", "complex", "--p", "3/2", "--coeffs", "1:1,0,-1/2:2"]);
    assert_eq!(c["config"]["field"], "complex");
}

#[test]
fn approx_e0_examples_and_sweep() {
    let v = json(&["approx-e0", "--p", "1", "--k", "2"]);
    assert_eq!(v["result"]["N1"], 4);
    assert_eq!(v["result"]["q1"], "3");
    assert_eq!(v["result"]["exact_error"], "1/32");
    let v = json(&["approx-e0", "--p", "2", "--k", "4"]);
    let bound = lpcat_core::rigor::parse_rat(v["result"]["certified_error_bound"].as_str().unwrap()).unwrap();
    assert!(bound < lpcat_core::rigor::rat(1, 16));
    assert!(v["result"].get("exact_error").is_none());

    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let v = json(&["approx-e0", "--k", "12", "--csv", csv.to_str().unwrap()]);
    assert_eq!(v["sweep"].as_array().unwrap().len(), 12);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,bound,exact_error,queries,stages"));
    assert_eq!(lines.count(), 12);
}

#[test]
fn extract_examples() {
    let v = json(&["extract", "--n-max", "20"]);
    assert_eq!(v["ground_truth_agreement"], "21/21");
    assert_eq!(v["bits"][0], serde_json::json!([0, false]));
    assert_eq!(v["flagged"], false);
    // a faulty oracle is flagged; bits it leaves unresolved make the run an oracle failure
    let out = lpcat(&["extract", "--n-max", "20", "--fault", "1/8"]);
    assert_eq!(out.status.code(), Some(3));
    let bad: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(bad["flagged"], true);
    assert_ne!(bad["ground_truth_agreement"], "21/21");
    assert_eq!(bad["fault"], "1/8");

    let dir = tempfile::tempdir().unwrap();
    let swap = write(dir.path(), "swap.json", r#"{"phi":[[0,1],[1,0]],"lambdas":[[3,5,4,5],[1,1,0,1]]}"#);
    let v = json(&["extract", "--oracle", &swap, "--n-max", "10", "--field", "complex", "--ce-set", "primes"]);
    assert_eq!(v["ground_truth_agreement"], "11/11");
    assert_eq!(v["oracle"], "descriptor");
    // not onto e_0
    let shift = write(dir.path(), "shift.json", r#"{"phi":[],"lambdas":[],"shift":1}"#);
    assert_eq!(code(&["extract", "--oracle", &shift]), 2);
    // a starved ball map cannot answer: oracle failure, report still written
    let out = lpcat(&["extract", "--oracle", &swap, "--fuel", "2", "--n-max", "3"]);
    assert_eq!(out.status.code(), Some(3));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["failures"].as_array().unwrap().len(), 4);
}

#[test]
fn classify_examples() {
    let dir = tempfile::tempdir().unwrap();
    let id = write(dir.path(), "id.json", r#"{"schema":"lpcat/1","phi":[],"lambdas":[]}"#);
    assert_eq!(json(&["classify", "--descriptor", &id])["verdict"], "conforms");
    let shift = write(dir.path(), "shift.json", r#"{"phi":[],"lambdas":[],"shift":2}"#);
    assert_eq!(json(&["classify", "--descriptor", &shift, "--p", "3"])["verdict"], "conforms");
    let rot = json(&["classify", "--rotation", "--p", "2", "--tol", "20"]);
    assert_eq!(rot["verdict"], "violates");
    assert_eq!(rot["witnesses"][0]["kind"], "overlap");
    assert_eq!(rot["witnesses"][0]["coordinate"], 0);

    let images = write(
        dir.path(),
        "images.json",
        r#"{"images":[{"approx":[[0,1,1,0,1]]},{"approx":[[1,3,4,0,1]],"radius":"1/1000000"}]}"#,
    );
    let v = json(&["classify", "--images", &images, "--tol", "10"]);
    assert_eq!(v["verdict"], "violates");
    assert_eq!(v["witnesses"][0]["kind"], "norm");
    assert_eq!(v["witnesses"][0]["index"], 1);
    let close = write(
        dir.path(),
        "close.json",
        r#"{"images":[{"approx":[[0,1,1,0,1]],"radius":"1/8"}]}"#,
    );
    assert_eq!(json(&["classify", "--images", &close, "--tol", "10"])["verdict"], "unknown");
}

#[test]
fn invalid_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let zero = write(dir.path(), "zero.json", r#"{"label":"z","kind":"explicit","elements":[0,3]}"#);
    assert_eq!(code(&["norm", "--ce-set", &zero]), 2);
    let kind = write(dir.path(), "kind.json", r#"{"label":"z","kind":"evens"}"#);
    assert_eq!(code(&["norm", "--ce-set", &kind]), 2);
    let garbage = write(dir.path(), "garbage.json", "{not json");
    assert_eq!(code(&["classify", "--descriptor", &garbage]), 2);
    let collide = write(dir.path(), "collide.json", r#"{"phi":[[0,1],[1,1]],"lambdas":[]}"#);
    assert_eq!(code(&["classify", "--descriptor", &collide]), 2);
    let lam = write(dir.path(), "lam.json", r#"{"phi":[],"lambdas":[[1,2,0,1]]}"#);
    assert_eq!(code(&["classify", "--descriptor", &lam]), 2);
    assert_eq!(code(&["norm", "--p", "1/2"]), 2);
    assert_eq!(code(&["norm", "--k", "100000"]), 2);
    assert_eq!(code(&["norm", "--coeffs", "1,x"]), 2);
    assert_eq!(code(&["norm", "--coeffs", "1:1"]), 2);
    assert_eq!(code(&["classify"]), 2);
    assert_eq!(code(&["demo", "nowhere"]), 2);
    assert_eq!(code(&["norm", "--ce-set", "/nonexistent/spec.json"]), 2);
}

#[test]
fn throttled_spec_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "slow.json",
        r#"{"label":"slow","kind":"throttled","elements":[2,3,7],"delays":[[3,6]]}"#,
    );
    let v = json(&["extract", "--ce-set", &spec, "--n-max", "12"]);
    assert_eq!(v["ground_truth_agreement"], "13/13");
    assert_eq!(v["config"]["ce_set"], "slow");
}

#[test]
fn demos_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for scenario in ["zeta", "rotation", "pour-el-richards"] {
        let a = dir.path().join(format!("{scenario}-a.json"));
        let b = dir.path().join(format!("{scenario}-b.json"));
        let csv = dir.path().join(format!("{scenario}.csv"));
        for out in [&a, &b] {
            let o = lpcat(&["demo", scenario, "--seed", "9", "--out", out.to_str().unwrap(), "--csv", csv.to_str().unwrap()]);
            assert!(o.status.success(), "{scenario}: {}", String::from_utf8_lossy(&o.stderr));
            assert!(o.stdout.is_empty());
        }
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap(), "{scenario}");
        assert!(std::fs::read_to_string(&csv).unwrap().lines().count() > 1);
    }
    let z: Value = serde_json::from_slice(&std::fs::read(dir.path().join("zeta-a.json")).unwrap()).unwrap();
    assert_eq!(z["check"]["passed"], true);
    assert_eq!(z["classifier"]["verdict"], "conforms");
    let r: Value = serde_json::from_slice(&std::fs::read(dir.path().join("rotation-a.json")).unwrap()).unwrap();
    let verdicts: Vec<(&str, bool)> = r["rotations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| (x["p"].as_str().unwrap(), x["counterexample"].is_null()))
        .collect();
    assert_eq!(verdicts, [("1", false), ("3/2", false), ("2", true), ("3", false)]);
    let other = lpcat(&["demo", "rotation", "--seed", "10"]);
    assert_ne!(other.stdout, std::fs::read(dir.path().join("rotation-a.json")).unwrap());
}
