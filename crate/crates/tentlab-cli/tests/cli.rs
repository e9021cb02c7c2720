use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn tentlab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tentlab")).args(args).current_dir(dir).output().expect("runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json")
}

#[test]
fn kneading_envelope() {
    let dir = tempfile::tempdir().unwrap();
    let v = json_of(&tentlab(dir.path(), &["kneading", "--depth", "9", "--json"]));
    assert_eq!(v["schema"], "tentlab/1");
    assert_eq!(v["config_echo"]["command"], "kneading");
    let r = &v["result"];
    assert_eq!(r["word"], "101101101");
    assert_eq!(r["depth"], 9);
    assert_eq!(r["ambiguous"], false);
    assert!(r.get("epsilon").is_some() && r.get("lambda").is_some());
    assert_eq!(v["reports"], Value::Array(vec![]));
}

#[test]
fn height_at_golden_is_one_third() {
    let dir = tempfile::tempdir().unwrap();
    let v = json_of(&tentlab(dir.path(), &["height", "--max-iters", "50", "--json"]));
    assert_eq!(v["result"]["value"].as_f64().unwrap(), 1.0 / 3.0);
}

#[test]
fn sweep_and_density_write_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = tentlab(dir.path(), &["sweep", "--from", "1.6", "--to", "1.7", "--steps", "5", "--out", "heights.csv"]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("heights.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("lambda,m,n,type,bracket_lo,bracket_hi"));
    assert_eq!(lines.count(), 5);

    let out = tentlab(dir.path(), &["density", "--markov", "--samples", "16", "--out", "phi.csv"]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("phi.csv")).unwrap();
    assert!(csv.starts_with("x,phi\n"));
    assert_eq!(csv.lines().count(), 17);
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.cfg"), "# golden, shallow\nlambda = poly:\"-1,-1,1\":interval:\"1.6,1.7\"\ndepth = 5\nseed = 11\n").unwrap();
    let v = json_of(&tentlab(dir.path(), &["kneading", "--config", "run.cfg", "--json"]));
    assert_eq!(v["result"]["depth"], 5);
    assert_eq!(v["config_echo"]["seed"], 11);
    let v = json_of(&tentlab(dir.path(), &["kneading", "--config", "run.cfg", "--depth", "7", "--json"]));
    assert_eq!(v["result"]["depth"], 7);

    std::fs::write(dir.path().join("bad.cfg"), "colour = red\n").unwrap();
    assert_eq!(tentlab(dir.path(), &["kneading", "--config", "bad.cfg"]).status.code(), Some(2));
}

#[test]
fn fiber_reports_extremes_and_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let v = json_of(&tentlab(dir.path(), &["fiber", "--x", "0.61", "--depth", "10", "--json"]));
    let r = &v["result"];
    let n = r["threads"].as_array().unwrap().len();
    assert_eq!(r["branch_words"].as_array().unwrap().len(), n);
    assert_eq!(r["extremes"]["lower"]["index"], 0);
    assert_eq!(r["extremes"]["upper"]["index"], n - 1);
    for p in r["consecutive_pairs"].as_array().unwrap() {
        assert_eq!(p[1].as_u64().unwrap(), p[0].as_u64().unwrap() + 1);
    }
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = tentlab(dir.path(), &["verify", "model_action", "--depth", "12", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["reports"][0]["status"], "Pass");

    assert_eq!(tentlab(dir.path(), &["verify", "no_such_suite"]).status.code(), Some(2));
    assert_eq!(tentlab(dir.path(), &["verify", "disintegrate", "--depth", "2"]).status.code(), Some(2));
    assert_eq!(tentlab(dir.path(), &["verify", "disintegrate", "--depth", "2", "--J", "0.6,0.7"]).status.code(), Some(0));
}

#[test]
fn render_is_thread_count_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let mut seen = Vec::new();
    for t in ["1", "4"] {
        let out = tentlab(dir.path(), &["render", "staircase", "--sweep-steps", "40", "--out", "st.svg", "--threads", t]);
        assert!(out.status.success());
        let svg = std::fs::read(dir.path().join("st.svg")).unwrap();
        let csv = std::fs::read(dir.path().join("st.csv")).unwrap();
        assert!(svg.starts_with(b"<?xml"));
        seen.push((svg, csv));
    }
    assert_eq!(seen[0], seen[1]);
}

#[test]
fn lambda_grammar_errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let out = tentlab(dir.path(), &["height", "--lambda", "poly:\"1,1\":interval:\"1.6,1.7\""]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}
