use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn dbr_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dbr-lab"))
        .args(args)
        .env_remove("DBR_LAB_JOBS")
        .output()
        .expect("binary runs")
}

fn lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("one JSON object per line"))
        .collect()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const CONFIG: &str = r#"
[defaults]
seed = 11

[[scenario]]
kind = "thm1"
name = "baseline"
inner = { monomial = 1 }
n = 1

[[scenario]]
kind = "clark"
inner = { zeros = [[0.0, 0.0], [0.4, 0.0]] }
family = "2"

[[scenario]]
kind = "cohn"
coeffs = [[3.0, 0.0], [0.0, 0.0], [1.0, 0.0]]

[[scenario]]
kind = "set-eq"
inner = { monomial = 1 }
n = 1
other = { inner = { monomial = 1 }, n = 0 }
probes = 5
"#;

#[test]
fn verify_thm1_passes() {
    let out = dbr_lab(&["verify", "thm1", "--inner", "monomial:1", "--n", "0", "--trunc", "256"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &lines(&out)[0];
    assert_eq!(r["schema"], 1);
    assert_eq!(r["pass"], true);
    assert!(r["metrics"]["max_cross_orthogonality"].as_f64().unwrap() < 1e-6);
}

#[test]
fn clark_atoms_of_z_squared() {
    let out = dbr_lab(&["clark", "atoms", "--inner", "monomial:2", "--lambda", "1,0"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &lines(&out)[0];
    let atoms = r["atoms"].as_array().unwrap();
    assert_eq!(atoms.len(), 2);
    let expect = [(1.0, 0.5), (-1.0, 0.5)];
    for (a, (re, mass)) in atoms.iter().zip(expect) {
        assert!((a["point"][0].as_f64().unwrap() - re).abs() < 1e-10);
        assert!(a["point"][1].as_f64().unwrap().abs() < 1e-10);
        assert!((a["mass"].as_f64().unwrap() - mass).abs() < 1e-10);
    }
}

#[test]
fn cohn_count_of_lemma_polynomial() {
    let out = dbr_lab(&["cohn", "count", "--coeffs", "2,2,2,1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(lines(&out)[0]["metrics"]["zero_count"], 0);
}

#[test]
fn cyclic_test_verdicts() {
    let out = dbr_lab(&["cyclic", "test", "--inner", "monomial:1", "--f", "2,1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &lines(&out)[0];
    assert_eq!(r["metrics"]["criterion"]["cyclic"], true);
    assert!(r["metrics"]["final_residual"].as_f64().unwrap() < 0.01);

    let out = dbr_lab(&[
        "cyclic", "test", "--inner", "monomial:1", "--f", "1,-0.5,-0.5", "--mode", "lenient",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = &lines(&out)[0];
    assert_eq!(r["metrics"]["criterion"]["cyclic"], false);
    assert!(r["metrics"]["final_residual"].as_f64().unwrap() > 0.1);
}

#[test]
fn run_is_deterministic_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.toml", CONFIG);
    let a = dbr_lab(&["run", &cfg, "--jobs", "1"]);
    let b = Command::new(env!("CARGO_BIN_EXE_dbr-lab"))
        .args(["run", &cfg, "--jobs", "1"])
        .env("DBR_LAB_JOBS", "4")
        .output()
        .unwrap();
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
    let reports = lines(&a);
    assert_eq!(reports.len(), 4);
    for (i, r) in reports.iter().enumerate() {
        assert_eq!(r["index"], i);
        assert!(r.get("timing_ms").is_none());
    }
    assert_eq!(reports[0]["name"], "baseline");
    assert_eq!(reports[3]["config"]["seed"], 11);
}

#[test]
fn shipped_config_runs_every_kind() {
    let cfg = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/all-scenarios.toml");
    let out = dbr_lab(&["run", cfg]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let kinds: Vec<_> = lines(&out).iter().map(|r| r["kind"].as_str().unwrap().to_string()).collect();
    assert_eq!(
        kinds,
        ["thm1", "thm3", "hayashi", "clark", "cohn", "cyclic", "set-eq", "section4"]
    );
}

#[test]
fn json_config_and_text_format() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "run.json",
        r#"{"scenario": [{"kind": "cohn", "coeffs": [[0.5, 0], [0, 0], [1, 0]]}]}"#,
    );
    let json = dbr_lab(&["run", &cfg]);
    let text = dbr_lab(&["run", &cfg, "--format", "text"]);
    assert_eq!(json.status.code(), Some(0));
    assert_eq!(text.status.code(), Some(0));
    let r = &lines(&json)[0];
    assert_eq!(r["metrics"]["zero_count"], 2);
    let modulus = r["metrics"]["min_root_modulus"].to_string();
    let text = String::from_utf8(text.stdout).unwrap();
    assert!(text.starts_with("[0] cohn  PASS"));
    assert!(text.contains(&modulus), "{text}");
}

#[test]
fn timings_are_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "t.toml", "[[scenario]]\nkind = \"cohn\"\ncoeffs = [[2.0, 0.0], [1.0, 0.0]]\n");
    let out = dbr_lab(&["run", &cfg, "--timings"]);
    assert!(lines(&out)[0]["timing_ms"].as_f64().is_some());
}

#[test]
fn configuration_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write(dir.path(), "u.toml", "[[scenario]]\nkind = \"thm1\"\ninner = { monomial = 1 }\nwat = 3\n");
    assert_eq!(dbr_lab(&["run", &unknown]).status.code(), Some(2));
    let kind = write(dir.path(), "k.toml", "[[scenario]]\nkind = \"thm2\"\n");
    assert_eq!(dbr_lab(&["run", &kind]).status.code(), Some(2));
    assert_eq!(dbr_lab(&["run", "/nonexistent/config.toml"]).status.code(), Some(2));
    assert_eq!(dbr_lab(&["verify", "thm1"]).status.code(), Some(2));
    assert_eq!(dbr_lab(&["verify", "thm1", "--inner", "zeros:1.2"]).status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_dbr-lab"))
        .args(["cohn", "count", "--coeffs", "2,1"])
        .env("DBR_LAB_JOBS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scenario_failures_exit_1_with_embedded_error() {
    // z is not outer
    let out = dbr_lab(&["cyclic", "test", "--inner", "monomial:1", "--f", "0,1"]);
    assert_eq!(out.status.code(), Some(1));
    let r = &lines(&out)[0];
    assert_eq!(r["pass"], false);
    assert!(r["error"].as_str().is_some());

    // a deliberately impossible tolerance fails without erroring
    let out = dbr_lab(&[
        "verify", "thm1", "--inner", "monomial:1", "--tol", "orthogonality=1e-300",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(lines(&out)[0]["error"].is_null());
}

#[test]
fn report_merge_renumbers() {
    let dir = tempfile::tempdir().unwrap();
    let a = dbr_lab(&["cohn", "count", "--coeffs", "2,1"]);
    let b = dbr_lab(&["clark", "atoms", "--inner", "monomial:1"]);
    assert_eq!(b.status.code(), Some(0));
    let c = dbr_lab(&["verify", "clark", "--inner", "monomial:1"]);
    let fa = write(dir.path(), "a.jsonl", &String::from_utf8_lossy(&a.stdout));
    let fc = write(dir.path(), "c.jsonl", &String::from_utf8_lossy(&c.stdout));
    let merged = dbr_lab(&["report", "merge", &fa, &fc]);
    assert_eq!(merged.status.code(), Some(0));
    let reports = lines(&merged);
    assert_eq!(reports.len(), 2);
    assert_eq!(reports[1]["index"], 1);
    assert_eq!(reports[1]["kind"], "clark");

    let bad = write(dir.path(), "bad.jsonl", "{\"schema\": 1}\n");
    assert_eq!(dbr_lab(&["report", "merge", &bad]).status.code(), Some(2));
}
