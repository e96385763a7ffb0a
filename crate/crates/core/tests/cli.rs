//! The `contractum` binary: exit codes, outputs, and reproducibility.

use std::path::Path;
use std::process::{Command, Output};

fn contractum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_contractum"))
        .args(args)
        .env_remove("CONTRACTUM_TOL")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn example_prints_three_holds() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("claims.json");
    let o = contractum(&["example-ciric", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for c in ["claim_1: holds", "claim_2: holds", "claim_3: holds"] {
        assert!(text.contains(c), "{text}");
    }
    let report = json(&out);
    assert_eq!(report["schema"], "v1");
    assert_eq!(report["result"].as_array().unwrap().len(), 3);
}

#[test]
fn iterate_converges_to_zero() {
    let o = contractum(&["iterate", "--map", "corpus:example17", "--x0", "1.0"]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let trace = &report["result"]["traces"][0];
    assert_eq!(trace["stop_reason"], "converged");
    assert!(trace["final_point"].as_f64().unwrap().abs() < 1e-8);
}

#[test]
fn iterate_writes_trace_lines() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.jsonl");
    let o = contractum(&["iterate", "--map", "corpus:browder", "--x0", "0.9", "--trace", trace.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<serde_json::Value> = std::fs::read_to_string(&trace)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let summary = lines.last().unwrap();
    assert_eq!(summary["summary"], true);
    assert_eq!(summary["case"], "case_III");
    assert_eq!(lines[0]["n"], 0);
}

#[test]
fn stall_map_fails_to_converge() {
    let o = contractum(&["iterate", "--map", "corpus:stall", "--x0", "1.0", "--max-steps", "200"]);
    assert_eq!(o.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["result"]["traces"][0]["case"], "case_II");
}

#[test]
fn summability_emits_csv() {
    let o = contractum(&["summability", "--C", "0.5", "--p", "0.5", "--t0", "0.5", "--N", "10000"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,phi_n,bound_n,partial_sum"));
    assert_eq!(lines.count(), 10_001);
}

#[test]
fn summability_outside_domain_is_a_config_error() {
    let o = contractum(&["summability", "--C", "2", "--p", "0.5", "--t0", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn check_map_verdicts_drive_exit_codes() {
    let ok = contractum(&["check-map", "--map", "corpus:example17"]);
    assert_eq!(ok.status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let controls = dir.path().join("controls.json");
    std::fs::write(
        &controls,
        r#"{"alpha": {"label": "a", "range_contract": "alpha", "pieces": [{"lo": 0, "hi": null, "shape": {"kind": "constant", "params": [1.2]}}]},
            "beta": {"label": "b", "range_contract": "beta", "pieces": [{"lo": 0, "hi": null, "shape": {"kind": "constant", "params": [0.6666666666666666]}}]}}"#,
    )
    .unwrap();
    let bad = contractum(&["check-map", "--map", "corpus:example17", "--controls", controls.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1), "{}", String::from_utf8_lossy(&bad.stderr));
}

#[test]
fn verify_theorem_on_corpus_entries() {
    for label in ["example17", "browder", "hausdorff-two-point", "power-rate"] {
        let o = contractum(&["verify-theorem", "--map", &format!("corpus:{label}")]);
        assert_eq!(o.status.code(), Some(0), "{label}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = contractum(&["verify-theorem", "--map", "corpus:stall"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        let o = contractum(&[
            "iterate", "--map", "corpus:example17", "--starts", "5", "--seed", seed, "--output",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        std::fs::read(out).unwrap()
    };
    assert_eq!(run("a.json", "11"), run("b.json", "11"));
    assert_ne!(run("a.json", "11"), run("c.json", "12"));
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"command": "iterate", "map_source": "corpus:browder", "x0": [0.3]}"#).unwrap();
    let o = contractum(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["result"]["traces"][0]["x0"], 0.3);
    let o = contractum(&["--config", cfg.to_str().unwrap(), "iterate", "--x0", "0.7"]);
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["result"]["traces"][0]["x0"], 0.7);
}

#[test]
fn bad_inputs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"command": "iterate", "bogus": 1}"#).unwrap();
    assert_eq!(contractum(&["--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(contractum(&["--config", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(contractum(&["iterate", "--map", "corpus:nope", "--x0", "1"]).status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_contractum"))
        .arg("example-ciric")
        .env("CONTRACTUM_TOL", "-1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
