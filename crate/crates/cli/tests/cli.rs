//! End-to-end tests of the `pauliverify` binary. Golden outputs live in
//! `tests/golden/`; set `UPDATE_GOLDEN=1` to rewrite them.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const SUBCOMMANDS: [&str; 8] = ["gen-hypergraph", "inspect", "ppass", "verify", "params", "iqp-margin", "robustness", "selftest"];

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pauliverify"));
    cmd.current_dir(fixtures()).args(args).env_remove("PAULIVERIFY_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn error_json(out: &Output) -> Value {
    let line = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(line.lines().last().unwrap()).unwrap()
}

fn golden(name: &str, args: &[&str]) {
    let out = run(args);
    assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, &out.stdout).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden {name}; rerun with UPDATE_GOLDEN=1"));
    assert_eq!(String::from_utf8_lossy(&out.stdout), want, "{name} drifted");
}

#[test]
fn help_lists_every_subcommand() {
    let out = run(&["--help"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for sub in SUBCOMMANDS {
        assert!(text.contains(sub), "{sub} missing from --help");
        let sub_help = run(&[sub, "--help"]);
        assert!(sub_help.status.success(), "{sub} --help");
        let body = String::from_utf8_lossy(&sub_help.stdout);
        for flag in ["--seed", "--out", "--mode", "--trials"] {
            assert!(body.contains(flag), "{sub} --help lacks {flag}");
        }
    }
}

#[test]
fn subcommand_flags_are_documented() {
    let expect: [(&str, &[&str]); 8] = [
        ("gen-hypergraph", &["--n", "--edge-prob"]),
        ("inspect", &["--protocol", "--target"]),
        ("ppass", &["--protocol", "--target", "--state", "--group"]),
        ("verify", &["--config", "--runs", "--trials-csv"]),
        ("params", &["--protocol", "--n", "--r", "--target", "--k-override"]),
        ("iqp-margin", &["--report", "--fidelity", "--sampler-error"]),
        ("robustness", &["--config", "--grid", "--eta", "--runs"]),
        ("selftest", &["--quick"]),
    ];
    for (sub, flags) in expect {
        let body = String::from_utf8(run(&[sub, "--help"]).stdout).unwrap();
        for flag in flags {
            assert!(body.contains(flag), "{sub} --help lacks {flag}");
        }
    }
}

#[test]
fn golden_inspect_triangle() {
    golden("inspect_triangle.json", &["inspect", "--protocol", "hypergraph", "--target", "triangle.json"]);
}

#[test]
fn golden_inspect_ground() {
    golden("inspect_ising3.json", &["inspect", "--protocol", "ground", "--target", "ising3.json"]);
}

#[test]
fn golden_params() {
    golden("params_hypergraph_3.json", &["params", "--protocol", "hypergraph", "--n", "3"]);
    golden("params_circuit_ccz.json", &["params", "--protocol", "circuit", "--n", "3", "--target", "ccz_t.json"]);
}

#[test]
fn golden_verify_hypergraph() {
    golden("verify_hyper_honest.json", &["verify", "--config", "verify_hyper_honest.json"]);
}

#[test]
fn golden_ppass() {
    golden(
        "ppass_triangle_mixed.json",
        &["ppass", "--protocol", "hypergraph", "--target", "triangle.json", "--state", r#"{"kind":"maximally_mixed"}"#, "--seed", "1", "-k", "2000"],
    );
}

#[test]
fn golden_iqp_margin() {
    golden("iqp_margin.json", &["iqp-margin", "--fidelity", "0.999"]);
}

#[test]
fn inspect_triangle_resolver_text() {
    let v = stdout_json(&run(&["inspect", "--protocol", "hypergraph", "--target", "triangle.json"]));
    let rules = &v["stabilizers"][0]["branch_rules"];
    assert_eq!(rules[0], "If z_2=1 and x_1=1, the verifier accepts.");
    assert_eq!(rules[1], "If z_2=-1 and x_1z_3=1, the verifier accepts.");
}

#[test]
fn honest_and_flipped_verdicts() {
    let honest = stdout_json(&run(&["verify", "--config", "verify_hyper_honest.json"]));
    assert_eq!(honest["accepted"], true);
    assert_eq!(honest["all_trials_passed"], true);
    let flipped = stdout_json(&run(&["verify", "--config", "verify_hyper_flip.json"]));
    assert_eq!(flipped["accepted"], false);
    assert_eq!(flipped["per_group"][0]["passes"], 0);
}

#[test]
fn ground_circuit_and_entangled_configs_run() {
    let ground = stdout_json(&run(&["verify", "--config", "verify_ground.json"]));
    assert_eq!(ground["runs"], 5);
    let circuit = stdout_json(&run(&["verify", "--config", "verify_circuit.json"]));
    assert!(circuit["per_group"].as_array().unwrap().len() == 3);
    let entangled = run(&["verify", "--config", "verify_entangled.json"]);
    assert!(entangled.status.success(), "{}", String::from_utf8_lossy(&entangled.stderr));
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let args = ["verify", "--config", "verify_ground.json"];
    let a = run(&args);
    let b = run(&args);
    let c = run_env(&args, &[("PAULIVERIFY_THREADS", "3")]);
    assert!(a.status.success() && c.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let g1 = run(&["gen-hypergraph", "--n", "6", "--seed", "9"]);
    let g2 = run_env(&["gen-hypergraph", "--n", "6", "--seed", "9"], &[("PAULIVERIFY_THREADS", "2")]);
    assert_eq!(g1.stdout, g2.stdout);
}

#[test]
fn gen_hypergraph_echoes_entropy_seed() {
    let out = run(&["gen-hypergraph", "--n", "4"]);
    let v = stdout_json(&out);
    assert_eq!(v["n_vertices"], 4);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("seed"), "stderr: {err}");
}

#[test]
fn out_flag_and_trials_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("report.json");
    let csv_path = dir.path().join("trials.csv");
    let out = run(&[
        "verify",
        "--config",
        "verify_hyper_honest.json",
        "--out",
        out_path.to_str().unwrap(),
        "--trials-csv",
        csv_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(report["accepted"], true);
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    // Header plus four groups of k = 100 trials.
    assert_eq!(csv.lines().count(), 401);

    // The report feeds iqp-margin.
    let margin = stdout_json(&run(&["iqp-margin", "--report", out_path.to_str().unwrap()]));
    assert_eq!(margin["minimal_k"]["fourteenth_root"].as_f64().unwrap().round(), 74112.0);
}

#[test]
fn exit_codes() {
    // Usage error.
    let out = run(&["params", "--protocol", "hypergraph"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_json(&out)["error"]["kind"], "usage");

    // Invalid input: ground schedule without R.
    let out = run(&["params", "--protocol", "ground", "--n", "3"]);
    assert_eq!(out.status.code(), Some(1));

    // Missing file.
    let out = run(&["inspect", "--protocol", "hypergraph", "--target", "nope.json"]);
    assert_eq!(out.status.code(), Some(1));

    // Paper mode at N = 3 is astronomical.
    let out = run(&["verify", "--config", "verify_hyper_honest.json", "--mode", "paper"]);
    assert_eq!(out.status.code(), Some(1));

    // Size cap: a 20-qubit dense simulation.
    let dir = tempfile::tempdir().unwrap();
    let big = dir.path().join("big.json");
    let edges: Vec<Vec<usize>> = (0..19).map(|i| vec![i, i + 1]).collect();
    std::fs::write(&big, serde_json::json!({"n_vertices": 20, "edges": edges}).to_string()).unwrap();
    let out = run(&["ppass", "--protocol", "hypergraph", "--target", big.to_str().unwrap(), "--state", r#"{"kind":"ideal"}"#]);
    assert_eq!(out.status.code(), Some(2));
    let err = error_json(&out);
    assert_eq!(err["error"]["exit_code"], 2);
}

#[test]
fn params_k_override() {
    let v = stdout_json(&run(&["params", "--protocol", "hypergraph", "--n", "2", "--k-override", "4194304"]));
    assert_eq!(v["k"], "4194304");
    let below = run(&["params", "--protocol", "hypergraph", "--n", "2", "--k-override", "100"]);
    assert_eq!(below.status.code(), Some(1));
}

#[test]
fn robustness_endpoint() {
    let v = stdout_json(&run(&["robustness", "--config", "verify_hyper_honest.json", "--grid", "0,0.3", "--runs", "20"]));
    let points = v["points"].as_array().unwrap();
    assert_eq!(points.len(), 2);
    assert_eq!(points[0]["accepted"], 20);
    assert_eq!(points[1]["bound_label"], "paper");
}

#[test]
fn selftest_quick() {
    let v = stdout_json(&run(&["selftest", "--quick", "--seed", "1"]));
    assert_eq!(v["passed"], true);
}
