use std::path::{Path, PathBuf};
use std::process::Command;

use qpreserve::generators::{random_stochastic_channel, random_unitary};
use qpreserve::io::{channel_to_json, state_to_json};
use qpreserve::{DensityMatrix, KrausChannel, ToleranceConfig};
use serde_json::Value;
use tempfile::TempDir;

fn qpreserve() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qpreserve"));
    cmd.env_remove("TOL_EQ").env_remove("TOL_FIX").env_remove("TOL_PSD");
    cmd
}

/// Runs the binary and returns (exit code, parsed stdout).
fn run(args: &[&str]) -> (i32, Value) {
    run_with(qpreserve().args(args))
}

fn run_with(cmd: &mut Command) -> (i32, Value) {
    let out = cmd.output().expect("binary runs");
    let text = String::from_utf8(out.stdout).expect("utf-8 output");
    let value = serde_json::from_str(&text).unwrap_or(Value::Null);
    (out.status.code().expect("exit code"), value)
}

fn put(dir: &TempDir, name: &str, value: &Value) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, value.to_string()).unwrap();
    path
}

fn channel(dir: &TempDir, name: &str, phi: &KrausChannel) -> String {
    put(dir, name, &channel_to_json(phi)).display().to_string()
}

fn state(dir: &TempDir, name: &str, rho: &DensityMatrix) -> String {
    put(dir, name, &state_to_json(rho)).display().to_string()
}

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn f(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

#[test]
fn analyze_state_reports_entropy_and_rank() {
    let dir = TempDir::new().unwrap();
    let mixed = state(&dir, "mixed.json", &DensityMatrix::maximally_mixed(2));
    let (code, out) = run(&["analyze-state", &mixed]);
    assert_eq!(code, 0);
    assert_eq!(out["status"], "ok");
    assert!((f(&out["report"]["entropy"]) - 1.0).abs() < 1e-12);
    assert_eq!(out["report"]["rank"], 2);

    let pure = state(&dir, "pure.json", &DensityMatrix::basis_state(3, 1));
    let (code, out) = run(&["analyze-state", &pure]);
    assert_eq!(code, 0);
    assert!(f(&out["report"]["entropy"]).abs() < 1e-12);
    assert_eq!(out["report"]["rank"], 1);
}

#[test]
fn malformed_input_exits_with_error() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"dim\": 2, \"matrix\": [[1]]").unwrap();
    let (code, out) = run(&["analyze-state", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert_eq!(out["status"], "error");

    let (code, _) = run(&["analyze-state", "/nonexistent/state.json"]);
    assert_eq!(code, 2);
    let (code, _) = run(&["no-such-command"]);
    assert_eq!(code, 2);
}

#[test]
fn analyze_pair_verdicts() {
    let dir = TempDir::new().unwrap();
    let u = KrausChannel::unitary(random_unitary(3, 5), &tol()).unwrap();
    let rho = qpreserve::generators::random_density(3, 2, 6).unwrap();
    let (code, out) = run(&["analyze-pair", &channel(&dir, "u.json", &u), &state(&dir, "r.json", &rho)]);
    assert_eq!(code, 0);
    assert_eq!(out["report"]["agreement"], true);

    let dep = channel(&dir, "dep.json", &KrausChannel::fully_depolarizing(2));
    let pure = state(&dir, "pure.json", &DensityMatrix::basis_state(2, 0));
    let (code, out) = run(&["analyze-pair", &dep, &pure]);
    assert_eq!(code, 1);
    assert_eq!(out["status"], "violated");
    assert!((f(&out["report"]["entropy_gap"]).abs() - 1.0).abs() < 1e-12);

    let damp = channel(&dir, "damp.json", &KrausChannel::amplitude_damping(0.3));
    let (code, out) = run(&["analyze-pair", &damp, &pure]);
    assert_eq!(code, 2);
    assert_eq!(out["report"]["error"], "not_bistochastic");
}

fn dims(out: &Value) -> Vec<(u64, u64)> {
    out["report"]["dims"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| (d[0].as_u64().unwrap(), d[1].as_u64().unwrap()))
        .collect()
}

#[test]
fn decompose_known_channels() {
    let dir = TempDir::new().unwrap();
    let (code, out) = run(&["decompose", &channel(&dir, "deph.json", &KrausChannel::dephasing(3))]);
    assert_eq!(code, 0);
    assert_eq!(dims(&out), vec![(1, 1); 3]);

    let u = KrausChannel::unitary(random_unitary(3, 1), &tol()).unwrap();
    let (code, out) = run(&["decompose", &channel(&dir, "u.json", &u)]);
    assert_eq!(code, 0);
    assert_eq!(dims(&out), vec![(3, 1)]);
    assert_eq!(out["report"]["fixed_point_dim"], 9);

    let dep = channel(&dir, "dep.json", &KrausChannel::depolarizing(3, 0.5));
    let mixed = state(&dir, "mixed.json", &DensityMatrix::maximally_mixed(3));
    let (code, out) = run(&["decompose", &dep, "--state", &mixed]);
    assert_eq!(code, 0);
    assert_eq!(dims(&out), vec![(1, 3)]);
    assert!(out["report"]["verification"].is_object());

    // a state that is not preserved fails the factorization check
    let pure = state(&dir, "pure.json", &DensityMatrix::basis_state(3, 0));
    let (code, out) = run(&["decompose", &dep, "--state", &pure]);
    assert_eq!(code, 1);
    assert_eq!(out["status"], "violated");
}

#[test]
fn map_entropy_values_and_comparison() {
    let dir = TempDir::new().unwrap();
    let (code, out) = run(&["map-entropy", &channel(&dir, "id.json", &KrausChannel::identity(2))]);
    assert_eq!(code, 0);
    assert!(f(&out["report"]["map_entropy"]).abs() < 1e-10);

    let dep = channel(&dir, "dep.json", &KrausChannel::fully_depolarizing(2));
    let (_, out) = run(&["map-entropy", &dep]);
    assert!((f(&out["report"]["map_entropy"]) - 2.0).abs() < 1e-8);

    let u = KrausChannel::unitary(random_unitary(2, 3), &tol()).unwrap();
    let psi = channel(&dir, "psi.json", &random_stochastic_channel(2, 2, 4));
    let (code, out) = run(&["map-entropy", &channel(&dir, "u.json", &u), &psi]);
    assert_eq!(code, 0);
    assert_eq!(out["report"]["agreement"], true);

    let (code, _) = run(&["map-entropy", &dep, &psi]);
    assert_eq!(code, 1);
}

#[test]
fn classical_check_batches() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("perm.csv");
    std::fs::write(&csv, "# swap\n2\n0,1\n1,0\n0.3,0.7\n3\n1,0,0\n0,0,1\n0,1,0\n0.2,0.3,0.5\n").unwrap();
    let (code, out) = run(&["classical-check", csv.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(out["report"]["summary"]["count"], 2);
    assert_eq!(out["report"]["summary"]["preserved"], 2);

    let json = put(
        &dir,
        "avg.json",
        &serde_json::json!([{ "dim": 2, "matrix": [[0.5, 0.5], [0.5, 0.5]], "p": [0.9, 0.1] }]),
    );
    let (code, out) = run(&["classical-check", json.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(out["report"]["summary"]["preserved"], 0);

    let column_only = put(
        &dir,
        "col.json",
        &serde_json::json!({ "dim": 2, "matrix": [[1.0, 1.0], [0.0, 0.0]], "p": [0.5, 0.5] }),
    );
    let (code, out) = run(&["classical-check", column_only.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert_eq!(out["status"], "error");
}

fn synthesize(spec: &str, seed: &str) -> (i32, Value, TempDir) {
    let dir = TempDir::new().unwrap();
    let out_dir = dir.path().join("out");
    let (code, out) = run(&["synthesize", "--spec", spec, "--seed", seed, "--out-dir", out_dir.to_str().unwrap()]);
    (code, out, dir)
}

fn exists(dir: &Path, name: &str) -> bool {
    dir.join("out").join(name).is_file()
}

#[test]
fn synthesize_writes_preserving_pairs() {
    for spec in ["4x1", "1x4", "2x1,1x2"] {
        let (code, out, dir) = synthesize(spec, "7");
        assert_eq!(code, 0, "{spec}: {out}");
        for name in ["channel.json", "state.json", "structure.json"] {
            assert!(exists(dir.path(), name), "{spec}: missing {name}");
        }
        let channel = dir.path().join("out/channel.json");
        let state = dir.path().join("out/state.json");
        let (code, _) = run(&["analyze-pair", channel.to_str().unwrap(), state.to_str().unwrap()]);
        assert_eq!(code, 0, "{spec}");
    }
    let (code, _, _) = synthesize("2y1", "0");
    assert_eq!(code, 2);
}

#[test]
fn tolerance_flags_override_environment() {
    let (code, out) = run_with(qpreserve().env("TOL_EQ", "1e-5").args(["gen", "state", "--dim", "2", "--out", "/dev/null"]));
    assert_eq!(code, 0);
    assert!((f(&out["tolerances"]["eq"]) - 1e-5).abs() < 1e-20);

    let (_, out) = run_with(
        qpreserve()
            .env("TOL_EQ", "1e-5")
            .args(["--tol-eq", "1e-7", "gen", "state", "--dim", "2", "--out", "/dev/null"]),
    );
    assert!((f(&out["tolerances"]["eq"]) - 1e-7).abs() < 1e-20);

    let (code, out) = run(&["--tol-eq=-1", "gen", "state", "--dim", "2", "--out", "/dev/null"]);
    assert_eq!(code, 2);
    assert_eq!(out["status"], "error");
}

#[test]
fn gen_prints_loadable_objects() {
    let (code, out) = run(&["gen", "bistochastic-channel", "--dim", "3", "--seed", "2"]);
    assert_eq!(code, 0);
    assert_eq!(out["dim"], 3);
    assert_eq!(out["kraus"].as_array().unwrap().len(), 2);
    qpreserve::io::channel_from_json(&out.to_string(), &tol()).unwrap();

    let (_, out) = run(&["gen", "state", "--dim", "3", "--rank", "1"]);
    let rho = qpreserve::io::state_from_json(&out.to_string(), &tol()).unwrap();
    assert_eq!(rho.rank(&tol()), 1);

    let (code, out) = run(&["gen", "preserving-classical", "--dim", "4", "--seed", "9"]);
    assert_eq!(code, 0);
    assert_eq!(out["p"].as_array().unwrap().len(), 4);

    let (code, _) = run(&["gen", "state", "--dim", "0"]);
    assert_eq!(code, 2);
}
