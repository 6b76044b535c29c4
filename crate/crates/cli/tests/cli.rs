use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vortexlab")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    assert_eq!(code(out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn config(name: &str) -> String {
    configs().join(name).to_str().unwrap().to_owned()
}

#[test]
fn shoot_at_zero_height_is_topological() {
    let v = json(&run(&["shoot", "--tau", "1", "--s", "0", "--nu", "0", "--json"]));
    assert_eq!(v["bc_type"], "Topological");
    assert_eq!(v["beta"].as_f64().unwrap(), 0.0);
}

#[test]
fn shoot_below_zero_is_type_one() {
    let v = json(&run(&["shoot", "--tau", "1", "--s", "-1", "--json"]));
    assert_eq!(v["bc_type"], "NonTopologicalI");
    assert!(v["beta"].as_f64().unwrap() > 4.0);
}

#[test]
fn shoot_writes_a_profile() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("profile.csv");
    let out = run(&["shoot", "--tau", "1", "--s", "-1", "--out", csv.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.lines().count() > 100);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&run(&["shoot", "--s", "0"])), 1);
    assert_eq!(code(&run(&["beta-curve", "--tau", "1", "--s-min", "0", "--s-max", "1", "--n", "0"])), 1);
    assert_eq!(code(&run(&["no-such-command"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn beta_curve_for_positive_heights() {
    let v = json(&run(&["beta-curve", "--tau", "1", "--s-min", "0.5", "--s-max", "3", "--n", "8", "--json"]));
    assert_eq!(v["failures"], 0);
    assert_eq!(v["monotone_violations"], 0);
    assert!(v["beta_first"].as_f64().unwrap() < -4.0);
    assert!(v["beta_last"].as_f64().unwrap() < -4.0);
}

#[test]
fn config_errors_name_the_field() {
    let c = config("one_vortex.json");
    let out = run(&["torus", "--config", &c, "--override", "grid=[60,64]"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("/grid"));

    let out = run(&["torus", "--config", &c, "--override", "colour=3"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));

    let out = run(&["torus", "--config", "/nonexistent/cfg.json"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn torus_solve_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("field");
    let stem = stem.to_str().unwrap();
    let v = json(&run(&["torus", "--config", &config("one_vortex.json"), "--out", stem, "--json"]));
    assert_eq!(v["converged"], true);

    let out = run(&["verify", "--field", stem]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().any(|l| l.starts_with("PASS total_mass")));
    assert!(!text.contains("FAIL"));

    let v = json(&run(&["stability", "--field", stem, "--json"]));
    assert_eq!(v["classification"], "strictly_stable");
}

#[test]
fn zero_field_verifies() {
    let out = run(&["verify", "--config", &config("one_vortex.json"), "--override", "vortices=[]"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn verify_failure_exits_three() {
    let out = run(&[
        "verify",
        "--config",
        &config("one_vortex.json"),
        "--override",
        "verify.pohozaev_tol=1e-9",
    ]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL pohozaev"));
}

#[test]
fn non_convergence_exits_two() {
    let out = run(&[
        "torus",
        "--config",
        &config("one_vortex.json"),
        "--override",
        "epsilon=0.5",
        "--override",
        "grid=[32,32]",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn radial_stability_of_type_one() {
    let v = json(&run(&["stability", "--config", &config("type_one_radial.json"), "--json"]));
    assert_eq!(v["classification"], "unstable");
    assert!(v["eigenvalue"].as_f64().unwrap() < 0.0);
}

#[test]
fn one_vortex_sweep_is_uniformly_zero() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let v = json(&run(&[
        "sweep",
        "--config",
        &config("sweep_one_vortex.json"),
        "--out",
        csv.to_str().unwrap(),
        "--json",
    ]));
    assert_eq!(v["verdict"]["kind"], "A_uniform_zero");
    assert_eq!(v["squared_ratio"]["passed"], true);
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(rows.lines().count(), 4);
    assert!(rows.starts_with("epsilon,"));
}

#[test]
fn runs_are_deterministic() {
    let args = ["torus", "--config", &config("pair.json"), "--json"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}
