use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_greensign")).args(args).output().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn f(v: &Value) -> f64 {
    match v {
        Value::String(s) if s == "-infinity" => f64::NEG_INFINITY,
        Value::String(s) if s == "infinity" => f64::INFINITY,
        _ => v.as_f64().unwrap(),
    }
}

fn path(name: &str) -> String {
    fixture(name).display().to_string()
}

#[test]
fn check_running_example() {
    let out = run(&["check", &path("t4_running.json")]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["na"], Value::Bool(true));
    assert_eq!(r["indices"]["tau"], serde_json::json!([0, 2]));
    assert_eq!(r["indices"]["delta"], serde_json::json!([0, 3]));
    assert_eq!(r["adjoint_conditions"].as_array().unwrap().len(), 4);
}

#[test]
fn check_failures() {
    let out = run(&["check", &path("t2_neumann.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out)["na"], Value::Bool(false));
    assert_eq!(run(&["check", &path("bad_sigma.json")]).status.code(), Some(3));
    assert_eq!(run(&["check", "/nonexistent/problem.json"]).status.code(), Some(3));
    assert_eq!(run(&["interval", &path("t2_neumann.json")]).status.code(), Some(2));
}

#[test]
fn schema_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.json");
    let text = std::fs::read_to_string(fixture("t4_running.json")).unwrap().replacen('{', "{\"colour\": 1,", 1);
    std::fs::write(&p, text).unwrap();
    let out = run(&["check", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(report(&out)["error"]["kind"], "input");
}

#[test]
fn bad_flags_are_input_errors() {
    assert_eq!(run(&["eigen", &path("t4_running.json"), "--space", "nowhere"]).status.code(), Some(3));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn eigen_spaces_and_directions() {
    let out = run(&["eigen", &path("t4_running.json")]);
    assert_eq!(out.status.code(), Some(0));
    let m = f(&report(&out)["eigenvalue"]["m"]);
    assert!((m / 2.36502 - 1.0).abs() < 1e-4);

    let out = run(&[
        "eigen",
        &path("t4_running.json"),
        "--space",
        "drop-sigma-add-beta",
        "--direction",
        "biggest-negative",
    ]);
    let r = report(&out);
    assert_eq!(r["eigenvalue"]["space"]["label"], "X_{0}^{0,1,2}");
    assert!(f(&r["eigenvalue"]["lambda"]) < 0.0);
    assert!((f(&r["eigenvalue"]["m"]) / 5.553054 - 1.0).abs() < 1e-4);

    let out = run(&["eigen", &path("t4_running.json"), "--space", "drop-sigma-add-alpha"]);
    assert_eq!(report(&out)["eigenvalue"]["space"]["label"], "X_{0,1}^{1,2}");
}

#[test]
fn eigen_not_found_echoes_range() {
    let out = run(&["eigen", &path("t2_dirichlet.json"), "--direction", "least-positive"]);
    assert_eq!(out.status.code(), Some(4));
    let r = report(&out);
    assert_eq!(r["error"]["kind"], "not-found");
    let range = r["error"]["searched"].as_array().unwrap();
    assert_eq!(f(&range[0]), 0.0);
    assert!(f(&range[1]) > 1000.0);
}

#[test]
fn excluded_space_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.json");
    std::fs::write(
        &p,
        r#"{"order": 4, "interval": [0, 1], "coefficients": ["0", "0", "0", "0"], "sigma": [0, 1], "epsilon": [1, 2]}"#,
    )
    .unwrap();
    let out = run(&["eigen", p.to_str().unwrap(), "--space", "drop-sigma-add-alpha"]);
    assert_eq!(out.status.code(), Some(3));
    let out = run(&["necessary", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"], Value::Null);
    assert_eq!(r["nonexistence"]["trigger"], "sigma_k = k-1");
}

#[test]
fn interval_reports() {
    let r = report(&run(&["interval", &path("t4_running.json")]));
    let res = &r["result"];
    assert_eq!(res["classification"], "SIP");
    assert!((f(&res["lower"]["value"]) / -2.36502f64.powi(4) - 1.0).abs() < 4e-4);
    assert_eq!(res["lower"]["closed"], false);
    assert!((f(&res["upper"]["value"]) / (4.0 * PI.powi(4)) - 1.0).abs() < 1e-8);
    assert_eq!(res["upper"]["closed"], true);
    assert_eq!(res["upper"]["source"], "lambda_2''");
    assert_eq!(res["sign_report"]["report"]["classification"], "SIP");
    assert_eq!(res["hypothesis"]["status"], "certified-by-decompose");

    let r = report(&run(&["interval", &path("t2_dirichlet.json")]));
    assert_eq!(r["result"]["lower"]["value"], "-infinity");
    assert!((f(&r["result"]["upper"]["value"]) / (PI * PI) - 1.0).abs() < 1e-8);
    assert_eq!(r["result"]["upper"]["closed"], false);

    let r = report(&run(&["necessary", &path("t4_running.json")]));
    let res = &r["result"];
    assert_eq!(res["necessary_only"], true);
    assert!((f(&res["lower"]["value"]) / -PI.powi(4) - 1.0).abs() < 1e-8);
    assert_eq!(res["lower"]["closed"], true);
}

#[test]
fn nonhomog_reports() {
    let out = run(&["nonhomog", &path("t4_relaxed.json"), "--subsets", r#"{"sigma": [0, 2], "epsilon": [1, 3]}"#]);
    assert_eq!(out.status.code(), Some(0));
    let res = &report(&out)["result"];
    assert!((f(&res["lower"]["value"]) / (-PI.powi(4) / 16.0) - 1.0).abs() < 1e-8);
    assert!((f(&res["upper"]["value"]) / (PI.powi(4) / 4.0) - 1.0).abs() < 1e-8);
    assert_eq!(res["sign_report"]["report"]["classification"], "SIP");

    let out = run(&["nonhomog", &path("t4_relaxed.json"), "--subsets", r#"{"sigma": [0], "epsilon": [3]}"#]);
    assert_eq!(out.status.code(), Some(3));
    let out = run(&["nonhomog", &path("t4_relaxed.json"), "--subsets", "not json"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn green_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("g.csv");
    let out = run(&["green", &path("t4_running.json"), "--M", "0", "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,s,g"));
    let mut found = false;
    for line in lines {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        if v[0] == 1.0 && v[1] == 0.5 {
            assert!((v[2] - 0.0625).abs() < 1e-6);
            found = true;
        }
    }
    assert!(found);
    let side: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("g.json")).unwrap()).unwrap();
    assert_eq!(side["sign"]["classification"], "SIP");
    assert_eq!(side["slices"]["d_alpha_at_a"].as_array().unwrap().len(), 201);

    let out = run(&["green", &path("t2_dirichlet.json"), "--M", &format!("{}", PI * PI), "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(report(&out)["error"]["kind"], "singular");
}

#[test]
fn green_accepts_negative_shift() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("g.csv");
    let out = run(&["green", &path("t2_dirichlet.json"), "--M", "-5", "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(f(&report(&out)["M"]), -5.0);
}

#[test]
fn decompose_window() {
    let out = run(&["decompose", &path("t4_nc.json")]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["covers_interval"], true);
    assert_eq!(r["v"].as_array().unwrap().len(), 4);

    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.json");
    std::fs::write(
        &p,
        r#"{"order": 2, "interval": [0, 1], "coefficients": ["0", "0"], "m_bar": 25, "sigma": [0], "epsilon": [0]}"#,
    )
    .unwrap();
    let out = run(&["decompose", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let r = report(&out);
    let hi = f(&r["window"][1]);
    // W1 = cos 5t of the canonical basis vanishes first, at π/10
    assert!((hi - PI / 10.0).abs() < 1e-3, "window ends at {hi}");
}

#[test]
fn reports_are_deterministic() {
    for args in [
        vec!["interval", "t3.json"],
        vec!["necessary", "t4_nc.json"],
        vec!["check", "t6.json"],
    ] {
        let p = path(args[1]);
        let a = run(&[args[0], &p]);
        let b = run(&[args[0], &p]);
        assert_eq!(a.stdout, b.stdout);
        assert!(a.status.success());
    }
}
