use serde_json::Value;
use std::process::{Command, Output};

fn barnes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_barnes"))
        .args(args)
        .env_remove("BARNES_TERM_CAP")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn eval_basel() {
    let out = barnes(&[
        "eval",
        "--a",
        "1",
        "--w",
        "1",
        "--sigma",
        "2",
        "--t",
        "0",
        "--rel-tol",
        "1e-12",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let re = v["re"].as_f64().unwrap();
    assert!((re - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-11);
    assert_eq!(v["im"].as_f64().unwrap(), 0.0);
    for key in ["err_estimate", "err_kind", "method", "terms_used", "config"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["config"]["eval_config"]["term_cap"].as_f64(), Some(1e8));
}

#[test]
fn eval_domain_errors_exit_two() {
    let out = barnes(&["eval", "--a", "-1", "--w", "1", "--sigma", "2", "--t", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("shift"));
    let near_pole = barnes(&[
        "eval",
        "--a",
        "1",
        "--w",
        "1,1.41421356",
        "--sigma",
        "2.0000000001",
        "--t",
        "0",
    ]);
    assert_eq!(near_pole.status.code(), Some(2));
    let ok = barnes(&[
        "eval",
        "--a",
        "1",
        "--w",
        "1,1.41421356",
        "--sigma",
        "1.5",
        "--t",
        "0.5",
    ]);
    assert_eq!(ok.status.code(), Some(0));
    let usage = barnes(&["eval", "--a", "1"]);
    assert_eq!(usage.status.code(), Some(2));
}

#[test]
fn budget_errors_exit_three() {
    let out = barnes(&[
        "eval",
        "--a",
        "1",
        "--w",
        "1,1",
        "--sigma",
        "2.5",
        "--t",
        "100",
        "--method",
        "direct",
        "--term-cap",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let env = Command::new(env!("CARGO_BIN_EXE_barnes"))
        .args([
            "eval", "--a", "1", "--w", "1,1", "--sigma", "2.5", "--t", "100", "--method", "direct",
        ])
        .env("BARNES_TERM_CAP", "10")
        .output()
        .unwrap();
    assert_eq!(env.status.code(), Some(3));
}

#[test]
fn approx_method_records_truncation() {
    let out = barnes(&[
        "eval",
        "--a",
        "1",
        "--w",
        "1,1.4142135623730951",
        "--sigma",
        "2.2",
        "--t",
        "5",
        "--method",
        "approx",
        "--x",
        "40",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["method"], "approx_formula");
    assert_eq!(v["err_kind"], "heuristic_estimate");
    assert_eq!(v["config"]["x"].as_f64(), Some(40.0));
    let re = v["re"].as_f64().unwrap();
    assert!((re - 0.873_818_370_967_065_4).abs() < 1e-2);
}

#[test]
fn tilde_rational_unit_weights() {
    let out = barnes(&[
        "tilde",
        "--a",
        "1",
        "--w",
        "1/1,1/1",
        "--sigma",
        "1.75",
        "--weights-mode",
        "rational",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert!((v["value"].as_f64().unwrap() - 2.612_375_348_685_488).abs() < 1e-8);
    assert_eq!(v["path"], "rational_series");
    assert!(v["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn tilde_independent_and_warnings() {
    let out = barnes(&[
        "tilde",
        "--a",
        "1",
        "--w",
        "1",
        "--sigma",
        "1.2",
        "--weights-mode",
        "independent",
    ]);
    let v = json_of(&out);
    // ζ(2.4)
    assert!((v["value"].as_f64().unwrap() - 1.383_342_858_840_735_8).abs() < 1e-9);

    let out = barnes(&[
        "tilde",
        "--a",
        "1",
        "--w",
        "1,1",
        "--sigma",
        "1.75",
        "--weights-mode",
        "independent",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert!(v["warnings"].as_array().unwrap().len() >= 2);
}

#[test]
fn tilde_rejects_unsupported_structures() {
    let mixed = barnes(&["tilde", "--a", "1", "--w", "1/2,1/3,1.414", "--sigma", "3"]);
    assert_eq!(mixed.status.code(), Some(2));
    let conflict = barnes(&[
        "tilde",
        "--a",
        "1",
        "--w",
        "1,1.5",
        "--sigma",
        "3",
        "--weights-mode",
        "rational",
    ]);
    assert_eq!(conflict.status.code(), Some(2));
    let low = barnes(&[
        "tilde",
        "--a",
        "1",
        "--w",
        "1/1,1/1",
        "--sigma",
        "1.4",
        "--weights-mode",
        "rational",
    ]);
    assert_eq!(low.status.code(), Some(2));
}

#[test]
fn meansquare_csv_trace() {
    let out = barnes(&[
        "meansquare",
        "--a",
        "1",
        "--w",
        "1",
        "--sigma",
        "2",
        "--T",
        "200",
        "--checkpoints",
        "50,100,200",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "T,I,evals"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 3);
    let vals: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    let zeta4 = std::f64::consts::PI.powi(4) / 90.0;
    assert!((vals[2] / 200.0 / zeta4 - 1.0).abs() < 0.02);
    // 17 significant digits.
    assert_eq!(rows[0][0], "5.0000000000000000e1");
}

#[test]
fn meansquare_validation_and_output_file() {
    let bad = barnes(&[
        "meansquare",
        "--a",
        "1",
        "--w",
        "1",
        "--sigma",
        "2",
        "--T",
        "0.5",
    ]);
    assert_eq!(bad.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    let out = barnes(&[
        "meansquare",
        "--a",
        "1",
        "--w",
        "1",
        "--sigma",
        "1.5",
        "--T",
        "20",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# config="));
    assert_eq!(data_rows(&text).len(), 1);
}

#[test]
fn meansquare_worker_counts_agree() {
    let run = |w: &str| {
        let out = barnes(&[
            "meansquare",
            "--a",
            "1",
            "--w",
            "1",
            "--sigma",
            "1.1",
            "--T",
            "40",
            "--checkpoints",
            "10,20",
            "--workers",
            w,
        ]);
        assert_eq!(out.status.code(), Some(0));
        data_rows(&String::from_utf8(out.stdout).unwrap())
    };
    assert_eq!(run("1"), run("3"));
}

#[test]
fn verify_pass_above_r() {
    let out = barnes(&[
        "verify",
        "--a",
        "1",
        "--w",
        "1",
        "--sigma",
        "1.25",
        "--T-grid",
        "50,100,200,400",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["regime"], "sigma_above_r");
    assert_eq!(v["pass"], true);
    assert_eq!(v["predicted_slope_bound"].as_f64(), Some(0.0));
    assert_eq!(v["residuals"].as_array().unwrap().len(), 4);
    assert!(v["config"]["args"]["T_grid"].is_array());
}

#[test]
fn verify_domain_and_self_test() {
    let low = barnes(&[
        "verify",
        "--a",
        "1",
        "--w",
        "1",
        "--sigma",
        "-0.5",
        "--T-grid",
        "10,20,40,80",
    ]);
    assert_eq!(low.status.code(), Some(2));
    let st = barnes(&["verify", "--self-test"]);
    assert_eq!(st.status.code(), Some(0));
    let v = json_of(&st);
    assert_eq!(v["pass"], true);
    assert_eq!(v["instances"].as_u64(), Some(300));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(
        &path,
        "# Basel\na = 1\nw = 1\nsigma = 3\nt = 0\nrel-tol = 1e-12\n",
    )
    .unwrap();
    let cfg = path.to_str().unwrap();
    let from_file = json_of(&barnes(&["eval", "--config", cfg]));
    assert!((from_file["re"].as_f64().unwrap() - 1.202_056_903_159_594_3).abs() < 1e-11);
    let overridden = json_of(&barnes(&["eval", "--config", cfg, "--sigma", "2"]));
    assert!(
        (overridden["re"].as_f64().unwrap() - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-11
    );
    assert_eq!(overridden["config"]["args"]["sigma"].as_f64(), Some(2.0));

    std::fs::write(&path, "a 1\n").unwrap();
    assert_eq!(barnes(&["eval", "--config", cfg]).status.code(), Some(2));
}

#[test]
fn identical_runs_are_bit_identical() {
    let args = [
        "eval", "--a", "0.5", "--w", "1,2.5", "--sigma", "1.3", "--t", "17", "--format", "csv",
    ];
    assert_eq!(barnes(&args).stdout, barnes(&args).stdout);
}
