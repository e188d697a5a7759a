use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn problem(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../problems");
    root.join(format!("{name}.toml")).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_multipole"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("multipole-cli-{}-{name}", std::process::id()))
}

#[test]
fn classify_dice_reports_double_point() {
    let out = run(&["classify", &problem("dice")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["classification"], "double_point_2d");
    assert_eq!(v["phi"]["exact"], "9/2");
    assert_eq!(v["det_hess"]["exact"], "-1/9");
    assert_eq!(v["cone"]["rays"], serde_json::json!([[1, 2], [2, 1]]));
    assert_eq!(v["minimality"]["status"], "heuristically_strictly_minimal");
}

#[test]
fn classify_is_deterministic() {
    let a = run(&["classify", &problem("two_planes")]);
    let b = run(&["classify", &problem("two_planes")]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn classify_nonminimal_prints_report_and_exits_4() {
    let out = run(&["classify", &problem("nonminimal")]);
    assert_eq!(out.status.code(), Some(4));
    let v = json(&out);
    assert_eq!(v["minimality"]["status"], "failed");
    assert!(v["minimality"]["witness"].is_array());
}

#[test]
fn asym_dice_interior() {
    let out = run(&["asym", &problem("dice"), "--direction", "1,1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["theorem"], "double_point_2d");
    assert_eq!(v["leading"]["exact"], "3");
    assert_eq!(v["membership"], "interior");
}

#[test]
fn asym_lemniscate_boundary_and_outside() {
    let out = run(&["asym", &problem("lemniscate"), "--direction", "2,1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["membership"], "boundary");
    assert_eq!(v["boundary_halved"], true);
    let b0 = v["leading"]["b0"].as_f64().unwrap();
    assert!((b0 - 1.0 / 12.0).abs() < 1e-12);

    let out = run(&["asym", &problem("lemniscate"), "--direction", "3,1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("outside the cone"));
}

#[test]
fn asym_nonminimal_needs_flag() {
    let out = run(&["asym", &problem("nonminimal"), "--direction", "1,1"]);
    assert_eq!(out.status.code(), Some(4));
    let out = run(&["asym", &problem("nonminimal"), "--direction", "1,1", "--allow-nonminimal"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let warned = v["warnings"]
        .as_array()
        .unwrap()
        .iter()
        .any(|w| w.as_str().unwrap().contains("minimality check failed"));
    assert!(warned);
}

#[test]
fn asym_tangent_order_m() {
    let out = run(&["asym", &problem("tangent"), "--direction", "1,2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["theorem"], "tangent_2d_order_m");
    assert_eq!(v["leading"]["power"].as_f64(), Some(0.5));
}

#[test]
fn bad_inputs_exit_2() {
    let out = run(&["asym", &problem("dice"), "--direction", "1,x"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["asym", "/nonexistent/problem.toml", "--direction", "1,1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["asym", &problem("dice"), "--direction", "1,1,1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn coeffs_dice_total_degree() {
    let out = run(&["coeffs", &problem("dice"), "--max-total-degree", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,exact,decimal"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 66);
    assert!(rows[0].starts_with("0,0,1,"));
    assert!(text.contains("\n1,1,13/9,"));
}

#[test]
fn coeffs_box_to_file() {
    let path = scratch("coeffs.csv");
    let out = run(&["coeffs", &problem("dice"), "--box", "3,2", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 1 + 4 * 3);
    std::fs::remove_file(path).ok();
}

#[test]
fn compare_two_planes_matches_oracle() {
    let fit = scratch("fit.json");
    let out = run(&[
        "compare",
        &problem("two_planes"),
        "--direction",
        "3,3,2",
        "--scales",
        "10..30",
        "--step",
        "5",
        "--fit",
        fit.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let last = text.lines().find(|l| l.starts_with("90,90,60,")).expect("row at scale 30");
    let rel: f64 = last.rsplit(',').next().unwrap().parse().unwrap();
    assert!(rel <= 0.003, "rel_err {rel}");
    let f: Value = serde_json::from_str(&std::fs::read_to_string(&fit).unwrap()).unwrap();
    assert_eq!(f["model"], "power-law");
    assert!((f["slope"].as_f64().unwrap() + 0.5).abs() < 0.05);
    std::fs::remove_file(fit).ok();
}

#[test]
fn check_dice_passes() {
    let out = run(&["check", &problem("dice"), "--direction", "1,1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["passed"], true);
    let names: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(
        names,
        ["divided_difference", "critical_set", "hessian_finite_difference", "fourier_laplace"]
    );
}

#[test]
fn check_lists_skipped_with_reason() {
    let out = run(&["check", &problem("lemniscate")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let skipped: Vec<&Value> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["status"] == "skipped")
        .collect();
    assert!(!skipped.is_empty());
    assert!(skipped.iter().all(|c| c["detail"]["reason"].is_string()));
}

#[test]
fn coeffs_without_size_is_an_input_error() {
    let out = run(&["coeffs", &problem("dice")]);
    assert_eq!(out.status.code(), Some(2));
}
