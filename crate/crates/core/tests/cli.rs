use std::process::{Command, Output};

use serde_json::Value;

const L3: &str = "D^3 - 1/2*E2*D^2 + (1/2*E2' - 169/100*E4)*D";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mldokit"))
        .args(args)
        .env_remove("MLDOKIT_ORDER")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut a = vec!["--json"];
    a.extend_from_slice(args);
    let o = run(&a);
    let v = serde_json::from_slice(&o.stdout).expect("json output");
    (o.status.code().unwrap(), v)
}

#[test]
fn dims_example() {
    let o = run(&["dims", "--k", "0", "--K", "10"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "5");
}

#[test]
fn convert_l3_to_vz() {
    let o = run(&["convert", "--basis", "vz", "--k", "0", L3]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0, -1039/600*E4, 0, 1");
    let o = run(&["convert", "--basis", "serre", "--k", "0", L3]);
    assert_eq!(stdout(&o), "0, -1571/900*E4, 0, 1");
}

#[test]
fn verify_omega_table() {
    let o = run(&["verify", "omega-table"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("PASS"));
    assert!(out.contains("omega_2 = -1/72*E4"));
}

#[test]
fn mixed_weights_is_usage_error() {
    let o = run(&["eval", "E2 + E4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("mixed weights 2 and 4"));
}

#[test]
fn unknown_flag_and_suite_rejected() {
    assert_eq!(run(&["dims", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["omega"]).status.code(), Some(2));
}

#[test]
fn math_failure_exits_one() {
    let (code, v) = json(&["convert", "--basis", "vz", "--k", "1", "D^2 + E4"]);
    assert_eq!(code, 1);
    assert_eq!(v["ok"], false);
    assert!(v["counterexample"].as_str().unwrap().contains("not modular"));
}

#[test]
fn json_wrapper() {
    let (code, v) = json(&["derive", "E2"]);
    assert_eq!(code, 0);
    assert_eq!(v["subcommand"], "derive");
    assert_eq!(v["ok"], true);
    assert!(v["counterexample"].is_null());
    assert_eq!(v["result"]["weight"], 4);
}

#[test]
fn solve_emits_frobenius_json() {
    let (code, v) = json(&[
        "--order",
        "5",
        "solve",
        "--k",
        "0",
        "D^2 - 1/6*E2*D - 11/3600*E4",
    ]);
    assert_eq!(code, 0);
    let sols = v["result"].as_array().unwrap();
    let alphas: Vec<&str> = sols.iter().map(|s| s["alpha"].as_str().unwrap()).collect();
    assert_eq!(alphas, ["-1/60", "11/60"]);
    assert_eq!(sols[0]["coeffs"][0], "1");
    assert_eq!(sols[0]["residual_order"], "359/60");
}

#[test]
fn order_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_mldokit"))
        .args(["eval", "E4"])
        .env("MLDOKIT_ORDER", "2")
        .output()
        .unwrap();
    assert_eq!(stdout(&o), "1 + 240*q + 2160*q^2 + O(q^(3))");
}

#[test]
fn projection_commands() {
    assert_eq!(stdout(&run(&["pi", "E2^2"])), "E4");
    assert_eq!(stdout(&run(&["pi", "E2'"])), "0");
    let o = run(&["pi", "E2 + 12*Y"]);
    assert!(stdout(&o).contains("degenerate"));
}

#[test]
fn spectrum_and_kernel() {
    let o = run(&["spectrum", "--k", "12"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("lambda = 7/6"));
    let o = run(&["kernel", "--k", "12", "D"]);
    assert_eq!(stdout(&o), "0");
}

#[test]
fn det_of_theta_squares() {
    let o = run(&["--order", "6", "det", "--monic", "theta3^2", "theta4^2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().last().unwrap().starts_with("a_2 = 1 "));
}

#[test]
fn depth_violation_is_math_failure() {
    let (code, v) = json(&["convert", "--k", "1", "E2*D"]);
    assert_eq!(code, 1);
    assert!(v["counterexample"].as_str().unwrap().contains("depth"));
}
