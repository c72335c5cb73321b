use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::{json, Value};
use stratdeform::config::RunConfig;
use stratdeform_cli::{dispatch, EXIT_MALFORMED, EXIT_NUMERICAL, EXIT_UNKNOWN_COMMAND, EXIT_VALIDATION};

fn run(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_stratdeform"))
        .args(args)
        .env_remove("STRATDEFORM_SEED")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary starts");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

fn poly(vars: usize, terms: &[(&[u32], &str)]) -> Value {
    json!({
        "vars": (1..=vars).map(|i| format!("x{i}")).collect::<Vec<_>>(),
        "terms": terms.iter().map(|(e, c)| json!({"exp": e, "re": c})).collect::<Vec<_>>(),
    })
}

/// `F_1 = x1²`, `F_2 = x2² - x1 x2`.
fn two_lines() -> Value {
    json!({"n": 2, "polys": [poly(2, &[(&[2, 0], "1")]), poly(2, &[(&[0, 2], "1"), (&[1, 1], "-1")])]})
}

#[test]
fn unknown_command_exits_64() {
    let out = run(&["frobnicate"], "");
    assert_eq!(out.status.code(), Some(EXIT_UNKNOWN_COMMAND));
    assert_eq!(stdout_json(&out)["error"], "unknown_command");
    assert!(!out.stderr.is_empty());
}

#[test]
fn malformed_json_exits_65() {
    let out = run(&["psi-eval"], "{\"z\": [1, ");
    assert_eq!(out.status.code(), Some(EXIT_MALFORMED));
    let out = run(&["psi-eval"], "{\"z\": 1, \"a\": [0]}");
    assert_eq!(out.status.code(), Some(EXIT_MALFORMED));
}

#[test]
fn domain_violation_exits_2() {
    let out = run(&["psi-eval"], r#"{"z": 0.3, "a": [0, 0.5], "b": [0.1, 0.5]}"#);
    assert_eq!(out.status.code(), Some(EXIT_VALIDATION));
    let out = run(&["psi-eval"], r#"{"z": 0.3, "a": [0.5, 0.5], "b": [0.6, 0.7]}"#);
    assert_eq!(out.status.code(), Some(EXIT_VALIDATION));
}

#[test]
fn psi_eval_at_a_root_returns_its_target() {
    let out = run(&["psi-eval"], r#"{"z": [0.5, 0.25], "a": [0, [0.5, 0.25], 1], "b": [0, [0.6, 0.2], 1.1], "eta": 0.01}"#);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["value"], json!([0.6, 0.2]));
    assert_eq!(v["dpsi_deta"], json!([0.0, 0.0]));
}

#[test]
fn deform_at_t_zero_echoes_points() {
    let input = json!({"system": two_lines(), "t": [0, 0], "points": [[[0.3, 0.1], [0.7, -0.2]], [1, 1], [[-2, 0.5], [0, 0]]]});
    let out = run(&["deform", "--t-radius", "0.01"], &input.to_string());
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    for p in v["points"].as_array().unwrap() {
        assert_eq!(p["input"], p["output"]);
        assert_eq!(p["label_before"], p["label_after"]);
    }
    assert_eq!(v["points"][1]["label_before"]["pattern"], json!([false, true]));
}

#[test]
fn deform_outside_radius_exits_2() {
    let input = json!({"system": two_lines(), "t": [0.5, 0], "points": [[1, 2]]});
    let out = run(&["deform", "--t-radius", "0.01"], &input.to_string());
    assert_eq!(out.status.code(), Some(EXIT_VALIDATION));
}

#[test]
fn ambiguous_classification_exits_3() {
    // |F_2| relative to its scale is about 1e-8: inside the ambiguity band.
    let input = json!({"system": two_lines(), "point": [1, 2e-8]});
    let out = run(&["classify"], &input.to_string());
    assert_eq!(out.status.code(), Some(EXIT_NUMERICAL));
    assert_eq!(stdout_json(&out)["error"], "stratification");
}

#[test]
fn invalid_system_is_reported_with_exit_2() {
    // x1 + x2 at level 1 uses a variable it may not see.
    let input = json!({"n": 2, "polys": [poly(2, &[(&[1, 0], "1"), (&[0, 1], "1")]), poly(2, &[(&[0, 2], "1"), (&[1, 1], "-1")])]});
    let out = run(&["validate-system"], &input.to_string());
    assert_eq!(out.status.code(), Some(EXIT_VALIDATION));
    let v = stdout_json(&out);
    assert_eq!(v["valid"], false);
    assert_eq!(v["failures"][0]["level"], 1);
}

#[test]
fn completed_system_round_trips_through_validation() {
    let top = poly(3, &[(&[1, 1, 1], "1")]);
    let out = run(&["complete-system"], &json!({"n": 3, "top": top}).to_string());
    assert_eq!(out.status.code(), Some(0));
    let sys = stdout_json(&out);
    assert!(sys.get("coordinate_change").is_some(), "x1 x2 x3 needs shears");
    let out = run(&["validate-system"], &sys.to_string());
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn exact_discriminants_count_distinct_values() {
    let out = run(&["discriminants"], r#"{"exact": ["0", "1/2", "1/2", "3"]}"#);
    let v = stdout_json(&out);
    assert_eq!(v["distinct_count"], 3);
    assert_eq!(v["discriminants"][0], json!(["4/1", "0/1"]));
    assert_eq!(v["discriminants"][1], json!(["22/1", "0/1"]));
    assert_eq!(v["discriminants"][3], json!(["0/1", "0/1"]));
}

#[test]
fn tolerance_flags_are_checked() {
    let out = run(&["psi-eval", "--tol", "nonsense=1"], "{}");
    assert_eq!(out.status.code(), Some(EXIT_VALIDATION));
    let out = run(&["psi-eval", "--tol", "snap"], "{}");
    assert_eq!(out.status.code(), Some(EXIT_VALIDATION));
}

#[test]
fn output_is_byte_deterministic() {
    let input = json!({"system": two_lines(), "t": [[0.01, 0.002], [-0.003, 0.004]], "points": [[[0.3, 0.1], [0.7, -0.2]], [1, 1]]});
    let a = run(&["deform-projective", "--seed", "11"], &input.to_string());
    let b = run(&["deform-projective", "--seed", "11"], &input.to_string());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["deform-projective", "--seed", "11", "--jobs", "2"], &input.to_string());
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn seed_falls_back_to_the_environment() {
    let patch = |eq: Value| json!({"dim": 2, "equations": [eq], "inequalities": [], "expected_dim": 1, "param_box": [[-0.5, 0.5], [-0.5, 0.5]]});
    let input = json!({
        "system": two_lines(),
        "z": patch(poly(2, &[(&[1, 0], "1"), (&[0, 0], "-1/5")])),
        "w": patch(poly(2, &[(&[0, 1], "1"), (&[0, 0], "-1/7")])),
        "trials": 4,
    });
    let with_env = |seed: &str| {
        let mut child = Command::new(env!("CARGO_BIN_EXE_stratdeform"))
            .args(["general-position", "--t-radius", "0.01"])
            .env("STRATDEFORM_SEED", seed)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .unwrap();
        child.stdin.take().unwrap().write_all(input.to_string().as_bytes()).unwrap();
        child.wait_with_output().unwrap().stdout
    };
    let flag = run(&["general-position", "--t-radius", "0.01", "--seed", "5"], &input.to_string());
    assert_eq!(flag.status.code(), Some(0));
    assert_eq!(with_env("5"), flag.stdout);
    assert_ne!(with_env("6"), flag.stdout);
}

#[test]
fn dispatch_matches_the_binary() {
    let input = r#"{"w": [0.3, 0.1], "a": [0, 0.5], "b": [0, 0.501], "eta": 0.001}"#;
    let r = dispatch("psi-invert", input, &RunConfig::default());
    assert_eq!(r.code, 0);
    let out = run(&["psi-invert"], input);
    assert_eq!(stdout_json(&out), r.body);
    assert!(r.body["residual"].as_f64().unwrap() <= 1e-9);
}
