//! End-to-end checks of the `fluidspace` binary: exit codes, JSON output,
//! seed handling and determinism.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fluidspace"))
        .args(args)
        .env_remove("FLUIDSPACE_SEED")
        .output()
        .expect("binary runs")
}

fn stdout_json(output: &Output) -> serde_json::Value {
    serde_json::from_slice(&output.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&output.stdout)
        )
    })
}

#[test]
fn analyze_builtin_passes_with_exit_zero() {
    let output = run(&["analyze", "desitter-torse"]);
    assert!(output.status.success(), "{output:?}");
    let json = stdout_json(&output);
    assert_eq!(json["schema"], "1");
    assert_eq!(json["pass"], true);
    assert!((json["results"]["quasi_einstein"]["a"].as_f64().unwrap() - 3.0).abs() < 1e-9);
}

#[test]
fn analyze_malformed_file_exits_two() {
    let dir = std::env::temp_dir().join("fluidspace-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("broken.json");
    std::fs::write(
        &path,
        r#"{
            "name": "broken",
            "coords": ["t"],
            "metric": [["-1", "0", "0", "0"], ["1", "0", "0"], ["1", "0"], ["1"]],
            "xi": ["1", "0", "0", "0"],
            "fluid": {"lambda": 0.0, "k": 1.0, "sigma": 0.0, "p": 0.0}
        }"#,
    )
    .unwrap();
    let output = run(&["analyze", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(err.contains("coords"), "stderr: {err}");
}

#[test]
fn verify_all_passes_on_expanding_entry() {
    let output = run(&["verify", "desitter-torse", "--suite", "all"]);
    assert!(output.status.success(), "{output:?}");
    assert_eq!(stdout_json(&output)["pass"], true);
}

#[test]
fn verify_torse_fails_on_flat_space() {
    let output = run(&["verify", "minkowski", "--suite", "torse"]);
    assert_eq!(output.status.code(), Some(1));
    let json = stdout_json(&output);
    assert_eq!(json["pass"], false);
    // nabla xi = 0 on flat space, so the defect is the spatial projector
    let residual = json["residuals"]["torse_defining_equation"]["value"]
        .as_f64()
        .unwrap();
    assert!((residual - 1.0).abs() < 1e-9);
}

#[test]
fn semisym_suite_refused_on_generic_panel() {
    let output = run(&["verify", "flrw(1 + t^2/4, 0.5, 0.1)", "--suite", "semisym"]);
    assert_eq!(output.status.code(), Some(1));
    let json = stdout_json(&output);
    assert!(json["results"]["refused"]
        .as_str()
        .unwrap()
        .contains("torse-forming"));
}

#[test]
fn solve_soliton_with_potential() {
    let output = run(&[
        "solve-soliton",
        "desitter-torse",
        "--kind",
        "eta-ricci",
        "--potential",
        "-t",
    ]);
    assert!(output.status.success(), "{output:?}");
    let json = stdout_json(&output);
    assert!((json["results"]["coefficients"]["a"].as_f64().unwrap() + 4.0).abs() < 1e-9);
    assert!((json["results"]["coefficients"]["b"].as_f64().unwrap() + 1.0).abs() < 1e-9);
    assert_eq!(json["results"]["laplacian"]["pass"], true);
    assert!(
        (json["results"]["laplacian"]["laplacians"][0]
            .as_f64()
            .unwrap()
            - 3.0)
            .abs()
            < 1e-8
    );
}

#[test]
fn predict_pressure_examples() {
    let output = run(&[
        "predict-pressure",
        "--kind",
        "conharmonic",
        "--direction",
        "st",
        "--lambda",
        "3",
        "--k",
        "1",
    ]);
    assert!(output.status.success());
    let json = stdout_json(&output);
    let mut values: Vec<f64> = json["results"]["values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    values.sort_by(f64::total_cmp);
    assert_eq!(values, vec![2.0, 3.0]);

    let output = run(&[
        "predict-pressure",
        "--kind",
        "projective",
        "--direction",
        "st",
        "--lambda",
        "1",
        "--k",
        "1",
        "--sigma",
        "2",
    ]);
    let json = stdout_json(&output);
    let mut values: Vec<f64> = json["results"]["values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    values.sort_by(f64::total_cmp);
    assert!((values[0] + 2.0).abs() < 1e-12);
    assert!((values[1] - 10.0).abs() < 1e-12);

    let output = run(&[
        "predict-pressure",
        "--kind",
        "riemann",
        "--direction",
        "ts",
        "--sigma",
        "5",
    ]);
    let json = stdout_json(&output);
    assert_eq!(json["results"]["values"].as_array().unwrap().len(), 1);
    assert_eq!(json["results"]["values"][0].as_f64().unwrap(), -5.0);
}

#[test]
fn reports_are_byte_identical_for_equal_seeds() {
    let a = run(&[
        "verify",
        "desitter-torse",
        "--suite",
        "torse",
        "--seed",
        "9",
    ]);
    let b = run(&[
        "verify",
        "desitter-torse",
        "--suite",
        "torse",
        "--seed",
        "9",
    ]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let c = run(&[
        "verify",
        "desitter-torse",
        "--suite",
        "torse",
        "--seed",
        "10",
    ]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn seed_env_fallback_is_used() {
    let output = Command::new(env!("CARGO_BIN_EXE_fluidspace"))
        .args(["analyze", "minkowski"])
        .env("FLUIDSPACE_SEED", "123")
        .output()
        .expect("binary runs");
    assert!(output.status.success());
    assert_eq!(stdout_json(&output)["seed"], 123);
}

#[test]
fn spec_file_round_trips_through_the_cli() {
    let dir = std::env::temp_dir().join("fluidspace-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("expanding.json");
    let spec = fluidspace::catalog::builtin("desitter-torse").unwrap();
    std::fs::write(&path, fluidspace::catalog::serialize_spec(&spec)).unwrap();
    let output = run(&["verify", path.to_str().unwrap(), "--suite", "all"]);
    assert!(output.status.success(), "{output:?}");
}

#[test]
fn usage_errors_exit_two() {
    let output = run(&[
        "predict-pressure",
        "--kind",
        "nonsense",
        "--direction",
        "ts",
    ]);
    assert_eq!(output.status.code(), Some(2));

    // a zero coupling makes every closed form meaningless
    let output = run(&[
        "predict-pressure",
        "--kind",
        "riemann",
        "--direction",
        "ts",
        "--k",
        "0",
    ]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn analyze_strict_exits_one_on_residual_failure() {
    // a generic panel with constant fluid does not solve the field
    // equations, so the analysis residuals fail
    let output = run(&["analyze", "flrw(1 + t^2/4, 0.5, 0.1)", "--strict"]);
    assert_eq!(output.status.code(), Some(1));
    let json = stdout_json(&output);
    assert_eq!(json["pass"], false);

    // without --strict the same run reports failure but exits zero
    let output = run(&["analyze", "flrw(1 + t^2/4, 0.5, 0.1)"]);
    assert_eq!(output.status.code(), Some(0));
    assert_eq!(stdout_json(&output)["pass"], false);
}

#[test]
fn solve_soliton_refused_when_divergence_varies() {
    let output = run(&[
        "solve-soliton",
        "flrw(1 + t^2/4, 0.5, 0.1)",
        "--kind",
        "eta-ricci",
    ]);
    assert_eq!(output.status.code(), Some(1));
    let json = stdout_json(&output);
    assert!(json["results"]["refused"]
        .as_str()
        .unwrap()
        .contains("div(xi)"));
    assert_eq!(json["residuals"]["divergence_spread"]["pass"], false);
}

#[test]
fn analyze_flat_space_marks_pseudo_flags_not_applicable() {
    let output = run(&["analyze", "minkowski"]);
    assert!(output.status.success());
    let json = stdout_json(&output);
    assert_eq!(json["pass"], true);
    assert_eq!(
        json["results"]["nabla_s"]["weakly_pseudo_symmetric"]["applicable"],
        false
    );
    assert_eq!(
        json["results"]["nabla_s"]["pseudo_symmetric"]["applicable"],
        false
    );
}

#[test]
fn verbose_writes_summary_to_stderr() {
    let output = run(&["verify", "desitter-torse", "--suite", "torse", "--verbose"]);
    assert!(output.status.success());
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(err.contains("PASS"), "stderr: {err}");
    // stdout stays pure JSON
    stdout_json(&output);
}
