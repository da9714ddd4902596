//! End-to-end tests of the `mvf` binary: output formats and exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture() -> String {
    let mut path = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    path.pop();
    path.pop();
    path.push("fixtures/standard.mvf");
    path.to_str().unwrap().to_string()
}

fn mvf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mvf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn eval_prints_the_multivector_text_form() {
    let out = mvf(&["eval", &fixture(), "-f", "pos", "-p", "0.3,0.4,0.5"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "0.3*b1 + 0.4*b2 + 0.5*b3\n");
}

#[test]
fn eval_unknown_field_exits_2() {
    let out = mvf(&["eval", &fixture(), "-f", "nope", "-p", "0,0,0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("no field named `nope`"));
}

#[test]
fn eval_out_of_domain_exits_2() {
    let out = mvf(&["eval", &fixture(), "-f", "pos", "-p", "2,0,0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("outside the declared domain"));
}

#[test]
fn eval_wrong_point_length_exits_2() {
    let out = mvf(&["eval", &fixture(), "-f", "pos", "-p", "1,2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn parse_errors_exit_1_with_line_col() {
    let dir = std::env::temp_dir();
    let path = dir.join("mvf_cli_bad_input.mvf");
    std::fs::write(&path, "dim 2\nfield F = x1 +").unwrap();
    let out = mvf(&["eval", path.to_str().unwrap(), "-f", "F", "-p", "0,0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("2:14: expected an expression"));
}

#[test]
fn derive_of_position_field_along_b1() {
    let out = mvf(&["derive", &fixture(), "-f", "pos", "-a", "1,0,0", "-p", "0.9,0.9,0.9"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "1*b1\n");
}

#[test]
fn derive_without_point_prints_the_expression() {
    let out = mvf(&["derive", &fixture(), "-f", "pos", "-a", "1,0,0"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "b1\n");
}

#[test]
fn derive_missing_direction_exits_2() {
    let out = mvf(&["derive", &fixture(), "-f", "pos", "-p", "0,0,0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("missing direction"));
}

#[test]
fn derive_fd_agrees_with_symbolic() {
    let out = mvf(&[
        "derive", &fixture(), "-f", "biv", "-a", "1,0,0", "--fd", "1e-5", "-p", "0.5,0.5,0.5",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let line = text
        .lines()
        .find(|l| l.starts_with("fd discrepancy:"))
        .expect("discrepancy line");
    let value: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(value <= 1e-6, "fd discrepancy {value}");
}

#[test]
fn derive_with_named_direction_field() {
    let out = mvf(&["derive", &fixture(), "-f", "s", "-a", "rot", "-p", "0.2,0.3,0.4"]);
    assert!(out.status.success());
}

#[test]
fn derive_in_chart_coordinates() {
    // d/dr of the radial field r b1 in polar coordinates is b1
    let out = mvf(&["derive", &fixture(), "-c", "polar", "-f", "pos", "-a", "1,0,0", "-p", "1,0.5,0"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "1*b1\n");
}

#[test]
fn check_passes_on_the_bundled_fixture() {
    let out = mvf(&["check", &fixture()]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.lines().count() > 30);
    for line in text.lines() {
        assert!(line.starts_with("PASS "), "unexpected line: {line}");
    }
}

#[test]
fn check_below_rounding_floor_exits_3() {
    let out = mvf(&["check", &fixture(), "--tol", "1e-15", "--samples", "20"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).lines().any(|l| l.starts_with("FAIL ")));
}

#[test]
fn check_json_lines_parse_and_are_deterministic() {
    let args = ["check", &fixture(), "--json", "--seed", "42", "--samples", "20"];
    let out1 = mvf(&args);
    let out2 = mvf(&args);
    assert!(out1.status.success());
    assert_eq!(out1.stdout, out2.stdout, "same seed must reproduce bytes");
    for line in stdout(&out1).lines() {
        let value: serde_json::Value = serde_json::from_str(line).expect("json line");
        assert!(value.get("identity").is_some());
        assert_eq!(value.get("seed").unwrap().as_u64(), Some(42));
        assert!(value.get("pass").unwrap().as_bool().unwrap());
    }
}

#[test]
fn different_seed_changes_sampled_residuals() {
    let out1 = mvf(&["check", &fixture(), "--json", "--seed", "1", "--samples", "20"]);
    let out2 = mvf(&["check", &fixture(), "--json", "--seed", "2", "--samples", "20"]);
    assert_ne!(out1.stdout, out2.stdout);
}

#[test]
fn frames_prints_expressions_and_values() {
    let out = mvf(&["frames", &fixture(), "-c", "polar", "-p", "1,0,0"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("covariant_1 = cos(x2) * b1 + sin(x2) * b2"));
    assert!(text.contains("covariant_1 at point: 1, 0, 0"));
    assert!(text.contains("contravariant_3"));
}

#[test]
fn frames_unknown_chart_exits_2() {
    let out = mvf(&["frames", &fixture(), "-c", "nope"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn jacobian_column_at_quarter_turn() {
    let out = mvf(&["jacobian", &fixture(), "-c", "polar", "-p", "2,1.5707963267948966,0"]);
    assert!(out.status.success());
    let text = stdout(&out);
    // image of b1 is the first row of the evaluated matrix
    assert!(text.lines().any(|l| l == "0, 1, 0"), "output:\n{text}");
}

#[test]
fn jacobian_singular_locus_exits_4() {
    let out = mvf(&["jacobian", &fixture(), "-c", "polar", "-p", "0,1,0"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("condition estimate"));
}

#[test]
fn jacobian_inverse_on_the_skew_chart() {
    let out = mvf(&["jacobian", &fixture(), "-c", "skew", "--inverse", "-p", "0.1,0.2,0.3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    // rows of d forward^nu / d x_o^mu for the linear map
    assert!(text.lines().any(|l| l == "1, 0, 0"));
    assert!(text.lines().any(|l| l == "1, 1, 0"));
    assert!(text.lines().any(|l| l == "0, 0, 2"));
}

#[test]
fn missing_file_exits_2() {
    let out = mvf(&["eval", "/nonexistent.mvf", "-f", "pos", "-p", "0,0,0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn files_without_a_domain_evaluate_anywhere() {
    let dir = std::env::temp_dir();
    let path = dir.join("mvf_cli_plane.mvf");
    std::fs::write(&path, "dim 2\nfield pos = x1*b1 + x2*b2\n").unwrap();
    let out = mvf(&["eval", path.to_str().unwrap(), "-f", "pos", "-p", "3,4"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "3*b1 + 4*b2\n");
}
