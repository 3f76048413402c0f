use std::process::Command;

fn germ(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_germ")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn equiv_exit_codes() {
    let (c, out) = germ(&["equiv", "x*(x^3-y^5)", "x*(x^3+y^5)", "--orientation-preserving"]);
    assert_eq!(c, 1);
    assert!(out.contains("equivalent: false") && out.contains("first differ at byte"));
    let (c, _) = germ(&["equiv", "x*(x^3-y^5)", "x*(x^3+y^5)"]);
    assert_eq!(c, 0);
}

#[test]
fn fukui_output() {
    let (c, out) = germ(&["fukui", "x*(x^3-y^5)*((x^3-y^5)^3-y^17)", "--bound", "30"]);
    assert_eq!(c, 0);
    assert!(out.starts_with("A(f) up to 30: {13, 22..30} + infinity"), "{out}");
    let (_, j) = germ(&["--json", "fukui", "x", "--bound", "3", "--sign", "-"]);
    let v: serde_json::Value = serde_json::from_str(&j).unwrap();
    assert_eq!(v["members"], serde_json::json!([1, 2, 3]));
}

#[test]
fn ordfn_breakpoints() {
    let (_, j) = germ(&["--json", "ordfn", "x^2-y^3", "--branch", "y^(3/2)"]);
    let v: serde_json::Value = serde_json::from_str(&j).unwrap();
    assert_eq!(v["breakpoints"], serde_json::json!([["1", "2"], ["3/2", "3"]]));
    assert_eq!(v["slopes"], serde_json::json!([2, 1]));
}

#[test]
fn edgepoly_and_polygon() {
    let (c, out) = germ(&["edgepoly", "x^2-y^3", "--xi", "3/2"]);
    assert_eq!(c, 0);
    assert_eq!(out, "P(z) = z^2 - 1\nord = 3\n");
    let (_, out) = germ(&["polygon", "x^2-y^3"]);
    assert!(out.contains("xi 3/2"), "{out}");
}

#[test]
fn weighted_with_parameters() {
    let (c, out) = germ(&["weighted", "x^4+t*x^2*y^2+y^4", "x^4+y^4", "--relation", "c1", "--param", "t=6"]);
    assert_eq!(c, 0, "{out}");
    let (c, _) = germ(&["weighted", "x^4+x^2*y^2+y^4", "x^4+y^4", "--relation", "c1"]);
    assert_eq!(c, 1);
}

#[test]
fn input_errors_exit_2() {
    assert_eq!(germ(&["tree", "x^2 +"]).0, 2);
    assert_eq!(germ(&["tree", "x + t"]).0, 2);
    assert_eq!(germ(&["tree", "0"]).0, 2);
    assert_eq!(germ(&["edgepoly", "x^2-y^3", "--xi", "1/0"]).0, 2);
    assert_eq!(germ(&["bogus"]).0, 2);
}

#[test]
fn output_is_deterministic() {
    let args = ["tree", "x*(x^3-y^5)*(x^3+y^5)"];
    let (a, b) = (germ(&args), germ(&args));
    assert_eq!(a, b);
    assert!(a.1.contains("h=5/3"));
    let args = ["--json", "verify-example", "5.1", "--samples", "2000", "--seed", "9"];
    assert_eq!(germ(&args), germ(&args));
}

#[test]
fn verify_examples_pass() {
    for ex in ["5.1", "5.2"] {
        let (c, j) = germ(&["--json", "verify-example", ex, "--samples", "5000", "--seed", "4"]);
        assert_eq!(c, 0, "{j}");
        let v: serde_json::Value = serde_json::from_str(&j).unwrap();
        assert!(v["residual_max"].as_f64().unwrap() < 1e-8);
        assert_eq!(v["seed"], 4);
    }
}
