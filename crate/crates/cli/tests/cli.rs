use std::path::PathBuf;

use partpoisson_cli::run_args;
use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn report(args: &[&str]) -> (i32, Value) {
    let (code, out) = run_args(std::iter::once("partpoisson").chain(args.iter().copied()));
    (code, serde_json::from_str(&out).unwrap_or(Value::Null))
}

fn status<'a>(r: &'a Value, name: &str) -> &'a str {
    r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no check {name}"))["status"]
        .as_str()
        .unwrap()
}

#[test]
fn toml_and_json_inputs_agree() {
    let (a, ra) = report(&["check", "--input", &fixture("so3.toml")]);
    let (b, rb) = report(&["check", "--input", &fixture("so3.json")]);
    assert_eq!((a, b), (0, 0));
    assert_eq!(ra["input_digest"], rb["input_digest"]);
    assert_eq!(ra["report_version"], 1);
}

#[test]
fn helicity_witness_is_reported() {
    let (code, r) = report(&["check", "jacobi", "--input", &fixture("helicity.toml")]);
    assert_eq!(code, 1);
    let c = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "jacobi")
        .unwrap();
    assert_eq!(c["witness"]["value"], "x1 + x2 + x3");
}

#[test]
fn pn_checks() {
    let (code, r) = report(&["check", "pn", "--input", &fixture("pn_planar.toml")]);
    assert_eq!(code, 0, "{r}");
    let (code, r) = report(&["check", "pn", "--input", &fixture("pn_bad.toml")]);
    assert_eq!(code, 1);
    assert_eq!(status(&r, "pPN1"), "fail");
    let (code, _) = report(&["check", "pomega", "--input", &fixture("pomega_4d.toml")]);
    assert_eq!(code, 0);
}

#[test]
fn canonical_restriction_and_projection() {
    let (code, r) = report(&["restrict", "--input", &fixture("canonical_r4.toml")]);
    assert_eq!(code, 0, "{r}");
    assert_eq!(status(&r, "restriction"), "pass");
    let (code, r) = report(&["project", "--input", &fixture("canonical_r4.toml")]);
    assert_eq!(code, 0, "{r}");
    let (code, r) = report(&["project", "--input", &fixture("so3_project.toml")]);
    assert_eq!(code, 1);
    assert_eq!(status(&r, "projection"), "fail");
}

#[test]
fn chain_and_casimir() {
    let (code, r) = report(&["chain", "--input", &fixture("so3.toml")]);
    assert_eq!(code, 0, "{r}");
    assert_eq!(status(&r, "pencil_identity"), "pass");
    let (code, r) = report(&["casimir", "--input", &fixture("sl2.toml")]);
    assert_eq!(code, 0, "{r}");
    assert_eq!(status(&r, "killing_casimir"), "pass");
}

#[test]
fn kdv_fixture_passes() {
    let (code, r) = report(&["kdv", "--input", &fixture("kdv.toml")]);
    assert_eq!(code, 0, "{r}");
    assert_eq!(status(&r, "integrate.mass_drift"), "pass");
}

#[test]
fn usage_and_parse_errors_exit_2() {
    assert_eq!(report(&["check", "--input", &fixture("broken.toml")]).0, 2);
    assert_eq!(
        report(&[
            "check",
            "--input",
            &fixture("partial_r3.toml"),
            "--max-degree",
            "x"
        ])
        .0,
        2
    );
    assert_eq!(report(&["kdv", "--input", &fixture("so3.toml")]).0, 2);
}
