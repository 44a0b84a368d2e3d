use std::io::Write;
use std::process::{Command, Output};

use cascade_cli::Certificate;

const DEX: &str = "Dx*Dy + x*Dx*Dz - Dz";

fn cascade(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cascade"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn certificate(args: &[&str]) -> (Certificate, i32) {
    let out = cascade(args);
    let cert = serde_json::from_slice(&out.stdout).expect("JSON certificate");
    (cert, out.status.code().unwrap())
}

fn corpus_path(name: &str) -> String {
    format!("{}/corpus/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn invariants_of_first_example() {
    let (c, code) = certificate(&["invariants", "Dx*Dy - 2/(x+y)^2", "--vars", "x,y", "--json"]);
    assert_eq!(code, 0);
    assert_eq!(c.payload["h"], "2/(x + y)^2");
    assert_eq!(c.payload["k"], "2/(x + y)^2");
    assert_eq!(c.payload["operator"], "Dx*Dy - 2/(x + y)^2");
}

#[test]
fn unknown_variable_is_an_error() {
    let out = cascade(&["invariants", "Dq", "--vars", "x,y"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown variable"));
}

#[test]
fn non_terminating_chain_exhausts_budget() {
    let (c, code) = certificate(&["chain", "Dx*Dy - 1/(x+y)^2", "--max-steps", "10", "--json"]);
    assert_eq!(code, 2);
    assert_eq!(c.payload["termination"]["N"], "budget-exhausted");
    assert_eq!(c.payload["termination"]["K"], "budget-exhausted");
    let links = c.payload["links"].as_array().unwrap();
    assert_eq!(links.len(), 21);
    assert!(links.iter().all(|l| l["h"] != "0" && l["k"] != "0"));
}

#[test]
fn dini_reaches_factorable_link_and_verifies() {
    let (c, code) = certificate(&["dini", DEX, "--json"]);
    assert_eq!(code, 0);
    assert_eq!(c.payload["factorable"], -1);
    let step = c.payload["steps"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["index"] == -1)
        .unwrap();
    assert_eq!(step["status"], "factorable");
    assert_eq!(step["L1"], "Dx*Dy + x*Dx*Dz");
    assert_eq!(step["thcomm-residual"], "zero");
    assert_eq!(c.payload["certificate"]["verified"], "verified");
}

#[test]
fn solve_certifies_closed_form() {
    let (c, code) = certificate(&["solve", "Dx*Dy - 2/(x+y)^2", "--json"]);
    assert_eq!(code, 0);
    let cert = &c.payload["certificate"];
    assert_eq!(cert["verified"], "verified");
    assert_eq!(cert["coefficients"]["F"].as_array().unwrap().len(), 2);
    assert_eq!(cert["has-quadrature"], false);
}

#[test]
fn corrupted_solution_fails_with_witness() {
    let args = ["verify", "Dx*Dy - 2/(x+y)^2", "--solution", "F'(x) + G'(y) - 2*G(y)/(x+y)"];
    let (c, code) = certificate(&[&args[..], &["--json"]].concat());
    assert_eq!(code, 2);
    assert_eq!(c.payload["verified"], "failed");
    assert_ne!(c.payload["residual"], "0");
}

#[test]
fn compose_and_factor_commands() {
    let (c, code) = certificate(&["compose", "Dy + x*Dz", "--with", "Dx", "--json"]);
    assert_eq!(code, 0);
    assert_eq!(c.payload["product"], "Dx*Dy + x*Dx*Dz");
    let (c, code) = certificate(&["factor", DEX, "--json"]);
    assert_eq!(code, 0);
    assert_eq!(c.payload["remainder"], "-2*Dz");
    let (c, code) = certificate(&["factor", "Dx^2 + Dy^2", "--json"]);
    assert_eq!(code, 2);
    assert!(c.payload["reason"].is_string());
}

#[test]
fn reruns_are_byte_identical_modulo_timing() {
    for args in [
        &["solve", "Dx*Dy - 6/(x+y)^2", "--json", "--seed", "7"][..],
        &["dini", DEX, "--json", "--seed", "7"][..],
    ] {
        let (a, _) = certificate(args);
        let (b, _) = certificate(args);
        assert_eq!(a.canonical_json(), b.canonical_json());
    }
}

#[test]
fn text_output_lists_status() {
    let out = cascade(&["chain", "Dx*Dy - 12/(x+y)^2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("status: ok"));
    assert!(text.contains("N: 3"));
}

#[test]
fn bundled_corpus_passes() {
    let out = cascade(&["corpus", &corpus_path("regression.jsonl")]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.contains("pass example1-n3"));
    assert!(text.contains("pass dex-solution-verified"));
}

#[test]
fn negative_control_fails_with_diff() {
    let out = cascade(&["corpus", &corpus_path("negative-control.jsonl")]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("FAIL corrupted-expectation"));
    assert!(text.contains("status: expected \"verified\", got \"verification-failed\""));
}

#[test]
fn corpus_reports_in_file_order() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    for (name, op) in [("b", "Dx*Dy - 2/(x+y)^2"), ("a", "Dx*Dy")] {
        writeln!(
            f,
            r#"{{"name":"{name}","vars":["x","y"],"operator":"{op}","workflow":"chain","expect":{{"status":"ok"}}}}"#
        )
        .unwrap();
    }
    let out = cascade(&["corpus", f.path().to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["entries"][0]["name"], "b");
    assert_eq!(v["entries"][1]["index"], 1);
}

#[test]
fn unreadable_corpus_is_an_error() {
    let out = cascade(&["corpus", "/nonexistent/corpus.jsonl"]);
    assert_eq!(out.status.code(), Some(1));
}
