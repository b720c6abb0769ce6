use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::NamedTempFile;

const BIN: &str = env!("CARGO_BIN_EXE_liesym");
const BUNDLED: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/problems/hirota_ramani.pde");

fn liesym(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn problem_file(text: &str) -> NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(".pde").tempfile().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn path(f: &NamedTempFile) -> &str {
    f.path().to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn every_command_succeeds_on_the_bundled_problem() {
    for cmd in ["symmetries", "algebra", "adjoint", "optimal", "flows", "reduce", "invariants", "nonclassical", "conslaws"] {
        let o = liesym(&[cmd, BUNDLED, "--degree", "1"]);
        assert_eq!(o.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
        let out = stdout(&o);
        assert!(out.starts_with(&format!("command: {cmd}\n")));
        assert!(out.ends_with("verified: yes\n"), "{cmd}");
    }
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["adjoint", BUNDLED][..],
        &["optimal", BUNDLED, "--vector", "1, 2, 3, 4", "--json"][..],
        &["conslaws", BUNDLED, "--json"][..],
    ] {
        let a = liesym(args);
        let b = liesym(args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn json_report_parses() {
    let o = liesym(&["symmetries", BUNDLED, "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["command"], "symmetries");
    assert_eq!(v["verified"], true);
    assert_eq!(v["input_digest"].as_str().unwrap().len(), 64);
    assert_eq!(v["sections"][0]["entries"][0]["text"], "4");
}

#[test]
fn failed_verification_exits_with_three() {
    let o = liesym(&["invariants", BUNDLED, "--generator", "v4", "--candidate", "x^2*u_x - 1/a"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("residual -2/a*x^2  [FAILED]"));
    let o = liesym(&["invariants", BUNDLED, "--generator", "v4", "--candidate", "x^2*(u_x - 1/a)"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn printed_scaling_chart_is_flagged() {
    let chart = "x*t^(1/3), (u - 2*x/a)*t^(-1/3) + t^(2/3)";
    let o = liesym(&["reduce", BUNDLED, "--generator", "v4", "--chart", chart]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("supplied chart is not annihilated by v4"));
}

#[test]
fn input_errors_exit_with_two() {
    let empty = problem_file("");
    let undeclared = problem_file("indep x t;\ndep u(x,t);\neq: u_t + b*u_x = 0;\n");
    let syntax = problem_file("indep x t;\ndep u(x,t);\neq: u_t + * u_x = 0;\n");
    for f in [&empty, &undeclared, &syntax] {
        let o = liesym(&["symmetries", path(f)]);
        assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: line"));
    }
    let o = liesym(&["reduce", BUNDLED, "--generator", "v7"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_file_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.pde");
    let o = liesym(&["symmetries", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn other_equations_are_accepted() {
    let burgers = problem_file("indep x t;\ndep u(x,t);\neq: u_t + u*u_x = u_{x,x};\n");
    let o = liesym(&["symmetries", path(&burgers), "--degree", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("dimension: 5\n"));
    let o = liesym(&["algebra", path(&burgers), "--degree", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn out_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("report.txt");
    let o = liesym(&["flows", BUNDLED, "--out", target.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let written = std::fs::read_to_string(Path::new(&target)).unwrap();
    assert!(written.contains("v4: (x*exp(-s), t*exp(3*s), "), "{written}");
}
