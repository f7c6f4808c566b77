use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const GROVER: &str = include_str!("../../core/tests/fixtures/grover.hodl");

fn hodlc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hodlc")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn no_arguments_is_a_usage_error() {
    let o = hodlc(&[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Usage"));
}

#[test]
fn simulate_grover() {
    let dir = tempfile::tempdir().unwrap();
    let src = write(dir.path(), "grover.hodl", GROVER);
    let o = hodlc(&[src.to_str().unwrap(), "--simulate"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let qasm = fs::read_to_string(dir.path().join("grover.qasm")).unwrap();
    assert!(qasm.starts_with("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n"));
    let out = stdout(&o);
    let first = out.lines().next().unwrap();
    let fields: Vec<&str> = first.split(' ').collect();
    assert_eq!(fields[0], "000");
    assert!((fields[1].parse::<f64>().unwrap() - 0.945).abs() < 1e-3);
    let counts: u64 = out.lines().map(|l| l.split(' ').nth(2).unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(counts, 1024);
}

#[test]
fn same_invocation_same_output() {
    let dir = tempfile::tempdir().unwrap();
    let src = write(dir.path(), "grover.hodl", GROVER);
    let run = |out: &str| {
        let o = hodlc(&[src.to_str().unwrap(), "-o", out, "--simulate", "--shots", "300", "--seed", "9"]);
        (stdout(&o), fs::read(out).unwrap())
    };
    let a = run(dir.path().join("a.qasm").to_str().unwrap());
    let b = run(dir.path().join("b.qasm").to_str().unwrap());
    assert_eq!(a, b);
}

#[test]
fn grover_iteration_flags() {
    let dir = tempfile::tempdir().unwrap();
    let src = write(dir.path(), "grover.hodl", GROVER);
    let o = hodlc(&[src.to_str().unwrap(), "--simulate", "--grover-k", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("000 0.781250000 "));
    let o = hodlc(&[src.to_str().unwrap(), "--grover-m", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn type_error_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let src = write(dir.path(), "bad.hodl", "function main() {\n    super q = 8;\n    int c = q + 1;\n}\n");
    let o = hodlc(&[src.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with("error[TypeError]: "), "{err}");
    assert!(!dir.path().join("bad.qasm").exists());
}

#[test]
fn stages() {
    let dir = tempfile::tempdir().unwrap();
    let src = write(dir.path(), "grover.hodl", GROVER);
    for (stage, first) in [("tokens", "2:1 keyword oracle"), ("ast", "program"), ("ir", "qreg variable[3] user")] {
        let o = hodlc(&[src.to_str().unwrap(), "--emit", stage]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let text = fs::read_to_string(dir.path().join(format!("grover.{stage}"))).unwrap();
        assert_eq!(text.lines().next(), Some(first), "{stage}");
    }
    let o = hodlc(&[src.to_str().unwrap(), "--emit", "ast", "--simulate"]);
    assert_eq!(o.status.code(), Some(2));
    let o = hodlc(&[src.to_str().unwrap(), "--emit", "bytecode"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_input_is_a_usage_error() {
    let o = hodlc(&["/nonexistent/prog.hodl"]);
    assert_eq!(o.status.code(), Some(2));
}
