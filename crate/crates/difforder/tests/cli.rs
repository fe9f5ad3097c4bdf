//! End-to-end checks of the `difforder` binary: corpus classification,
//! deterministic JSON output, bound flags, stdin input, and error exits.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_difforder"))
}

fn corpus_path(name: &str) -> String {
    format!("{}/../../corpus/{}", env!("CARGO_MANIFEST_DIR"), name)
}

fn run_classify(args: &[&str]) -> Output {
    let mut cmd = bin();
    cmd.arg("classify").args(args);
    cmd.output().expect("binary runs")
}

fn run_with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .arg("classify")
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child
        .stdin
        .take()
        .expect("stdin piped")
        .write_all(input.as_bytes())
        .expect("stdin accepts input");
    child.wait_with_output().expect("binary exits")
}

#[test]
fn classifies_the_corpus_with_expected_verdicts() {
    let cases = [
        ("order0.sys", "verdict: order 0"),
        ("order1.sys", "verdict: order 1"),
        ("order2.sys", "verdict: order 2"),
        ("riccati.sys", "verdict: order 3"),
    ];
    for (file, want) in cases {
        let out = run_classify(&["--input", &corpus_path(file)]);
        let stdout = String::from_utf8(out.stdout).unwrap();
        assert!(out.status.success(), "{file} should exit 0");
        assert!(stdout.contains(want), "{file} output:\n{stdout}");
        assert!(stdout.contains("[pass]"), "{file} must list passing checks");
        assert!(!stdout.contains("[FAIL]"), "{file} output:\n{stdout}");
    }
}

#[test]
fn json_output_is_byte_stable_and_reverifies() {
    let args = ["--input", &corpus_path("riccati.sys"), "--json"];
    let first = run_classify(&args);
    let second = run_classify(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout, "repeat runs must agree byte for byte");

    let text = String::from_utf8(first.stdout).unwrap();
    assert!(text.ends_with('\n'));
    let doc = difforder::report::from_json(&text).expect("valid report JSON");
    assert_eq!(doc.schema, "v1");
    assert_eq!(doc.verdict, "3");
    assert!(difforder::report::reverify(&doc).expect("report strings parse"));
}

#[test]
fn bound_flags_shrink_the_search_on_the_van_der_pol_field() {
    let out = run_classify(&[
        "--input",
        &corpus_path("vdp.sys"),
        "--max-degree",
        "4",
        "--max-n",
        "2",
        "--max-denom-power",
        "2",
        "--darboux-degree",
        "2",
        "--cofactor-height",
        "1",
        "--series-order",
        "6",
        "--trials",
        "5",
        "--seed",
        "7",
    ]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(out.status.success());
    assert!(
        stdout.contains("verdict: order at least 4 within bounds"),
        "output:\n{stdout}"
    );
    assert!(stdout.contains("invariant curves: none up to degree 2"));
}

#[test]
fn reads_the_system_from_stdin() {
    for args in [&[][..], &["--input", "-"][..]] {
        let out = run_with_stdin(args, "x1' = 1; x2' = 2*x1\n");
        let stdout = String::from_utf8(out.stdout).unwrap();
        assert!(out.status.success());
        assert!(stdout.contains("verdict: order 0"), "output:\n{stdout}");
        assert!(stdout.contains("w = -x1^2 + x2"), "output:\n{stdout}");
    }
}

#[test]
fn rejects_bad_input_with_exit_code_2() {
    let out = run_with_stdin(&[], "x1' = (");
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("line 1"), "stderr:\n{stderr}");

    let out = run_with_stdin(&[], "x2' = x1"); // missing x1 equation
    assert_eq!(out.status.code(), Some(2));

    let out = run_classify(&["--input", "/no/such/file.sys"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(!stderr.is_empty(), "missing file must be reported");
}
