use std::path::{Path, PathBuf};
use std::process::Command;

use nrconv::cli::{run, EXIT_CAPACITY, EXIT_OK, EXIT_USAGE};
use tempfile::TempDir;

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("nrconv").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn prime_prints_length_modulus_root() {
    let (code, out, _) = invoke(&["prime", "--n", "8"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "16\n17\n3\n");
}

#[test]
fn conv_of_small_files() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.txt", "1 2 3\n");
    let b = write(&dir, "b.txt", "4 5\n");
    let (code, out, _) = invoke(&["conv", "--a", s(&a), "--b", s(&b), "--verify"]);
    assert_eq!(code, EXIT_OK);
    // modulus 17 for capacity 3
    assert_eq!(out, "0 4\n1 13\n2 5\n3 15\nVERIFIED\n");
}

#[test]
fn polyconv_on_a_triangle_file() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.txt", "1 1 1 1\n");
    let b = write(&dir, "b.txt", "1 1 1 1\n");
    let poly = write(&dir, "t.poly", "3\n0 0\n3 0\n0 3\n111\n111\n");
    let (code, out, err) = invoke(&[
        "polyconv", "--a", s(&a), "--b", s(&b), "--polygon", s(&poly), "--verify",
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert_eq!(out, "0 1\n1 2\n2 3\n3 4\n4 0\n5 0\n6 0\nVERIFIED\n");
}

#[test]
fn polyconv_random_verifies() {
    let (code, out, err) = invoke(&["polyconv", "--random", "--seed", "7", "--verify"]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(out.ends_with("VERIFIED\n"));
}

#[test]
fn malformed_polygon_reports_line() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.txt", "1 2\n");
    let poly = write(&dir, "bad.poly", "3\n0 0\n4 0\n0\n111\n111\n");
    let (code, _, err) = invoke(&["polyconv", "--a", s(&a), "--b", s(&a), "--polygon", s(&poly)]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("line 4"), "{err}");
    assert_eq!(err.matches("parse error").count(), 1, "{err}");
}

#[test]
fn clockwise_polygon_is_accepted() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.txt", "1 1 1 1\n");
    let poly = write(&dir, "cw.poly", "3\n0 0\n0 3\n3 0\n111\n111\n");
    let (code, out, err) = invoke(&[
        "polyconv", "--a", s(&a), "--b", s(&a), "--polygon", s(&poly), "--verify",
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(out.ends_with("VERIFIED\n"));
}

#[test]
fn nonconvex_polygon_is_rejected() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.txt", "1 1 1 1\n");
    let poly = write(&dir, "nc.poly", "4\n0 0\n4 0\n1 1\n0 4\n1111\n1111\n");
    let (code, _, err) = invoke(&["polyconv", "--a", s(&a), "--b", s(&a), "--polygon", s(&poly)]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("convex"), "{err}");
}

#[test]
fn oversized_capacity_exits_with_capacity_code() {
    let (code, out, err) = invoke(&["prime", "--n", "1000000000000000000"]);
    assert_eq!(code, EXIT_CAPACITY);
    assert!(out.is_empty());
    assert!(err.contains("capacity"), "{err}");
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let (code, _, _) = invoke(&["frobnicate"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn cadence_counts() {
    let dir = TempDir::new().unwrap();
    let text = write(&dir, "t.txt", "001001001\n");
    let (code, out, _) = invoke(&["cadences", "count", "--text", s(&text), "--verify"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "0 2\n1 1\ntotal 3\nVERIFIED\n");
}

#[test]
fn forced_branches_agree() {
    let dir = TempDir::new().unwrap();
    let text = write(&dir, "t.txt", "abracadabra abracadabra\n");
    let count = |branch: &str| {
        let (code, out, _) = invoke(&[
            "subcadences", "count", "--text", s(&text), "--force-branch", branch,
        ]);
        assert_eq!(code, EXIT_OK);
        out
    };
    assert_eq!(count("rare"), count("fft"));
}

#[test]
fn subcadence_hits_are_reported() {
    let dir = TempDir::new().unwrap();
    let text = write(&dir, "t.txt", "abracadabra");
    let (code, out, err) = invoke(&[
        "subcadences", "find", "--text", s(&text), "--char", "a", "--o", "2", "--verify",
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[..2].iter().all(|l| l.starts_with('(') && l.ends_with(')')));
    assert_eq!(lines[2], "VERIFIED");
}

#[test]
fn partial_cadence_find() {
    let dir = TempDir::new().unwrap();
    let text = write(&dir, "t.txt", "001001001");
    let (code, out, err) = invoke(&[
        "partial", "find", "--text", s(&text), "--offsets", "0,1,3", "--k", "4", "--verify",
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert_eq!(out, "(2,2)\nVERIFIED\n");
}

#[test]
fn bad_offsets_are_rejected() {
    let dir = TempDir::new().unwrap();
    let text = write(&dir, "t.txt", "001001001");
    let (code, _, _) = invoke(&[
        "partial", "count", "--text", s(&text), "--offsets", "2,1,0", "--k", "4",
    ]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn error_cadence_detection() {
    let dir = TempDir::new().unwrap();
    let yes = write(&dir, "yes.txt", "001001001");
    let no = write(&dir, "no.txt", "abcdefgh");
    let (code, out, _) = invoke(&["error-cadences", "detect", "--text", s(&yes), "--k", "4", "--verify"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "true (0,1,3)\nVERIFIED\n");
    let (code, out, _) = invoke(&["error-cadences", "detect", "--text", s(&no), "--k", "4", "--verify"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "false\nVERIFIED\n");
}

#[test]
fn binary_runs_end_to_end() {
    let out = Command::new(env!("CARGO_BIN_EXE_nrconv"))
        .args(["prime", "--n", "8"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "16\n17\n3\n");

    let status = Command::new(env!("CARGO_BIN_EXE_nrconv"))
        .args(["prime", "--n", "1000000000000000000"])
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(EXIT_CAPACITY));
}
