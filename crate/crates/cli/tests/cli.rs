//! End-to-end runs of the binary: exit codes, cache round trips, report
//! determinism, and the config/env precedence chain.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_zeropair"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn zeros_scan_writes_cache_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let out = run(&["zeros", "--t-max", "100", "--cache-dir", cache]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("\"count\":29"), "stdout: {stdout}");
    assert!(dir.path().join("zeros.cache").exists());
}

#[test]
fn zeros_from_file_source() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let source = format!("file:{}", fixture("first3.txt").display());
    let out = run(&["zeros", "--source", &source, "--cache-dir", cache]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("\"records\":3"), "stdout: {stdout}");
}

#[test]
fn t_max_cap_is_input_error() {
    let out = run(&["zeros", "--t-max", "2e6"]);
    assert_eq!(code(&out), 4);
}

#[test]
fn report_without_cache_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["report", "--cache-dir", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 4);
}

#[test]
fn report_emits_deterministic_files() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    assert_eq!(code(&run(&["zeros", "--t-max", "200", "--cache-dir", cache])), 0);
    let args = ["report", "--t-max", "200", "--cache-dir", cache];
    assert_eq!(code(&run(&args)), 0);
    let read = |name: &str| fs::read(dir.path().join(name)).unwrap();
    let first = (read("census.json"), read("correlation.csv"), read("repulsion.csv"));
    assert_eq!(code(&run(&args)), 0);
    assert_eq!(first.0, read("census.json"));
    assert_eq!(first.1, read("correlation.csv"));
    assert_eq!(first.2, read("repulsion.csv"));

    let census = String::from_utf8(first.0).unwrap();
    // a computed cache holds only simple on-line zeros
    assert!(census.contains("\"n\": 79"), "census: {census}");
    assert!(census.contains("\"n_star\": 79"));
    let correlation = String::from_utf8(first.1).unwrap();
    assert!(correlation.starts_with("lambda_lo,lambda_hi,count,predicted\n"));
    assert_eq!(correlation.lines().count(), 13, "12 bins plus header");
}

#[test]
fn verify_synthetic_boundary_free_passes() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("set.json");
    fs::write(
        &spec,
        r#"{"n_critical":120,"n_quadruple_pairs":12,"n_extra_horizontal":6,
            "mult_distribution":[[1,0.7],[2,0.3]],"range":[10.0,300.0],"seed":9}"#,
    )
    .unwrap();
    let out = run(&[
        "verify",
        "--cache-dir",
        dir.path().to_str().unwrap(),
        "--synthetic-spec",
        spec.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("verify.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5, "four grid rows plus header");
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn verify_incomplete_cache_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let source = format!("file:{}", fixture("first3.txt").display());
    // ingested with first_index > 1 the table cannot claim completeness
    let out = run(&[
        "ingest",
        "--source",
        &source,
        "--first-index",
        "5",
        "--cache-dir",
        cache,
    ]);
    assert_eq!(code(&out), 0);
    let out = run(&["verify", "--t-max", "25", "--cache-dir", cache]);
    assert_eq!(code(&out), 4, "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn env_var_outranks_cache_dir_flag() {
    let dir = tempfile::tempdir().unwrap();
    let env_dir = dir.path().join("from-env");
    let flag_dir = dir.path().join("from-flag");
    let out = bin()
        .args(["zeros", "--t-max", "50", "--cache-dir", flag_dir.to_str().unwrap()])
        .env("ZEROPAIR_CACHE", env_dir.to_str().unwrap())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(env_dir.join("zeros.cache").exists());
    assert!(!flag_dir.exists());
}

#[test]
fn csv_summary_format() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "zeros",
        "--t-max",
        "50",
        "--format",
        "csv",
        "--cache-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.starts_with("key,value\n"), "stdout: {stdout}");
    assert!(stdout.contains("pass,true"));
}

#[test]
fn ingest_requires_source() {
    let out = run(&["ingest"]);
    assert_eq!(code(&out), 4);
}
