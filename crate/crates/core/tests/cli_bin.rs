use std::path::Path;
use std::process::{Command, Output};

use debloat_bench::benchgen::{dangling_reference_fixture, generate_suite, Feature};
use debloat_bench::cli::OUT_DIR_ENV;
use debloat_bench::jario::write_jar;

fn bench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_debloat-bench")).args(args).env_remove(OUT_DIR_ENV).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn generate_writes_suites_and_truths() {
    let dir = tempfile::tempdir().unwrap();
    let o = bench(&["generate", "--out-dir", p(dir.path()), "--suites", "lambda,exception"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("lambda/bloated.jar").is_file());
    assert!(dir.path().join("exception/suite-truth.json").is_file());
    assert!(!dir.path().join("generics").exists());
}

#[test]
fn out_dir_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_debloat-bench"))
        .args(["generate", "--suites", "overriding"])
        .env(OUT_DIR_ENV, dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(dir.path().join("overriding/bloated.jar").is_file());
}

#[test]
fn debloat_then_validate() {
    let dir = tempfile::tempdir().unwrap();
    bench(&["generate", "--out-dir", p(dir.path()), "--suites", "generics"]);
    let input = dir.path().join("generics/bloated.jar");
    let output = dir.path().join("small.jar");
    let o = bench(&["debloat", "--input", p(&input), "--output", p(&output), "--mode", "aggressive"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(std::fs::metadata(&output).unwrap().len() < std::fs::metadata(&input).unwrap().len());

    let truth = dir.path().join("generics/suite-truth.json");
    let o = bench(&["validate", "--jar", p(&output), "--truth", p(&truth), "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let csv = stdout(&o);
    assert!(csv.lines().count() == 4, "{csv}");
    assert!(csv.lines().skip(1).all(|l| l.contains(",100,")), "{csv}");
}

#[test]
fn run_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = bench(&["run", "--out-dir", p(dir.path()), "--suites", "interface", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("interface"));
    let csv = dir.path().join("report.csv");
    assert!(!dir.path().join("report.json").exists());
    let o = bench(&["report", "--input", p(&csv), "--format", "json"]);
    assert_eq!(code(&o), 0);
    let rows: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 3);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = p(dir.path());
    assert_eq!(code(&bench(&["run", "--out-dir", out, "--suites", "nonsense"])), 2);
    assert_eq!(code(&bench(&["run", "--out-dir", out, "--tool", "external"])), 2);
    assert_eq!(code(&bench(&["run", "--out-dir", out, "--levels", "CLASS,BOGUS"])), 2);
    assert_eq!(code(&bench(&["report", "--input", "/nonexistent/report.csv"])), 2);
    assert_eq!(code(&bench(&["frobnicate"])), 2);
}

#[test]
fn tool_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = bench(&["run", "--out-dir", p(dir.path()), "--tool", "external", "--external-command", "exit 1 {input} {output}"]);
    assert_eq!(code(&o), 3);
    assert!(dir.path().join("failures.json").is_file());
}

#[test]
fn corrupted_output_exits_4_unless_lenient() {
    let dir = tempfile::tempdir().unwrap();
    let suite = generate_suite(Feature::Abstract).unwrap();
    let bad = dir.path().join("bad.jar");
    std::fs::write(&bad, write_jar(&dangling_reference_fixture(&suite.jar, "Abstract/Main").unwrap()).unwrap()).unwrap();
    let cmd = format!("cp '{}' {{output}} # {{input}}", bad.display());
    let args = ["run", "--out-dir", p(dir.path()), "--suites", "abstract", "--tool", "external", "--external-command", &cmd];
    assert_eq!(code(&bench(&args)), 4);
    let mut lenient = args.to_vec();
    lenient.push("--lenient");
    assert_eq!(code(&bench(&lenient)), 0);

    let truth = dir.path().join("truth.json");
    std::fs::write(&truth, debloat_bench::groundtruth::emit_ground_truth(&suite.merged_truth)).unwrap();
    assert_eq!(code(&bench(&["validate", "--jar", p(&bad), "--truth", p(&truth)])), 4);
    let o = bench(&["validate", "--jar", p(&bad), "--truth", p(&truth), "--lenient"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("Abstract/Main.class"));
}
