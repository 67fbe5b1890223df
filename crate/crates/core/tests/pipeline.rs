use std::collections::BTreeSet;
use std::path::Path;

use debloat_bench::benchgen::{dangling_reference_fixture, generate_suite, Feature};
use debloat_bench::classmodel::Level;
use debloat_bench::cli::{run, PipelineError, RunConfig, Tool, OUT_DIR_ENV};
use debloat_bench::jario::write_jar;
use debloat_bench::metrics::{ReportFormat, ReportRow};
use debloat_bench::shrinker::ShrinkPolicy;

fn config(out: &Path) -> RunConfig {
    RunConfig { out_dir: out.to_path_buf(), ..Default::default() }
}

fn external(out: &Path, cmd: &str) -> RunConfig {
    RunConfig { tool: Tool::External, external_command: Some(cmd.into()), ..config(out) }
}

fn row<'a>(rows: &'a [ReportRow], feature: &str, level: Level) -> &'a ReportRow {
    rows.iter().find(|r| r.feature == feature && r.level == level).unwrap()
}

#[test]
fn conservative_run_shows_the_static_tool_pattern() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&config(dir.path())).unwrap();
    assert_eq!(out.exit_code(), 0);
    assert_eq!(row(&out.rows, "reflection", Level::Method).s, "0");
    let dcl = row(&out.rows, "dynamic class loading", Level::Field);
    assert_eq!((dcl.s.as_str(), dcl.p.as_str()), ("0", "0"));
    for r in &out.rows {
        let dynamic = r.feature == "reflection" || r.feature == "dynamic class loading";
        if !dynamic {
            assert_eq!(r.s, "100", "{} {}", r.feature, r.level);
        }
    }
}

#[test]
fn no_op_run_is_fully_sound() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&RunConfig { policy: ShrinkPolicy::no_op(), ..config(dir.path()) }).unwrap();
    assert!(out.rows.iter().all(|r| r.s == "100" && r.fn_ == 0 && r.bloated_removed == 0));
}

#[test]
fn copying_tool_matches_builtin_no_op() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let noop = run(&RunConfig { policy: ShrinkPolicy::no_op(), ..config(a.path()) }).unwrap();
    let copy = run(&external(b.path(), "cp {input} {output}")).unwrap();
    assert_eq!(copy.exit_code(), 0);
    assert_eq!(copy.rows, noop.rows);
    assert_eq!(copy.report(ReportFormat::Csv), noop.report(ReportFormat::Csv));
}

#[test]
fn silent_tool_falls_back_to_the_original() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let noop = run(&RunConfig { policy: ShrinkPolicy::no_op(), ..config(a.path()) }).unwrap();
    let silent = run(&external(b.path(), ": {input} {output}")).unwrap();
    assert_eq!(silent.exit_code(), 0);
    assert!(silent.failures.is_empty());
    assert_eq!(silent.rows, noop.rows);
    assert!(silent.cases.iter().all(|c| c.diagnostics.iter().any(|d| d.contains("no output"))));
}

#[test]
fn failing_tool_is_recorded_and_the_suite_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig { suites: vec![Feature::Lambda], ..external(dir.path(), "false {input} {output}") };
    let out = run(&cfg).unwrap();
    assert_eq!(out.exit_code(), 3);
    assert!(out.rows.is_empty());
    assert!(matches!(out.failures[0].error, PipelineError::ToolExecutionFailed { .. }));
    let failures = std::fs::read_to_string(dir.path().join("failures.json")).unwrap();
    assert!(failures.contains("lambda"));
}

fn corrupting_config(dir: &Path, lenient: bool) -> RunConfig {
    let suite = generate_suite(Feature::Abstract).unwrap();
    let bad = dangling_reference_fixture(&suite.jar, "Abstract/Main").unwrap();
    let fixture = dir.join("corrupt.jar");
    std::fs::write(&fixture, write_jar(&bad).unwrap()).unwrap();
    let cmd = format!("cp '{}' {{output}} # {{input}}", fixture.display());
    RunConfig { suites: vec![Feature::Abstract], lenient, ..external(&dir.join("out"), &cmd) }
}

#[test]
fn corrupted_output_is_fatal_under_strict() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&corrupting_config(dir.path(), false)).unwrap();
    assert_eq!(out.exit_code(), 4);
    match &out.failures[0].error {
        PipelineError::CorruptedOutput { entry, diagnostic, .. } => {
            assert_eq!(entry, "Abstract/Main.class");
            assert!(diagnostic.contains("dangling"), "{diagnostic}");
        }
        other => panic!("unexpected {other}"),
    }
}

#[test]
fn corrupted_output_is_scored_under_lenient() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&corrupting_config(dir.path(), true)).unwrap();
    assert_eq!(out.exit_code(), 0);
    let case = out.cases.iter().find(|c| c.case == "anonymous-class").unwrap();
    assert_eq!(case.diagnostics.len(), 1);
    assert!(case.diagnostics[0].starts_with("Abstract/Main.class:"));
    let class = case.levels.iter().find(|r| r.level == Level::Class).unwrap();
    assert_eq!((class.tp, class.fn_), (2, 1));
    assert!(out.cases.iter().filter(|c| c.case != "anonymous-class").all(|c| c.diagnostics.is_empty()));
}

#[test]
fn identical_configs_give_identical_reports() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let policy = ShrinkPolicy::aggressive();
    run(&RunConfig { policy: policy.clone(), workers: 1, ..config(a.path()) }).unwrap();
    run(&RunConfig { policy, workers: 4, ..config(b.path()) }).unwrap();
    for name in ["report.txt", "report.csv", "report.json", "failures.json", "reflection/cases/member-scan.json"] {
        assert_eq!(std::fs::read(a.path().join(name)).unwrap(), std::fs::read(b.path().join(name)).unwrap(), "{name}");
    }
}

#[test]
fn case_details_carry_unknowns_diagnostics_and_hook_status() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        suites: vec![Feature::Interface],
        exec_hook: Some("test -f {jar} && exit 7".into()),
        ..config(dir.path())
    };
    let out = run(&cfg).unwrap();
    assert!(out.cases.iter().all(|c| c.exec_status.as_deref() == Some("7")));
    let path = dir.path().join("interface/cases/single-implementation.json");
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap();
    for key in ["unknown_retained", "diagnostics", "levels", "exec_status"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    let cases: BTreeSet<&str> = out.cases.iter().map(|c| c.case.as_str()).collect();
    assert!(cases.contains("SuiteMain"));
}

#[test]
fn suite_rows_are_sums_of_case_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&RunConfig { suites: vec![Feature::Generics], ..config(dir.path()) }).unwrap();
    for r in &out.rows {
        let tp: u64 = out.cases.iter().flat_map(|c| &c.levels).filter(|x| x.level == r.level).map(|x| x.tp).sum();
        assert_eq!(tp, r.tp);
    }
}

#[test]
fn env_var_overrides_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    std::env::set_var(OUT_DIR_ENV, dir.path());
    let cfg = RunConfig::default().with_env_overrides();
    std::env::remove_var(OUT_DIR_ENV);
    assert_eq!(cfg.out_dir, dir.path());
}

#[test]
fn bad_external_config_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let err = run(&external(dir.path(), "cp {input} out.jar")).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}
