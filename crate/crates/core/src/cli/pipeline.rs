use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::Command;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::benchgen::{generate_suite, write_suite, Feature, FeatureSuite, SUITE_MAIN};
use crate::classmodel::Level;
use crate::groundtruth::GroundTruth;
use crate::inventory::{extract_inventory, Inventory, InventoryError, ParsePolicy};
use crate::jario::{read_jar, write_jar};
use crate::metrics::{aggregate_suite, build_report_row, classify, render_report, suite_rows, Counts, ReportRow};
use crate::shrinker::{apply_debloat, compute_reachable};

use super::{shell_quote, PipelineError, RunConfig, Tool, EXIT_CORRUPTED, EXIT_OK, EXIT_TOOL};

/// Scores and leftovers of one test case (or of the suite main class).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseDetail {
    pub feature: String,
    pub case: String,
    pub levels: Vec<ReportRow>,
    /// Retained constructs the ground truth does not classify.
    pub unknown_retained: Vec<String>,
    pub diagnostics: Vec<String>,
    pub exec_status: Option<String>,
}

impl CaseDetail {
    pub fn to_json(&self) -> Value {
        json!({
            "feature": self.feature,
            "case": self.case,
            "levels": self.levels,
            "unknown_retained": self.unknown_retained,
            "diagnostics": self.diagnostics,
            "exec_status": self.exec_status,
        })
    }
}

#[derive(Debug)]
pub struct SuiteFailure {
    pub feature: Feature,
    pub error: PipelineError,
}

#[derive(Debug, Default)]
pub struct RunOutcome {
    pub rows: Vec<ReportRow>,
    pub cases: Vec<CaseDetail>,
    pub failures: Vec<SuiteFailure>,
    /// Report files written, relative to the output directory.
    pub artifacts: Vec<PathBuf>,
}

impl RunOutcome {
    /// 4 if any output was corrupted, else 3 if any tool failed, else 0.
    pub fn exit_code(&self) -> i32 {
        let codes: BTreeSet<i32> = self.failures.iter().map(|f| f.error.exit_code()).collect();
        if codes.contains(&EXIT_CORRUPTED) {
            EXIT_CORRUPTED
        } else if codes.is_empty() {
            EXIT_OK
        } else {
            EXIT_TOOL
        }
    }

    pub fn report(&self, format: crate::metrics::ReportFormat) -> Vec<u8> {
        render_report(&self.rows, format)
    }
}

struct SuiteResult {
    rows: Vec<ReportRow>,
    cases: Vec<CaseDetail>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io { path: path.display().to_string(), source }
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), PipelineError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    std::fs::write(path, bytes).map_err(io_err(path))
}

/// Runs every selected suite and writes `report.<ext>`, `failures.json`
/// and per-suite artifacts under the output directory. Only configuration
/// problems return `Err`; suite failures are recorded in the outcome.
pub fn run(config: &RunConfig) -> Result<RunOutcome, PipelineError> {
    config.validate()?;
    std::fs::create_dir_all(&config.out_dir)
        .map_err(|e| PipelineError::ConfigError(format!("cannot create {}: {e}", config.out_dir.display())))?;

    let suites = config.selected_suites();
    let work = || -> Vec<Result<SuiteResult, PipelineError>> {
        suites.par_iter().map(|f| run_suite(*f, config)).collect()
    };
    let results = if config.workers > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| PipelineError::ConfigError(e.to_string()))?;
        pool.install(work)
    } else {
        work()
    };

    let mut outcome = RunOutcome::default();
    for (f, r) in suites.iter().zip(results) {
        match r {
            Ok(s) => {
                outcome.rows.extend(s.rows);
                outcome.cases.extend(s.cases);
            }
            Err(error) => outcome.failures.push(SuiteFailure { feature: *f, error }),
        }
    }
    for &format in &config.report_formats {
        let name = PathBuf::from(format!("report.{}", format.extension()));
        write(&config.out_dir.join(&name), &outcome.report(format))?;
        outcome.artifacts.push(name);
    }
    let failures: Vec<Value> = outcome
        .failures
        .iter()
        .map(|f| json!({"feature": f.feature.slug(), "exit_code": f.error.exit_code(), "error": f.error.to_string()}))
        .collect();
    let mut text = serde_json::to_string_pretty(&failures).expect("failures serialize");
    text.push('\n');
    write(&config.out_dir.join("failures.json"), text.as_bytes())?;
    outcome.artifacts.push(PathBuf::from("failures.json"));
    Ok(outcome)
}

fn run_suite(feature: Feature, config: &RunConfig) -> Result<SuiteResult, PipelineError> {
    let suite = generate_suite(feature)?;
    write_suite(&config.out_dir, &suite)?;
    let dir = config.out_dir.join(feature.slug());
    let input = dir.join("bloated.jar");
    let output = dir.join("debloated.jar");
    let mut notes = Vec::new();

    let bytes = match config.tool {
        Tool::Builtin => {
            let failed = |e: crate::shrinker::ShrinkError| PipelineError::ToolExecutionFailed {
                suite: feature.slug().into(),
                status: "builtin".into(),
                detail: e.to_string(),
            };
            let live =
                compute_reachable(std::slice::from_ref(&suite.jar), &[suite.entry_method()], &config.policy).map_err(failed)?;
            let jar = apply_debloat(&suite.jar, &live, &config.policy).map_err(failed)?;
            let bytes = write_jar(&jar).map_err(|e| PipelineError::ToolExecutionFailed {
                suite: feature.slug().into(),
                status: "builtin".into(),
                detail: e.to_string(),
            })?;
            write(&output, &bytes)?;
            bytes
        }
        Tool::External => {
            let template = config.external_command.as_deref().expect("validated");
            run_external(feature, template, &input, &output, &mut notes)?
        }
    };

    let corrupted = |entry: String, diagnostic: String| PipelineError::CorruptedOutput {
        suite: feature.slug().into(),
        entry,
        diagnostic,
    };
    let jar = read_jar(&bytes).map_err(|e| corrupted(output.display().to_string(), e.to_string()))?;
    let parse = if config.lenient { ParsePolicy::Lenient } else { ParsePolicy::Strict };
    let inv = extract_inventory(&jar, parse).map_err(|e| match e {
        InventoryError::CorruptedClassEntry { entry, source } => corrupted(entry, source.to_string()),
    })?;

    let debloated_path = output.exists().then_some(&output).unwrap_or(&input);
    let mut cases = Vec::new();
    for case in &suite.test_cases {
        let exec = config.exec_hook.as_deref().map(|h| exec_hook(h, debloated_path, &case.entry));
        cases.push(score_case(&suite, &case.id, &case.truth, &case.class_names(), &inv, &notes, exec));
    }
    let driver = BTreeSet::from([SUITE_MAIN.to_owned()]);
    let exec = config.exec_hook.as_deref().map(|h| exec_hook(h, debloated_path, &suite.entry_binary_name()));
    cases.push(score_case(&suite, SUITE_MAIN, &suite.driver_truth(), &driver, &inv, &notes, exec));

    let mut per_level: BTreeMap<Level, Vec<Counts>> = BTreeMap::new();
    for c in &cases {
        for r in &c.levels {
            per_level.entry(r.level).or_default().push(r.counts());
        }
    }
    let rows = suite_rows(feature.name(), &suite.merged_truth, |l| {
        aggregate_suite(per_level.get(&l).map_or(&[][..], Vec::as_slice))
    });
    for c in &cases {
        let mut text = serde_json::to_string_pretty(&c.to_json()).expect("detail serializes");
        text.push('\n');
        write(&dir.join("cases").join(format!("{}.json", c.case)), text.as_bytes())?;
    }
    Ok(SuiteResult { rows, cases })
}

fn run_external(
    feature: Feature,
    template: &str,
    input: &Path,
    output: &Path,
    notes: &mut Vec<String>,
) -> Result<Vec<u8>, PipelineError> {
    if output.exists() {
        std::fs::remove_file(output).map_err(io_err(output))?;
    }
    let cmd = template
        .replace("{input}", &shell_quote(&input.display().to_string()))
        .replace("{output}", &shell_quote(&output.display().to_string()));
    let out = Command::new("sh").arg("-c").arg(&cmd).output().map_err(|e| PipelineError::ToolExecutionFailed {
        suite: feature.slug().into(),
        status: "not started".into(),
        detail: e.to_string(),
    })?;
    if !out.status.success() {
        let stderr = String::from_utf8_lossy(&out.stderr);
        return Err(PipelineError::ToolExecutionFailed {
            suite: feature.slug().into(),
            status: out.status.to_string(),
            detail: stderr.lines().last().unwrap_or("").to_owned(),
        });
    }
    match std::fs::read(output) {
        Ok(b) if !b.is_empty() => Ok(b),
        _ => {
            notes.push("tool produced no output; the original JAR is scored".into());
            std::fs::read(input).map_err(io_err(input))
        }
    }
}

fn exec_hook(template: &str, jar: &Path, entry: &str) -> String {
    let cmd = template.replace("{jar}", &shell_quote(&jar.display().to_string())).replace("{main}", &entry.replace('/', "."));
    match Command::new("sh").arg("-c").arg(&cmd).output() {
        Ok(o) => match o.status.code() {
            Some(c) => c.to_string(),
            None => "signal".into(),
        },
        Err(e) => format!("not started: {e}"),
    }
}

/// Inventory restricted to constructs of the named classes.
fn restrict(inv: &Inventory, classes: &BTreeSet<String>) -> Inventory {
    let mut out = Inventory::default();
    for r in inv.iter().filter(|r| classes.contains(r.class_name())) {
        out.insert(r.clone());
    }
    out.diagnostics = inv
        .diagnostics
        .iter()
        .filter(|d| d.class.as_ref().is_some_and(|c| classes.contains(c.class_name())))
        .cloned()
        .collect();
    out
}

fn score_case(
    suite: &FeatureSuite,
    id: &str,
    truth: &GroundTruth,
    classes: &BTreeSet<String>,
    inv: &Inventory,
    notes: &[String],
    exec_status: Option<String>,
) -> CaseDetail {
    let own = restrict(inv, classes);
    let mut levels = Vec::new();
    let mut unknown = Vec::new();
    for level in Level::ALL {
        let Ok(c) = classify(truth, &own, level) else { continue };
        levels.push(build_report_row(id, level, c));
        let lt = truth.level(level);
        unknown.extend(
            own.level(level)
                .iter()
                .filter(|r| !r.is_initializer())
                .filter(|r| !lt.required.contains(r) && !lt.bloated.contains(r) && !lt.excluded.contains(r))
                .map(ToString::to_string),
        );
    }
    let mut diagnostics: Vec<String> = notes.to_vec();
    diagnostics.extend(own.diagnostics.iter().map(|d| d.message()));
    CaseDetail {
        feature: suite.feature.slug().into(),
        case: id.into(),
        levels,
        unknown_retained: unknown,
        diagnostics,
        exec_status,
    }
}
