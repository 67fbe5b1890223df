//! The evaluation pipeline: generate, debloat, validate, report.

mod pipeline;

use std::collections::BTreeSet;
use std::path::PathBuf;

use thiserror::Error;

use crate::benchgen::{Feature, GenerationError};
use crate::metrics::ReportFormat;
use crate::shrinker::{ShrinkError, ShrinkPolicy};

pub use pipeline::{run, CaseDetail, RunOutcome, SuiteFailure};

/// Overrides `RunConfig::out_dir` when set.
pub const OUT_DIR_ENV: &str = "DEBLOAT_BENCH_OUT";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_TOOL: i32 = 3;
pub const EXIT_CORRUPTED: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tool {
    Builtin,
    External,
}

impl Tool {
    pub fn parse(s: &str) -> Option<Tool> {
        match s.to_ascii_uppercase().as_str() {
            "BUILTIN" => Some(Tool::Builtin),
            "EXTERNAL" => Some(Tool::External),
            _ => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("configuration error: {0}")]
    ConfigError(String),
    #[error("{suite}: tool failed ({status}): {detail}")]
    ToolExecutionFailed { suite: String, status: String, detail: String },
    #[error("{suite}: corrupted output entry {entry}: {diagnostic}")]
    CorruptedOutput { suite: String, entry: String, diagnostic: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Generation(#[from] GenerationError),
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::ConfigError(_) => EXIT_CONFIG,
            PipelineError::CorruptedOutput { .. } => EXIT_CORRUPTED,
            _ => EXIT_TOOL,
        }
    }
}

impl From<ShrinkError> for PipelineError {
    fn from(e: ShrinkError) -> Self {
        PipelineError::ConfigError(e.to_string())
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Empty selects every suite.
    pub suites: Vec<Feature>,
    pub tool: Tool,
    /// Shell command with `{input}` and `{output}` placeholders.
    pub external_command: Option<String>,
    pub policy: ShrinkPolicy,
    pub lenient: bool,
    pub report_formats: BTreeSet<ReportFormat>,
    pub out_dir: PathBuf,
    /// Command run on each debloated JAR, with `{jar}` and `{main}`
    /// placeholders; its exit status lands in the per-case detail.
    pub exec_hook: Option<String>,
    /// Upper bound on suites processed at once; 0 uses the rayon default.
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            suites: Vec::new(),
            tool: Tool::Builtin,
            external_command: None,
            policy: ShrinkPolicy::conservative(),
            lenient: false,
            report_formats: [ReportFormat::Text, ReportFormat::Csv, ReportFormat::Json].into_iter().collect(),
            out_dir: PathBuf::from("bench-out"),
            exec_hook: None,
            workers: 0,
        }
    }
}

impl RunConfig {
    /// Applies `OUT_DIR_ENV` if it is set and non-empty.
    pub fn with_env_overrides(mut self) -> Self {
        if let Some(dir) = std::env::var_os(OUT_DIR_ENV).filter(|d| !d.is_empty()) {
            self.out_dir = PathBuf::from(dir);
        }
        self
    }

    pub fn selected_suites(&self) -> Vec<Feature> {
        if self.suites.is_empty() {
            Feature::ALL.to_vec()
        } else {
            Feature::ALL.into_iter().filter(|f| self.suites.contains(f)).collect()
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::ConfigError(m));
        if self.tool == Tool::External {
            let Some(cmd) = &self.external_command else {
                return bad("EXTERNAL tool requires external_command".into());
            };
            for p in ["{input}", "{output}"] {
                let n = cmd.matches(p).count();
                if n != 1 {
                    return bad(format!("external_command must contain {p} exactly once, found {n}"));
                }
            }
        }
        if let Some(hook) = &self.exec_hook {
            if !hook.contains("{jar}") {
                return bad("exec hook must contain {jar}".into());
            }
        }
        if self.report_formats.is_empty() {
            return bad("no report format selected".into());
        }
        self.policy.check()?;
        Ok(())
    }
}

/// Single-quotes `s` for `sh -c`.
pub(crate) fn shell_quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', r"'\''"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn external_needs_each_placeholder_once() {
        let mut c = RunConfig { tool: Tool::External, ..Default::default() };
        assert!(c.validate().is_err());
        c.external_command = Some("cp {input} {output}".into());
        assert!(c.validate().is_ok());
        c.external_command = Some("cp {input} {input} {output}".into());
        assert!(c.validate().is_err());
        c.external_command = Some("cp {input}".into());
        assert!(matches!(c.validate(), Err(PipelineError::ConfigError(_))));
    }

    #[test]
    fn selection_keeps_table_order() {
        let c = RunConfig { suites: vec![Feature::Serialization, Feature::Abstract], ..Default::default() };
        assert_eq!(c.selected_suites(), vec![Feature::Abstract, Feature::Serialization]);
        assert_eq!(RunConfig::default().selected_suites().len(), 13);
    }

    #[test]
    fn quoting_survives_single_quotes() {
        assert_eq!(shell_quote("a'b"), r"'a'\''b'");
    }
}
