use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use debloat_bench::benchgen::{generate_all, generate_suite, write_corpus, write_suite, Feature};
use debloat_bench::classmodel::descriptor::simple_name;
use debloat_bench::classmodel::{ConstructRef, Level};
use debloat_bench::cli::{self, RunConfig, Tool, EXIT_CONFIG, EXIT_CORRUPTED, EXIT_TOOL, OUT_DIR_ENV};
use debloat_bench::groundtruth::parse_ground_truth;
use debloat_bench::inventory::{extract_inventory, ParsePolicy};
use debloat_bench::jario::{read_jar, write_jar};
use debloat_bench::metrics::{classify, parse_csv_report, render_report, suite_rows, ReportFormat};
use debloat_bench::shrinker::{apply_debloat, compute_reachable, parse_seeds, ShrinkMode, ShrinkPolicy};

#[derive(Parser)]
#[command(name = "debloat-bench", version, about = "Debloater benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write the suites, their ground truths and the wrapper JAR.
    Generate {
        #[arg(long, env = OUT_DIR_ENV, default_value = "bench-out")]
        out_dir: PathBuf,
        #[command(flatten)]
        select: Select,
    },
    /// Run the built-in shrinker on one JAR.
    Debloat {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Entry class (binary or dotted name); defaults to the manifest Main-Class.
        #[arg(long)]
        entry: Option<String>,
        #[command(flatten)]
        policy: PolicyArgs,
    },
    /// Score a debloated JAR against a ground truth.
    Validate {
        #[arg(long)]
        jar: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        lenient: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Generate, debloat, validate and report over the selected suites.
    Run {
        #[arg(long, env = OUT_DIR_ENV, default_value = "bench-out")]
        out_dir: PathBuf,
        #[command(flatten)]
        select: Select,
        #[arg(long, default_value = "builtin")]
        tool: String,
        /// Shell command with {input} and {output} placeholders.
        #[arg(long)]
        external_command: Option<String>,
        #[command(flatten)]
        policy: PolicyArgs,
        #[arg(long)]
        lenient: bool,
        #[arg(long = "format", value_enum, value_delimiter = ',', default_values = ["text", "csv", "json"])]
        formats: Vec<Format>,
        /// Command run on each debloated JAR, with {jar} and {main} placeholders.
        #[arg(long)]
        exec_hook: Option<String>,
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Re-render a CSV report.
    Report {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

#[derive(Args)]
struct Select {
    /// Comma-separated feature names; all when omitted.
    #[arg(long, value_delimiter = ',')]
    suites: Vec<String>,
}

#[derive(Args)]
struct PolicyArgs {
    /// JSON policy file.
    #[arg(long)]
    policy: Option<PathBuf>,
    #[arg(long)]
    mode: Option<String>,
    /// Comma-separated subset of CLASS, METHOD, FIELD, or "none" to remove nothing.
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<String>>,
    /// JSON seed list or ground truth whose required constructs become seeds.
    #[arg(long)]
    seeds: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => ReportFormat::Text,
            Format::Csv => ReportFormat::Csv,
            Format::Json => ReportFormat::Json,
        }
    }
}

struct Fail(i32, String);

fn config(msg: impl ToString) -> Fail {
    Fail(EXIT_CONFIG, msg.to_string())
}

fn read(path: &Path) -> Result<Vec<u8>, Fail> {
    std::fs::read(path).map_err(|e| config(format!("{}: {e}", path.display())))
}

fn features(select: &Select) -> Result<Vec<Feature>, Fail> {
    select.suites.iter().map(|s| Feature::parse(s).ok_or_else(|| config(format!("unknown suite {s:?}")))).collect()
}

fn policy(args: &PolicyArgs) -> Result<ShrinkPolicy, Fail> {
    let mut p = match &args.policy {
        Some(path) => ShrinkPolicy::from_json(&String::from_utf8_lossy(&read(path)?)).map_err(config)?,
        None => ShrinkPolicy::conservative(),
    };
    if let Some(m) = &args.mode {
        let mode = ShrinkMode::parse(m).ok_or_else(|| config(format!("unknown mode {m:?}")))?;
        let levels = p.levels.clone();
        let seeds = std::mem::take(&mut p.reflection_seeds);
        p = match mode {
            ShrinkMode::Conservative => ShrinkPolicy::conservative(),
            ShrinkMode::Aggressive => ShrinkPolicy::aggressive(),
        }
        .with_levels(levels)
        .with_seeds(seeds);
    }
    if let Some(ls) = &args.levels {
        let levels: Vec<Level> = ls
            .iter()
            .filter(|l| !l.eq_ignore_ascii_case("none"))
            .map(|l| Level::parse(l).ok_or_else(|| config(format!("unknown level {l:?}"))))
            .collect::<Result<_, _>>()?;
        p = p.with_levels(levels);
    }
    if let Some(path) = &args.seeds {
        let seeds = parse_seeds(&String::from_utf8_lossy(&read(path)?)).map_err(config)?;
        p = p.with_seeds(seeds);
    }
    p.check().map_err(config)?;
    Ok(p)
}

fn write_out(path: &Path, bytes: &[u8]) -> Result<(), Fail> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| config(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, bytes).map_err(|e| config(format!("{}: {e}", path.display())))
}

fn execute(cmd: Cmd) -> Result<i32, Fail> {
    match cmd {
        Cmd::Generate { out_dir, select } => {
            let chosen = features(&select)?;
            if chosen.is_empty() {
                let corpus = generate_all().map_err(|e| Fail(EXIT_TOOL, e.to_string()))?;
                write_corpus(&out_dir, &corpus).map_err(|e| Fail(EXIT_TOOL, e.to_string()))?;
                println!("{} suites, {} test cases written to {}", corpus.suites.len(), corpus.test_case_count(), out_dir.display());
            } else {
                for f in chosen {
                    let s = generate_suite(f).map_err(|e| Fail(EXIT_TOOL, e.to_string()))?;
                    write_suite(&out_dir, &s).map_err(|e| Fail(EXIT_TOOL, e.to_string()))?;
                    println!("{}: {} test cases", f.name(), s.test_cases.len());
                }
            }
            Ok(0)
        }
        Cmd::Debloat { input, output, entry, policy: pargs } => {
            let pol = policy(&pargs)?;
            let jar = read_jar(&read(&input)?).map_err(|e| Fail(EXIT_CORRUPTED, e.to_string()))?;
            let main = entry
                .or_else(|| jar.manifest.main_class())
                .ok_or_else(|| config("no --entry and no Main-Class in the manifest"))?
                .replace('.', "/");
            let entry = ConstructRef::method(simple_name(&main), "main", "void", "String[]");
            let live = compute_reachable(std::slice::from_ref(&jar), &[entry], &pol).map_err(|e| Fail(EXIT_TOOL, e.to_string()))?;
            let out = apply_debloat(&jar, &live, &pol).map_err(|e| Fail(EXIT_TOOL, e.to_string()))?;
            write_out(&output, &write_jar(&out).map_err(|e| Fail(EXIT_TOOL, e.to_string()))?)?;
            let before = jar.class_entries().count();
            let after = out.class_entries().count();
            println!("{before} classes in, {after} out; {} methods, {} fields live", live.live_methods.len(), live.live_fields.len());
            Ok(0)
        }
        Cmd::Validate { jar, truth, lenient, format } => {
            let gt = parse_ground_truth(&String::from_utf8_lossy(&read(&truth)?)).map_err(config)?;
            let archive = read_jar(&read(&jar)?).map_err(|e| Fail(EXIT_CORRUPTED, e.to_string()))?;
            let parse = if lenient { ParsePolicy::Lenient } else { ParsePolicy::Strict };
            let inv = extract_inventory(&archive, parse).map_err(|e| Fail(EXIT_CORRUPTED, e.to_string()))?;
            for d in &inv.diagnostics {
                eprintln!("diagnostic: {}", d.message());
            }
            let name = jar.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let rows = suite_rows(&name, &gt, |l| classify(&gt, &inv, l).unwrap_or_default());
            print!("{}", String::from_utf8_lossy(&render_report(&rows, format.into())));
            Ok(0)
        }
        Cmd::Run { out_dir, select, tool, external_command, policy: pargs, lenient, formats, exec_hook, workers } => {
            let cfg = RunConfig {
                suites: features(&select)?,
                tool: Tool::parse(&tool).ok_or_else(|| config(format!("unknown tool {tool:?}")))?,
                external_command,
                policy: policy(&pargs)?,
                lenient,
                report_formats: formats.into_iter().map(ReportFormat::from).collect::<BTreeSet<_>>(),
                out_dir,
                exec_hook,
                workers,
            };
            let outcome = cli::run(&cfg).map_err(|e| Fail(e.exit_code(), e.to_string()))?;
            print!("{}", String::from_utf8_lossy(&outcome.report(ReportFormat::Text)));
            for f in &outcome.failures {
                eprintln!("error: {}", f.error);
            }
            Ok(outcome.exit_code())
        }
        Cmd::Report { input, format } => {
            let rows = parse_csv_report(&read(&input)?).map_err(config)?;
            print!("{}", String::from_utf8_lossy(&render_report(&rows, format.into())));
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code as u8)
        }
    }
}
