//! Full generate/debloat/validate/report run with the built-in shrinker.
//! Pass `aggressive` to switch modes.
//!
//! ```bash
//! cargo run --example pipeline_run -- aggressive
//! ```

use debloat_bench::cli::{run, RunConfig};
use debloat_bench::metrics::ReportFormat;
use debloat_bench::shrinker::ShrinkPolicy;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let policy = match std::env::args().nth(1).as_deref() {
        Some("aggressive") => ShrinkPolicy::aggressive(),
        _ => ShrinkPolicy::conservative(),
    };
    let out_dir = tempfile::tempdir()?;
    let config = RunConfig { policy, out_dir: out_dir.path().to_path_buf(), ..Default::default() }.with_env_overrides();
    let outcome = run(&config)?;
    print!("{}", String::from_utf8_lossy(&outcome.report(ReportFormat::Text)));
    for case in outcome.cases.iter().filter(|c| !c.unknown_retained.is_empty()) {
        println!("{}/{} kept unlisted: {:?}", case.feature, case.case, case.unknown_retained);
    }
    std::process::exit(outcome.exit_code());
}
