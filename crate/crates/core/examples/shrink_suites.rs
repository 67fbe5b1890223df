//! Runs the built-in shrinker over every suite in three configurations and
//! prints per-level soundness and precision.
//!
//! ```bash
//! cargo run --example shrink_suites
//! ```

use debloat_bench::benchgen::{generate_suite, Feature};
use debloat_bench::classmodel::Level;
use debloat_bench::inventory::{extract_inventory, ParsePolicy};
use debloat_bench::metrics::{classify, precision, render_score, soundness};
use debloat_bench::shrinker::{apply_debloat, compute_reachable, ShrinkPolicy};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for feature in Feature::ALL {
        let suite = generate_suite(feature)?;
        let configs = [
            ("conservative", ShrinkPolicy::conservative()),
            ("aggressive", ShrinkPolicy::aggressive()),
            ("seeded", ShrinkPolicy::conservative().with_seeds(suite.reflective_targets())),
        ];
        for (label, policy) in configs {
            let live = compute_reachable(std::slice::from_ref(&suite.jar), &[suite.entry_method()], &policy)?;
            let out = apply_debloat(&suite.jar, &live, &policy)?;
            let inv = extract_inventory(&out, ParsePolicy::Strict)?;
            let mut line = format!("{:22} {label:12}", feature.name());
            for level in Level::ALL {
                if suite.merged_truth.is_absent(level) {
                    line += &format!(" | {:6} -", level.as_str());
                    continue;
                }
                let c = classify(&suite.merged_truth, &inv, level)?;
                line += &format!(" | {:6} S {:>3} P {:>3}", level.as_str(), render_score(soundness(&c)), render_score(precision(&c)));
            }
            println!("{line}");
        }
    }
    Ok(())
}
