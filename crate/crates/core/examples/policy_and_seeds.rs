//! Reflection targets are invisible to a static shrinker until they are
//! given as seeds. Also prints why each seeded method ended up live.

use debloat_bench::benchgen::{generate_suite, Feature};
use debloat_bench::classmodel::Level;
use debloat_bench::metrics::{classify, render_score, soundness};
use debloat_bench::inventory::{extract_inventory, ParsePolicy};
use debloat_bench::shrinker::{apply_debloat, compute_reachable, parse_seeds, ShrinkPolicy};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let suite = generate_suite(Feature::Reflection)?;
    let targets = suite.reflective_targets();
    let seed_json = serde_json::to_string_pretty(&targets.iter().map(debloat_bench::groundtruth::construct_ref_to_value).collect::<Vec<_>>())?;
    let seeds = parse_seeds(&seed_json)?;

    for policy in [ShrinkPolicy::conservative(), ShrinkPolicy::conservative().with_seeds(seeds)] {
        println!("policy {}", policy.to_json());
        let live = compute_reachable(std::slice::from_ref(&suite.jar), &[suite.entry_method()], &policy)?;
        let out = apply_debloat(&suite.jar, &live, &policy)?;
        let c = classify(&suite.merged_truth, &extract_inventory(&out, ParsePolicy::Strict)?, Level::Method)?;
        println!("  method S {} ({}/{})", render_score(soundness(&c)), c.tp, c.required());
        for e in live.edges.iter().filter(|e| targets.contains(&e.to)) {
            println!("  {:?} -> {} [{:?}]", e.from.as_ref().map(|f| f.to_string()), e.to, e.reason);
        }
    }
    Ok(())
}
