//! A JAR whose constant pool points past its end: fatal under STRICT,
//! a diagnostic under LENIENT.

use debloat_bench::benchgen::{dangling_reference_fixture, generate_suite, Feature};
use debloat_bench::classmodel::Level;
use debloat_bench::inventory::{extract_inventory, ParsePolicy};
use debloat_bench::metrics::{classify, render_score, soundness};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let suite = generate_suite(Feature::Abstract)?;
    let bad = dangling_reference_fixture(&suite.jar, "Abstract/Main").expect("Main has a method ref");

    match extract_inventory(&bad, ParsePolicy::Strict) {
        Err(e) => println!("strict: {e}"),
        Ok(_) => println!("strict: parsed?"),
    }

    let inv = extract_inventory(&bad, ParsePolicy::Lenient)?;
    for d in &inv.diagnostics {
        println!("lenient: {}", d.message());
    }
    let c = classify(&suite.merged_truth, &inv, Level::Class)?;
    println!("class level: {}/{} required kept, S {}", c.tp, c.required(), render_score(soundness(&c)));
    Ok(())
}
