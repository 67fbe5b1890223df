//! Lists the constructs of the anonymous-class test case next to their
//! ground-truth label.

use debloat_bench::benchgen::{generate_suite, Feature};
use debloat_bench::classmodel::{parse_class, Level};
use debloat_bench::groundtruth::emit_ground_truth;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let suite = generate_suite(Feature::Abstract)?;
    let case = suite.case("anonymous-class").expect("case exists");
    let inv = case.inventory()?;
    for level in Level::ALL {
        let truth = case.truth.level(level);
        for r in inv.level(level) {
            let label = if truth.required.contains(r) {
                "required"
            } else if truth.bloated.contains(r) {
                "bloated"
            } else {
                "unlisted"
            };
            println!("{:6} {label:8} {r}", level.as_str());
        }
    }

    let jar = case.jar()?;
    for (path, bytes) in jar.class_entries() {
        let unit = parse_class(bytes)?;
        println!("{path}: {} bytes, {} pool entries", bytes.len(), unit.constant_pool.count());
    }
    println!("{}", emit_ground_truth(&case.truth));
    Ok(())
}
