//! JARs are written byte-for-byte reproducibly: fixed timestamps, sorted
//! entries, manifest first.

use debloat_bench::benchgen::{generate_suite, Feature};
use debloat_bench::jario::{read_jar, write_jar, write_jar_with};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let suite = generate_suite(Feature::Lambda)?;
    let a = write_jar_with(&suite.jar, true)?;
    let b = write_jar_with(&suite.jar, true)?;
    assert_eq!(a, b);
    let back = read_jar(&a)?;
    assert_eq!(back, suite.jar);
    let stored = write_jar(&suite.jar)?;
    println!("deflated {} bytes, stored {} bytes", a.len(), stored.len());
    println!("Main-Class: {:?}", back.manifest.main_class());
    for path in back.entries.keys() {
        println!("  {path}");
    }
    Ok(())
}
