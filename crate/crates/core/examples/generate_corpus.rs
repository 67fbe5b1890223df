//! Writes every suite JAR, the per-case ground truths and the wrapper JAR.
//!
//! ```bash
//! cargo run --example generate_corpus -- /tmp/corpus
//! ```

use std::path::PathBuf;

use debloat_bench::benchgen::{generate_all, write_corpus};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("debloat-corpus"));
    let corpus = generate_all()?;
    write_corpus(&out, &corpus)?;
    for suite in &corpus.suites {
        println!("{:22} {:2} cases {:3} classes", suite.feature.name(), suite.test_cases.len(), suite.jar.class_entries().count());
    }
    println!("{} cases written to {}", corpus.test_case_count(), out.display());
    Ok(())
}
