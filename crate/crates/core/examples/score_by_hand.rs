//! Scoring a hand-written ground truth against a hand-picked set of
//! surviving constructs, then rendering the row in every report format.

use debloat_bench::classmodel::{ConstructRef, Level};
use debloat_bench::groundtruth::parse_ground_truth;
use debloat_bench::inventory::Inventory;
use debloat_bench::metrics::{build_report_row, classify, render_report, ReportFormat};

const TRUTH: &str = r#"{
  "CLASS": {"required": [{"package": "shop", "name": "Cart"}], "bloated": [{"package": "shop", "name": "Coupon"}]},
  "METHOD": {
    "required": [{"type": "Cart", "name": "total", "return": "int", "param": ""}],
    "bloated": [
      {"type": "Cart", "name": "clear", "return": "void", "param": ""},
      {"type": "Coupon", "name": "apply", "return": "int", "param": "int"}
    ]
  },
  "FIELD": {"required": [{"class": "Cart", "name": "items"}], "bloated": []}
}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let gt = parse_ground_truth(TRUTH)?;
    let mut kept = Inventory::default();
    kept.insert(ConstructRef::class("shop", "Cart"));
    kept.insert(ConstructRef::method("Cart", "total", "int", ""));
    kept.insert(ConstructRef::method("Cart", "clear", "void", ""));

    let rows: Vec<_> = Level::ALL
        .into_iter()
        .map(|l| classify(&gt, &kept, l).map(|c| build_report_row("shop", l, c)))
        .collect::<Result<_, _>>()?;
    for format in [ReportFormat::Text, ReportFormat::Csv, ReportFormat::Json] {
        println!("{}", String::from_utf8_lossy(&render_report(&rows, format)));
    }
    Ok(())
}
