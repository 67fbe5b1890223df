//! TP/FP/FN classification and soundness/precision scores.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classmodel::{ConstructRef, Level};
use crate::groundtruth::GroundTruth;
use crate::inventory::Inventory;

/// Rendered in place of a 0/0 score or pair.
pub const NOT_APPLICABLE: &str = "–";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricsError {
    #[error("{0} level is not evaluated by this ground truth")]
    LevelAbsent(Level),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub bloated_removed: u64,
    pub unknown_retained: u64,
}

impl Counts {
    pub fn required(&self) -> u64 {
        self.tp + self.fn_
    }

    pub fn bloated(&self) -> u64 {
        self.fp + self.bloated_removed
    }
}

impl std::ops::Add for Counts {
    type Output = Counts;
    fn add(self, o: Counts) -> Counts {
        Counts {
            tp: self.tp + o.tp,
            fp: self.fp + o.fp,
            fn_: self.fn_ + o.fn_,
            bloated_removed: self.bloated_removed + o.bloated_removed,
            unknown_retained: self.unknown_retained + o.unknown_retained,
        }
    }
}

/// An exact fraction in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0 && num <= den, "ratio out of range: {num}/{den}");
        Ratio { num, den }
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Whole percentage points, half rounded up.
    pub fn percent(self) -> u64 {
        (200 * self.num + self.den) / (2 * self.den)
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some((self.num as u128 * o.den as u128).cmp(&(o.num as u128 * self.den as u128)))
    }
}

/// `None` is N/A.
pub type Score = Option<Ratio>;

/// tp / (tp + fn); N/A without required constructs.
pub fn soundness(c: &Counts) -> Score {
    let den = c.tp + c.fn_;
    (den > 0).then(|| Ratio::new(c.tp, den))
}

/// tp / (tp + fp). With nothing retained it is N/A when nothing was
/// required, else 0.
pub fn precision(c: &Counts) -> Score {
    let den = c.tp + c.fp;
    if den > 0 {
        Some(Ratio::new(c.tp, den))
    } else if c.fn_ == 0 {
        None
    } else {
        Some(Ratio { num: 0, den: 1 })
    }
}

pub fn render_score(s: Score) -> String {
    s.map_or_else(|| NOT_APPLICABLE.to_owned(), |r| r.percent().to_string())
}

/// How to count constructs of class entries that failed to parse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorruptionView {
    /// As removed: required ones become false negatives.
    #[default]
    CountAsMissing,
    /// Dropped from the universe altogether.
    Exclude,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClassifyOptions {
    pub include_initializers: bool,
    pub corruption: CorruptionView,
}

pub fn classify(gt: &GroundTruth, debloated: &Inventory, level: Level) -> Result<Counts, MetricsError> {
    classify_with(gt, debloated, level, ClassifyOptions::default())
}

pub fn classify_with(
    gt: &GroundTruth,
    debloated: &Inventory,
    level: Level,
    opts: ClassifyOptions,
) -> Result<Counts, MetricsError> {
    let lt = gt.level(level);
    if lt.absent {
        return Err(MetricsError::LevelAbsent(level));
    }
    let corrupted = match opts.corruption {
        CorruptionView::CountAsMissing => BTreeSet::new(),
        CorruptionView::Exclude => debloated.corrupted_classes(),
    };
    let counted = |r: &&ConstructRef| {
        (opts.include_initializers || !r.is_initializer()) && !corrupted.contains(r.class_name())
    };
    let required: BTreeSet<&ConstructRef> = lt.required.iter().filter(counted).collect();
    let bloated: BTreeSet<&ConstructRef> = lt.bloated.iter().filter(counted).collect();
    let excluded: BTreeSet<&ConstructRef> = lt.excluded.iter().collect();
    let kept: BTreeSet<&ConstructRef> = debloated.level(level).iter().filter(counted).collect();

    let tp = required.intersection(&kept).count() as u64;
    let fp = bloated.intersection(&kept).count() as u64;
    let unknown = kept
        .iter()
        .filter(|r| !required.contains(*r) && !bloated.contains(*r) && !excluded.contains(*r))
        .count() as u64;
    Ok(Counts {
        tp,
        fp,
        fn_: required.len() as u64 - tp,
        bloated_removed: bloated.len() as u64 - fp,
        unknown_retained: unknown,
    })
}

pub fn aggregate_suite(per_test: &[Counts]) -> Counts {
    per_test.iter().fold(Counts::default(), |a, &c| a + c)
}

/// One feature/level row: R, S, B and P plus the raw counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub feature: String,
    pub level: Level,
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub bloated_removed: u64,
    pub unknown_retained: u64,
    /// "tp/required", or "–" for 0/0.
    #[serde(rename = "R")]
    pub r: String,
    #[serde(rename = "S")]
    pub s: String,
    /// "removed/bloated", or "–" for 0/0.
    #[serde(rename = "B")]
    pub b: String,
    #[serde(rename = "P")]
    pub p: String,
}

impl ReportRow {
    pub fn counts(&self) -> Counts {
        Counts {
            tp: self.tp,
            fp: self.fp,
            fn_: self.fn_,
            bloated_removed: self.bloated_removed,
            unknown_retained: self.unknown_retained,
        }
    }
}

fn pair(num: u64, den: u64) -> String {
    if den == 0 {
        NOT_APPLICABLE.to_owned()
    } else {
        format!("{num}/{den}")
    }
}

pub fn build_report_row(feature: &str, level: Level, c: Counts) -> ReportRow {
    ReportRow {
        feature: feature.to_owned(),
        level,
        tp: c.tp,
        fp: c.fp,
        fn_: c.fn_,
        bloated_removed: c.bloated_removed,
        unknown_retained: c.unknown_retained,
        r: pair(c.tp, c.required()),
        s: render_score(soundness(&c)),
        b: pair(c.bloated_removed, c.bloated()),
        p: render_score(precision(&c)),
    }
}

/// Rows for every evaluated level of a suite; absent levels are omitted.
pub fn suite_rows(feature: &str, truth: &GroundTruth, counts: impl Fn(Level) -> Counts) -> Vec<ReportRow> {
    Level::ALL
        .into_iter()
        .filter(|&l| !truth.is_absent(l))
        .map(|l| build_report_row(feature, l, counts(l)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Text,
    Csv,
    Json,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Text => "txt",
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Text => "text",
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        })
    }
}

pub fn render_report(rows: &[ReportRow], format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Text => render_text(rows).into_bytes(),
        ReportFormat::Csv => render_csv(rows),
        ReportFormat::Json => {
            let mut v = serde_json::to_vec_pretty(rows).expect("rows serialize");
            v.push(b'\n');
            v
        }
    }
}

fn render_text(rows: &[ReportRow]) -> String {
    let header = ["Feature", "Level", "R", "S", "B", "P"];
    let mut cells: Vec<[String; 6]> = Vec::new();
    let mut last_feature: Option<&str> = None;
    for r in rows {
        let feature = if last_feature == Some(r.feature.as_str()) { String::new() } else { r.feature.clone() };
        last_feature = Some(&r.feature);
        cells.push([feature, r.level.title().into(), r.r.clone(), r.s.clone(), r.b.clone(), r.p.clone()]);
    }
    let mut widths = header.map(|h| h.chars().count());
    for row in &cells {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cols: &[String]| {
        let mut s = String::new();
        for (i, (c, w)) in cols.iter().zip(widths).enumerate() {
            let pad = w - c.chars().count();
            if i < 2 {
                s.push_str(c);
                s.push_str(&" ".repeat(pad));
            } else {
                s.push_str(&" ".repeat(pad));
                s.push_str(c);
            }
            s.push_str(if i + 1 < cols.len() { "  " } else { "" });
        }
        s.trim_end().to_owned() + "\n"
    };
    let mut out = line(&header.map(String::from));
    out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
    out.push('\n');
    for row in &cells {
        out.push_str(&line(row));
    }
    out
}

fn render_csv(rows: &[ReportRow]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("rows serialize");
    }
    w.into_inner().expect("in-memory writer")
}

pub fn parse_csv_report(bytes: &[u8]) -> Result<Vec<ReportRow>, csv::Error> {
    csv::Reader::from_reader(bytes).deserialize().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groundtruth::LevelTruth;

    fn c(tp: u64, fp: u64, fn_: u64) -> Counts {
        Counts { tp, fp, fn_, ..Default::default() }
    }

    #[test]
    fn soundness_examples() {
        assert_eq!(soundness(&c(4, 0, 2)).unwrap().percent(), 67);
        assert_eq!(soundness(&c(3, 0, 12)).unwrap().percent(), 20);
        assert_eq!(soundness(&c(0, 0, 0)), None);
    }

    #[test]
    fn precision_examples() {
        assert_eq!(precision(&c(5, 6, 0)).unwrap().percent(), 45);
        assert_eq!(precision(&c(24, 4, 0)).unwrap().percent(), 86);
        assert_eq!(precision(&c(0, 0, 2)).unwrap().percent(), 0);
        assert_eq!(precision(&c(0, 0, 0)), None);
        assert_eq!(precision(&c(0, 3, 0)).unwrap().percent(), 0);
    }

    #[test]
    fn half_rounds_up() {
        assert_eq!(Ratio::new(1, 8).percent(), 13);
        assert_eq!(Ratio::new(1, 200).percent(), 1);
        assert_eq!(Ratio::new(1, 201).percent(), 0);
        assert_eq!(Ratio::new(5, 18).percent(), 28);
    }

    #[test]
    fn row_examples() {
        let abs = Counts { tp: 5, fn_: 0, fp: 13, bloated_removed: 7, unknown_retained: 0 };
        let row = build_report_row("abstract", Level::Method, abs);
        assert_eq!((row.r.as_str(), row.s.as_str(), row.b.as_str(), row.p.as_str()), ("5/5", "100", "7/20", "28"));
        let gen = Counts { tp: 4, fp: 7, ..Default::default() };
        assert_eq!(build_report_row("generics", Level::Field, gen).p, "36");
        let empty = build_report_row("x", Level::Class, Counts::default());
        assert_eq!((empty.r.as_str(), empty.s.as_str(), empty.b.as_str(), empty.p.as_str()), ("–", "–", "–", "–"));
    }

    #[test]
    fn absent_levels_are_omitted_and_unclassifiable() {
        let gt = GroundTruth { method: LevelTruth::absent(), ..Default::default() };
        let rows = suite_rows("serialization", &gt, |_| Counts::default());
        assert_eq!(rows.iter().map(|r| r.level).collect::<Vec<_>>(), vec![Level::Class, Level::Field]);
        assert_eq!(
            classify(&gt, &Inventory::default(), Level::Method),
            Err(MetricsError::LevelAbsent(Level::Method))
        );
    }

    #[test]
    fn csv_round_trip_and_text_alignment() {
        let rows = vec![
            build_report_row("abstract", Level::Class, Counts { tp: 15, bloated_removed: 5, ..Default::default() }),
            build_report_row("abstract", Level::Method, Counts { tp: 5, fp: 13, bloated_removed: 7, ..Default::default() }),
            build_report_row("overriding", Level::Class, Counts::default()),
        ];
        let csv = render_report(&rows, ReportFormat::Csv);
        assert_eq!(parse_csv_report(&csv).unwrap(), rows);
        let text = String::from_utf8(render_report(&rows, ReportFormat::Text)).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert!(lines[3].starts_with("            Method"));
        assert!(lines[4].ends_with('–'));
        let json: Vec<ReportRow> = serde_json::from_slice(&render_report(&rows, ReportFormat::Json)).unwrap();
        assert_eq!(json, rows);
    }

    #[test]
    fn corrupted_classes_can_be_excluded() {
        let mut gt = GroundTruth::default();
        gt.method.required = vec![ConstructRef::method("A", "f", "void", ""), ConstructRef::method("B", "g", "void", "")];
        let mut inv = Inventory::default();
        inv.insert(ConstructRef::method("A", "f", "void", ""));
        inv.diagnostics.push(crate::inventory::Diagnostic {
            entry: "p/B.class".into(),
            class: Some(ConstructRef::class("p", "B")),
            error: crate::classmodel::ClassError::BadMagic(0),
        });
        let missing = classify(&gt, &inv, Level::Method).unwrap();
        assert_eq!((missing.tp, missing.fn_), (1, 1));
        let opts = ClassifyOptions { corruption: CorruptionView::Exclude, ..Default::default() };
        let excluded = classify_with(&gt, &inv, Level::Method, opts).unwrap();
        assert_eq!((excluded.tp, excluded.fn_), (1, 0));
    }
}
