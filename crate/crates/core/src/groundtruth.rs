//! Per-test-case ground truths: required and bloated constructs per level.
//!
//! JSON layout per level: `{"required": [...], "bloated": [...]}`, with two
//! optional extensions. `"absent": true` marks a level the feature does not
//! evaluate. `"excluded"` lists driver constructs that exist in the fixture
//! but are not scored. Both keys are emitted only when in use.

use std::collections::BTreeSet;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::classmodel::{ConstructRef, Level};
use crate::inventory::Inventory;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroundTruthError {
    #[error("schema violation at {path}: {reason}")]
    SchemaViolation { path: String, reason: String },
    #[error("{construct} is both required and bloated at {level} level")]
    OverlapViolation { level: Level, construct: String },
    #[error("cannot merge ground truths: {0}")]
    MergeConflict(String),
}

fn schema(path: impl Into<String>, reason: impl Into<String>) -> GroundTruthError {
    GroundTruthError::SchemaViolation { path: path.into(), reason: reason.into() }
}

/// One level's partition. Lists keep document order; membership tests go
/// through the set views.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LevelTruth {
    pub absent: bool,
    pub required: Vec<ConstructRef>,
    pub bloated: Vec<ConstructRef>,
    pub excluded: Vec<ConstructRef>,
}

impl LevelTruth {
    pub fn absent() -> Self {
        LevelTruth { absent: true, ..Default::default() }
    }

    pub fn required_set(&self) -> BTreeSet<&ConstructRef> {
        self.required.iter().collect()
    }

    pub fn bloated_set(&self) -> BTreeSet<&ConstructRef> {
        self.bloated.iter().collect()
    }

    /// required ∪ bloated ∪ excluded.
    pub fn universe(&self) -> BTreeSet<&ConstructRef> {
        self.required.iter().chain(&self.bloated).chain(&self.excluded).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.required.is_empty() && self.bloated.is_empty() && self.excluded.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundTruth {
    pub class: LevelTruth,
    pub method: LevelTruth,
    pub field: LevelTruth,
}

impl GroundTruth {
    pub fn level(&self, level: Level) -> &LevelTruth {
        match level {
            Level::Class => &self.class,
            Level::Method => &self.method,
            Level::Field => &self.field,
        }
    }

    pub fn level_mut(&mut self, level: Level) -> &mut LevelTruth {
        match level {
            Level::Class => &mut self.class,
            Level::Method => &mut self.method,
            Level::Field => &mut self.field,
        }
    }

    pub fn is_absent(&self, level: Level) -> bool {
        self.level(level).absent
    }

    /// Checks disjointness, uniqueness, level kinds, and that absent levels
    /// are empty.
    pub fn check(&self) -> Result<(), GroundTruthError> {
        for level in Level::ALL {
            let lt = self.level(level);
            if lt.absent && !lt.is_empty() {
                return Err(schema(format!("$.{level}"), "absent level lists constructs"));
            }
            let mut seen: BTreeSet<&ConstructRef> = BTreeSet::new();
            let sections = [("required", &lt.required), ("bloated", &lt.bloated), ("excluded", &lt.excluded)];
            for (name, list) in sections {
                let mut local = BTreeSet::new();
                for (i, r) in list.iter().enumerate() {
                    if r.level() != level {
                        return Err(schema(format!("$.{level}.{name}[{i}]"), "construct of another level"));
                    }
                    if !local.insert(r) {
                        return Err(schema(format!("$.{level}.{name}[{i}]"), format!("duplicate entry {r}")));
                    }
                    if !seen.insert(r) {
                        return Err(GroundTruthError::OverlapViolation { level, construct: r.to_string() });
                    }
                }
            }
        }
        Ok(())
    }
}

fn entry_keys(level: Level) -> &'static [&'static str] {
    match level {
        Level::Class => &["package", "name"],
        Level::Method => &["type", "name", "return", "param"],
        Level::Field => &["class", "name"],
    }
}

fn ref_to_json(r: &ConstructRef) -> Value {
    match r {
        ConstructRef::Class { package, name } => json!({"package": package, "name": name}),
        ConstructRef::Method { class, name, ret, params } => {
            json!({"type": class, "name": name, "return": ret, "param": params.join(",")})
        }
        ConstructRef::Field { class, name } => json!({"class": class, "name": name}),
    }
}

/// One construct in ground-truth entry syntax.
pub fn construct_ref_to_value(r: &ConstructRef) -> Value {
    ref_to_json(r)
}

/// Parses one entry, taking the level from its key set.
pub fn construct_ref_from_value(v: &Value, path: &str) -> Result<ConstructRef, GroundTruthError> {
    let obj = v.as_object().ok_or_else(|| schema(path, "entry must be an object"))?;
    let level = Level::ALL
        .into_iter()
        .find(|l| entry_keys(*l).len() == obj.len() && entry_keys(*l).iter().all(|k| obj.contains_key(*k)))
        .ok_or_else(|| schema(path, "keys match no construct kind"))?;
    ref_from_json(level, v, path)
}

fn ref_from_json(level: Level, v: &Value, path: &str) -> Result<ConstructRef, GroundTruthError> {
    let obj = v.as_object().ok_or_else(|| schema(path, "entry must be an object"))?;
    let keys = entry_keys(level);
    for k in obj.keys() {
        if !keys.contains(&k.as_str()) {
            return Err(schema(format!("{path}.{k}"), "unknown key"));
        }
    }
    let mut vals = Vec::with_capacity(keys.len());
    for k in keys {
        let s = obj
            .get(*k)
            .ok_or_else(|| schema(path, format!("missing key {k:?}")))?
            .as_str()
            .ok_or_else(|| schema(format!("{path}.{k}"), "must be a string"))?;
        vals.push(s);
    }
    Ok(match level {
        Level::Class => ConstructRef::class(vals[0], vals[1]),
        Level::Method => ConstructRef::method(vals[0], vals[1], vals[2], vals[3]),
        Level::Field => ConstructRef::field(vals[0], vals[1]),
    })
}

pub fn parse_ground_truth(text: &str) -> Result<GroundTruth, GroundTruthError> {
    let root: Value = serde_json::from_str(text).map_err(|e| schema("$", format!("invalid JSON: {e}")))?;
    ground_truth_from_value(&root)
}

pub fn ground_truth_from_value(root: &Value) -> Result<GroundTruth, GroundTruthError> {
    let obj = root.as_object().ok_or_else(|| schema("$", "document must be an object"))?;
    for k in obj.keys() {
        if Level::ALL.iter().all(|l| l.as_str() != k) {
            return Err(schema(format!("$.{k}"), "unknown section"));
        }
    }
    let mut gt = GroundTruth::default();
    for level in Level::ALL {
        let path = format!("$.{level}");
        let sec = obj
            .get(level.as_str())
            .ok_or_else(|| schema("$", format!("missing section {level}")))?
            .as_object()
            .ok_or_else(|| schema(&path, "section must be an object"))?;
        for k in sec.keys() {
            if !["absent", "required", "bloated", "excluded"].contains(&k.as_str()) {
                return Err(schema(format!("{path}.{k}"), "unknown key"));
            }
        }
        let lt = gt.level_mut(level);
        if let Some(a) = sec.get("absent") {
            lt.absent = a.as_bool().ok_or_else(|| schema(format!("{path}.absent"), "must be a boolean"))?;
        }
        for (name, required) in [("required", true), ("bloated", true), ("excluded", false)] {
            let Some(list) = sec.get(name) else {
                if required {
                    return Err(schema(&path, format!("missing key {name:?}")));
                }
                continue;
            };
            let arr = list.as_array().ok_or_else(|| schema(format!("{path}.{name}"), "must be an array"))?;
            let refs = arr
                .iter()
                .enumerate()
                .map(|(i, v)| ref_from_json(level, v, &format!("{path}.{name}[{i}]")))
                .collect::<Result<Vec<_>, _>>()?;
            match name {
                "required" => lt.required = refs,
                "bloated" => lt.bloated = refs,
                _ => lt.excluded = refs,
            }
        }
    }
    gt.check()?;
    Ok(gt)
}

pub fn ground_truth_to_value(gt: &GroundTruth) -> Value {
    let mut root = Map::new();
    for level in Level::ALL {
        let lt = gt.level(level);
        let mut sec = Map::new();
        if lt.absent {
            sec.insert("absent".into(), Value::Bool(true));
        }
        sec.insert("required".into(), lt.required.iter().map(ref_to_json).collect());
        sec.insert("bloated".into(), lt.bloated.iter().map(ref_to_json).collect());
        if !lt.excluded.is_empty() {
            sec.insert("excluded".into(), lt.excluded.iter().map(ref_to_json).collect());
        }
        root.insert(level.as_str().into(), Value::Object(sec));
    }
    Value::Object(root)
}

/// Pretty JSON with a trailing newline.
pub fn emit_ground_truth(gt: &GroundTruth) -> String {
    let mut s = serde_json::to_string_pretty(&ground_truth_to_value(gt)).expect("JSON values serialize");
    s.push('\n');
    s
}

/// Unions several truths. Levels must agree on absence and no construct may
/// appear in two inputs.
pub fn merge(truths: &[GroundTruth]) -> Result<GroundTruth, GroundTruthError> {
    let mut out = GroundTruth::default();
    for level in Level::ALL {
        let absent: BTreeSet<bool> = truths.iter().map(|t| t.is_absent(level)).collect();
        if absent.len() > 1 {
            return Err(GroundTruthError::MergeConflict(format!("{level} is absent in only some inputs")));
        }
        let o = out.level_mut(level);
        o.absent = absent.contains(&true);
        let mut seen = BTreeSet::new();
        for t in truths {
            let lt = t.level(level);
            for r in lt.universe() {
                if !seen.insert(r.clone()) {
                    return Err(GroundTruthError::MergeConflict(format!("{r} appears in two inputs")));
                }
            }
            o.required.extend(lt.required.iter().cloned());
            o.bloated.extend(lt.bloated.iter().cloned());
            o.excluded.extend(lt.excluded.iter().cloned());
        }
    }
    out.check()?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FindingKind {
    /// In the truth but not declared by the fixture.
    MissingFromFixture,
    /// Declared by the fixture but absent from the truth.
    ExtraInFixture,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Finding {
    pub level: Level,
    pub kind: FindingKind,
    pub construct: ConstructRef,
}

impl std::fmt::Display for Finding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let what = match self.kind {
            FindingKind::MissingFromFixture => "missing from fixture",
            FindingKind::ExtraInFixture => "extra in fixture",
        };
        write!(f, "{} {}: {what}", self.level, self.construct)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FixtureReport {
    pub findings: Vec<Finding>,
}

impl FixtureReport {
    pub fn is_clean(&self) -> bool {
        self.findings.is_empty()
    }
}

/// Completeness gate: the truth must partition the fixture's inventory at
/// every evaluated level. Initializers are ignored.
pub fn validate_against_fixture(gt: &GroundTruth, inv: &Inventory) -> FixtureReport {
    validate_against_fixture_with(gt, inv, false)
}

pub fn validate_against_fixture_with(gt: &GroundTruth, inv: &Inventory, include_initializers: bool) -> FixtureReport {
    let mut findings = Vec::new();
    for level in Level::ALL {
        let lt = gt.level(level);
        if lt.absent {
            continue;
        }
        let counted = |r: &&ConstructRef| include_initializers || !r.is_initializer();
        let truth: BTreeSet<&ConstructRef> = lt.universe().into_iter().filter(counted).collect();
        let fixture: BTreeSet<&ConstructRef> = inv.level(level).iter().filter(counted).collect();
        for r in truth.difference(&fixture) {
            findings.push(Finding { level, kind: FindingKind::MissingFromFixture, construct: (*r).clone() });
        }
        for r in fixture.difference(&truth) {
            findings.push(Finding { level, kind: FindingKind::ExtraInFixture, construct: (*r).clone() });
        }
    }
    FixtureReport { findings }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const LISTING2: &str = r#"{
 "CLASS": {
  "required": [
    {"package": "Abstract", "name": "Main"},
    {"package": "Abstract", "name": "Car"},
    {"package": "Abstract", "name": "Main$1"}
   ],
  "bloated": []
 },
 "METHOD": {
  "required": [
    {"type": "Main", "name": "main", "return": "void", "param": "String[]"},
    {"type": "Main$1", "name": "engine", "return": "void", "param": ""}
   ],
  "bloated": [
    {"type": "Car", "name": "engine", "return": "void", "param": ""},
    {"type": "Car", "name": "material", "return": "void", "param": ""},
    {"type": "Main$1", "name": "material", "return": "void", "param": ""}
   ]
 },
 "FIELD": {
  "required": [
    {"class": "Car", "name": "piston"}
   ],
  "bloated": [
    {"class": "Car", "name": "material"}
   ]
 }
}"#;

    #[test]
    fn listing_counts() {
        let gt = parse_ground_truth(LISTING2).unwrap();
        assert_eq!((gt.class.required.len(), gt.class.bloated.len()), (3, 0));
        assert_eq!((gt.method.required.len(), gt.method.bloated.len()), (2, 3));
        assert_eq!((gt.field.required.len(), gt.field.bloated.len()), (1, 1));
        assert_eq!(gt.method.required[0], ConstructRef::method("Main", "main", "void", "String[]"));
    }

    #[test]
    fn listing_round_trips_to_the_same_json() {
        let gt = parse_ground_truth(LISTING2).unwrap();
        let emitted = emit_ground_truth(&gt);
        let a: Value = serde_json::from_str(&emitted).unwrap();
        let b: Value = serde_json::from_str(LISTING2).unwrap();
        assert_eq!(a, b);
        assert_eq!(parse_ground_truth(&emitted).unwrap(), gt);
    }

    #[test]
    fn empty_document() {
        let doc = r#"{"CLASS":{"required":[],"bloated":[]},"METHOD":{"required":[],"bloated":[]},"FIELD":{"required":[],"bloated":[]}}"#;
        let gt = parse_ground_truth(doc).unwrap();
        assert_eq!(gt, GroundTruth::default());
        assert_eq!(parse_ground_truth(&emit_ground_truth(&gt)).unwrap(), gt);
    }

    #[test]
    fn overlap_is_rejected() {
        let doc = LISTING2.replace(
            r#"{"type": "Main$1", "name": "engine", "return": "void", "param": ""}
   ],"#,
            r#"{"type": "Main$1", "name": "engine", "return": "void", "param": ""},
    {"type": "Car", "name": "engine", "return": "void", "param": ""}
   ],"#,
        );
        assert!(matches!(
            parse_ground_truth(&doc),
            Err(GroundTruthError::OverlapViolation { level: Level::Method, .. })
        ));
    }

    #[test]
    fn schema_is_closed() {
        let extra = LISTING2.replace(r#""name": "Car"}"#, r#""name": "Car", "public": true}"#);
        assert!(matches!(parse_ground_truth(&extra), Err(GroundTruthError::SchemaViolation { ref path, .. }) if path == "$.CLASS.required[1].public"));
        let section = LISTING2.replacen('{', r#"{"MODULE": {},"#, 1);
        assert!(matches!(parse_ground_truth(&section), Err(GroundTruthError::SchemaViolation { .. })));
        let missing = LISTING2.replace(r#", "param": """#, "");
        assert!(matches!(parse_ground_truth(&missing), Err(GroundTruthError::SchemaViolation { .. })));
        assert!(matches!(parse_ground_truth("[]"), Err(GroundTruthError::SchemaViolation { .. })));
        assert!(matches!(parse_ground_truth("{"), Err(GroundTruthError::SchemaViolation { .. })));
    }

    #[test]
    fn absent_level_round_trip() {
        let mut gt = parse_ground_truth(LISTING2).unwrap();
        gt.field = LevelTruth::absent();
        let text = emit_ground_truth(&gt);
        assert!(text.contains("\"absent\": true"));
        assert_eq!(parse_ground_truth(&text).unwrap(), gt);
        gt.field.required.push(ConstructRef::field("Car", "piston"));
        assert!(gt.check().is_err());
    }

    #[test]
    fn excluded_section_is_optional_and_scoped() {
        let mut gt = parse_ground_truth(LISTING2).unwrap();
        assert!(!emit_ground_truth(&gt).contains("excluded"));
        gt.method.excluded.push(ConstructRef::method("SuiteMain", "main", "void", "String[]"));
        let back = parse_ground_truth(&emit_ground_truth(&gt)).unwrap();
        assert_eq!(back, gt);
        assert_eq!(back.method.universe().len(), 6);
    }

    #[test]
    fn merge_requires_disjoint_inputs() {
        let gt = parse_ground_truth(LISTING2).unwrap();
        assert!(matches!(merge(&[gt.clone(), gt.clone()]), Err(GroundTruthError::MergeConflict(_))));
        let mut other = GroundTruth::default();
        other.class.required.push(ConstructRef::class("Abstract", "Other"));
        let m = merge(&[gt, other]).unwrap();
        assert_eq!(m.class.required.len(), 4);
    }

    #[test]
    fn completeness_gate_reports_extra_constructs() {
        let gt = parse_ground_truth(LISTING2).unwrap();
        let mut inv = Inventory::default();
        for level in Level::ALL {
            for r in gt.level(level).universe() {
                inv.insert(r.clone());
            }
        }
        inv.insert(ConstructRef::method("Car", "<init>", "void", ""));
        assert!(validate_against_fixture(&gt, &inv).is_clean());
        assert!(!validate_against_fixture_with(&gt, &inv, true).is_clean());

        let mut short = gt.clone();
        short.method.required.remove(0);
        let report = validate_against_fixture(&short, &inv);
        assert_eq!(report.findings.len(), 1);
        assert_eq!(report.findings[0].kind, FindingKind::ExtraInFixture);
        assert_eq!(report.findings[0].construct, ConstructRef::method("Main", "main", "void", "String[]"));
    }
}
