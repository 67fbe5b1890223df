//! Reference debloater: class-hierarchy reachability from the entry points,
//! then removal of everything unreached at the enabled levels.

mod apply;
mod hierarchy;
mod reach;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::classmodel::{ClassError, ConstructRef, Level};
use crate::groundtruth::{construct_ref_from_value, construct_ref_to_value, GroundTruth, GroundTruthError};

pub use apply::apply_debloat;
pub use reach::compute_reachable;

#[derive(Debug, Error)]
pub enum ShrinkError {
    #[error("entry point {0} not found in the input jars")]
    MissingEntryPoint(String),
    #[error("{class} extends or implements {missing}, which is neither in the inputs nor a platform class")]
    UnresolvedSuperclass { class: String, missing: String },
    #[error("debloated class {class} failed the parse-back check: {source}")]
    InvariantViolation { class: String, source: ClassError },
    #[error("cannot read input class {entry}: {source}")]
    Input { entry: String, source: ClassError },
    #[error("invalid policy: {0}")]
    Policy(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ShrinkMode {
    Conservative,
    Aggressive,
}

impl ShrinkMode {
    pub fn parse(s: &str) -> Option<ShrinkMode> {
        match s.to_ascii_uppercase().as_str() {
            "CONSERVATIVE" => Some(ShrinkMode::Conservative),
            "AGGRESSIVE" => Some(ShrinkMode::Aggressive),
            _ => None,
        }
    }
}

impl fmt::Display for ShrinkMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ShrinkMode::Conservative => "CONSERVATIVE",
            ShrinkMode::Aggressive => "AGGRESSIVE",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShrinkPolicy {
    pub mode: ShrinkMode,
    pub levels: BTreeSet<Level>,
    pub reflection_seeds: Vec<ConstructRef>,
    pub keep_annotations: bool,
    pub keep_serialization_members: bool,
}

impl ShrinkPolicy {
    pub fn conservative() -> Self {
        ShrinkPolicy {
            mode: ShrinkMode::Conservative,
            levels: Level::ALL.into_iter().collect(),
            reflection_seeds: Vec::new(),
            keep_annotations: true,
            keep_serialization_members: true,
        }
    }

    pub fn aggressive() -> Self {
        ShrinkPolicy { mode: ShrinkMode::Aggressive, keep_annotations: false, keep_serialization_members: false, ..Self::conservative() }
    }

    /// Removes nothing.
    pub fn no_op() -> Self {
        ShrinkPolicy { levels: BTreeSet::new(), ..Self::conservative() }
    }

    pub fn with_seeds(mut self, seeds: impl IntoIterator<Item = ConstructRef>) -> Self {
        self.reflection_seeds.extend(seeds);
        self
    }

    pub fn with_levels(mut self, levels: impl IntoIterator<Item = Level>) -> Self {
        self.levels = levels.into_iter().collect();
        self
    }

    pub fn removes(&self, level: Level) -> bool {
        self.levels.contains(&level)
    }

    pub fn is_conservative(&self) -> bool {
        self.mode == ShrinkMode::Conservative
    }

    /// Enforces that CONSERVATIVE keeps annotations and serialization members.
    pub fn check(&self) -> Result<(), ShrinkError> {
        if self.is_conservative() && !(self.keep_annotations && self.keep_serialization_members) {
            return Err(ShrinkError::Policy(
                "CONSERVATIVE requires keep_annotations and keep_serialization_members".into(),
            ));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "mode": self.mode,
            "levels": self.levels.iter().map(|l| l.as_str()).collect::<Vec<_>>(),
            "reflection_seeds": self.reflection_seeds.iter().map(construct_ref_to_value).collect::<Vec<_>>(),
            "keep_annotations": self.keep_annotations,
            "keep_serialization_members": self.keep_serialization_members,
        })
    }

    /// Reads a policy document. Missing keys take the defaults of the
    /// chosen mode; unknown keys are rejected.
    pub fn from_json(text: &str) -> Result<Self, ShrinkError> {
        let bad = |m: String| ShrinkError::Policy(m);
        let v: Value = serde_json::from_str(text).map_err(|e| bad(format!("invalid JSON: {e}")))?;
        let obj = v.as_object().ok_or_else(|| bad("policy must be an object".into()))?;
        const KEYS: [&str; 5] = ["mode", "levels", "reflection_seeds", "keep_annotations", "keep_serialization_members"];
        if let Some(k) = obj.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(bad(format!("unknown key {k:?}")));
        }
        let mode = match obj.get("mode") {
            None => ShrinkMode::Conservative,
            Some(m) => m.as_str().and_then(ShrinkMode::parse).ok_or_else(|| bad(format!("bad mode {m}")))?,
        };
        let mut p = match mode {
            ShrinkMode::Conservative => Self::conservative(),
            ShrinkMode::Aggressive => Self::aggressive(),
        };
        if let Some(l) = obj.get("levels") {
            let arr = l.as_array().ok_or_else(|| bad("levels must be an array".into()))?;
            p.levels = arr
                .iter()
                .map(|x| x.as_str().and_then(Level::parse).ok_or_else(|| bad(format!("bad level {x}"))))
                .collect::<Result<_, _>>()?;
        }
        if let Some(s) = obj.get("reflection_seeds") {
            p.reflection_seeds = parse_seed_list(s).map_err(|e| bad(e.to_string()))?;
        }
        for (key, slot) in [
            ("keep_annotations", &mut p.keep_annotations),
            ("keep_serialization_members", &mut p.keep_serialization_members),
        ] {
            if let Some(x) = obj.get(key) {
                *slot = x.as_bool().ok_or_else(|| bad(format!("{key} must be a boolean")))?;
            }
        }
        p.check()?;
        Ok(p)
    }
}

impl Default for ShrinkPolicy {
    fn default() -> Self {
        Self::conservative()
    }
}

fn parse_seed_list(v: &Value) -> Result<Vec<ConstructRef>, GroundTruthError> {
    let arr = v.as_array().ok_or_else(|| GroundTruthError::SchemaViolation {
        path: "$.reflection_seeds".into(),
        reason: "must be an array".into(),
    })?;
    arr.iter().enumerate().map(|(i, e)| construct_ref_from_value(e, &format!("$.reflection_seeds[{i}]"))).collect()
}

/// Reads a seed file: a JSON array of construct entries in ground-truth
/// syntax, or a ground-truth document whose required constructs all
/// become seeds.
pub fn parse_seeds(text: &str) -> Result<Vec<ConstructRef>, GroundTruthError> {
    let v: Value = serde_json::from_str(text).map_err(|e| GroundTruthError::SchemaViolation {
        path: "$".into(),
        reason: format!("invalid JSON: {e}"),
    })?;
    if v.is_array() {
        return parse_seed_list(&v);
    }
    let gt: GroundTruth = crate::groundtruth::ground_truth_from_value(&v)?;
    Ok(Level::ALL.into_iter().flat_map(|l| gt.level(l).required.clone()).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EdgeReason {
    DirectCall,
    VirtualDispatch,
    InterfaceDispatch,
    FieldAccess,
    NewInstance,
    IndyBootstrap,
    /// Methods named as analysis roots.
    EntryPoint,
    /// Supertype, class literal, cast, catch type or descriptor mention.
    TypeReference,
    PolicyKeep,
    Seed,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Edge {
    /// `None` for roots.
    pub from: Option<ConstructRef>,
    pub to: ConstructRef,
    pub reason: EdgeReason,
}

/// Result of the reachability analysis.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReachabilitySet {
    pub live_classes: BTreeSet<ConstructRef>,
    pub live_methods: BTreeSet<ConstructRef>,
    /// Fields that are read somewhere.
    pub live_fields: BTreeSet<ConstructRef>,
    /// Abstract methods that call sites resolve to.
    pub linked_methods: BTreeSet<ConstructRef>,
    /// Fields that are written but never read.
    pub written_fields: BTreeSet<ConstructRef>,
    pub edges: Vec<Edge>,
}

impl ReachabilitySet {
    /// A set that keeps exactly the given constructs, for oracle runs.
    pub fn from_refs(refs: impl IntoIterator<Item = ConstructRef>) -> Self {
        let mut r = ReachabilitySet::default();
        for c in refs {
            r.level_mut(c.level()).insert(c);
        }
        r
    }

    fn level_mut(&mut self, level: Level) -> &mut BTreeSet<ConstructRef> {
        match level {
            Level::Class => &mut self.live_classes,
            Level::Method => &mut self.live_methods,
            Level::Field => &mut self.live_fields,
        }
    }

    pub fn level(&self, level: Level) -> &BTreeSet<ConstructRef> {
        match level {
            Level::Class => &self.live_classes,
            Level::Method => &self.live_methods,
            Level::Field => &self.live_fields,
        }
    }

    pub fn contains(&self, r: &ConstructRef) -> bool {
        self.level(r.level()).contains(r)
    }

    /// Constructs `apply_debloat` keeps under `policy`.
    pub fn retained(&self, level: Level, policy: &ShrinkPolicy) -> BTreeSet<ConstructRef> {
        let mut out = self.level(level).clone();
        match level {
            Level::Method => out.extend(self.linked_methods.iter().cloned()),
            Level::Field if policy.is_conservative() => out.extend(self.written_fields.iter().cloned()),
            _ => {}
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchgen::{generate_suite, Feature};
    use crate::classmodel::{emit_class, ClassBuilder};
    use crate::inventory::{extract_inventory, ParsePolicy};
    use crate::jario::JarArchive;
    use crate::metrics::{classify, precision, soundness, Score};

    fn listing_case() -> crate::benchgen::TestCase {
        let s = generate_suite(Feature::Abstract).unwrap();
        s.case("anonymous-class").unwrap().clone()
    }

    fn main_of(simple: &str) -> ConstructRef {
        ConstructRef::method(simple, "main", "void", "String[]")
    }

    #[test]
    fn anonymous_subclass_dispatch() {
        let case = listing_case();
        let jar = case.jar().unwrap();
        let live = compute_reachable(&[jar], &[main_of("Main")], &ShrinkPolicy::conservative()).unwrap();
        assert!(live.live_methods.contains(&ConstructRef::method("Main$1", "engine", "void", "")));
        assert!(!live.live_methods.contains(&ConstructRef::method("Main$1", "material", "void", "")));
        assert!(live.linked_methods.contains(&ConstructRef::method("Car", "engine", "void", "")));
        assert!(live.live_fields.contains(&ConstructRef::field("Car", "piston")));
        assert!(live.written_fields.contains(&ConstructRef::field("Car", "material")));
        assert!(live.edges.iter().any(|e| e.reason == EdgeReason::VirtualDispatch
            && e.to == ConstructRef::method("Main$1", "engine", "void", "")));
    }

    #[test]
    fn missing_entry_point_is_reported() {
        let jar = listing_case().jar().unwrap();
        let err = compute_reachable(&[jar], &[main_of("Nowhere")], &ShrinkPolicy::conservative()).unwrap_err();
        assert!(matches!(err, ShrinkError::MissingEntryPoint(_)));
    }

    #[test]
    fn unknown_superclass_is_reported() {
        let mut b = ClassBuilder::new("p/Orphan", "q/Gone");
        b.default_constructor();
        let mut jar = JarArchive::new();
        jar.insert_class("p/Orphan", b.to_bytes().unwrap());
        let err = compute_reachable(&[jar], &[], &ShrinkPolicy::conservative()).unwrap_err();
        assert!(matches!(err, ShrinkError::UnresolvedSuperclass { .. }));
    }

    #[test]
    fn empty_entries_keep_only_roots_from_policy() {
        let s = generate_suite(Feature::Reflection).unwrap();
        let none = compute_reachable(&[s.jar.clone()], &[], &ShrinkPolicy::conservative()).unwrap();
        assert_eq!(none, ReachabilitySet::default());

        let seeds = s.reflective_targets();
        let pol = ShrinkPolicy::conservative().with_seeds(seeds.clone());
        let live = compute_reachable(&[s.jar.clone()], &[], &pol).unwrap();
        for seed in seeds.iter().filter(|r| r.level() == Level::Method) {
            assert!(live.live_methods.contains(seed), "{seed}");
        }
        let roots: BTreeSet<EdgeReason> = live.edges.iter().filter(|e| e.from.is_none()).map(|e| e.reason).collect();
        assert!(roots.iter().all(|r| matches!(r, EdgeReason::Seed | EdgeReason::PolicyKeep)));
    }

    fn scores(feature: Feature, policy: &ShrinkPolicy) -> Vec<(Level, Score, Score)> {
        let s = generate_suite(feature).unwrap();
        let live = compute_reachable(&[s.jar.clone()], &[s.entry_method()], policy).unwrap();
        let out = apply_debloat(&s.jar, &live, policy).unwrap();
        let inv = extract_inventory(&out, ParsePolicy::Strict).unwrap();
        Level::ALL
            .into_iter()
            .filter(|l| !s.merged_truth.is_absent(*l))
            .map(|l| {
                let c = classify(&s.merged_truth, &inv, l).unwrap();
                (l, soundness(&c), precision(&c))
            })
            .collect()
    }

    #[test]
    fn seeds_restore_reflective_methods() {
        let s = generate_suite(Feature::Reflection).unwrap();
        let plain = scores(Feature::Reflection, &ShrinkPolicy::conservative());
        let seeded = scores(Feature::Reflection, &ShrinkPolicy::conservative().with_seeds(s.reflective_targets()));
        let method = |v: &[(Level, Score, Score)]| v.iter().find(|x| x.0 == Level::Method).unwrap().1;
        assert_eq!(method(&plain), Some(crate::metrics::Ratio::new(0, 7)));
        assert!(matches!(method(&seeded), Some(r) if r.percent() == 100));
    }

    #[test]
    fn no_op_policy_is_byte_identical() {
        let s = generate_suite(Feature::Generics).unwrap();
        let pol = ShrinkPolicy::no_op();
        let live = compute_reachable(&[s.jar.clone()], &[s.entry_method()], &pol).unwrap();
        assert_eq!(apply_debloat(&s.jar, &live, &pol).unwrap(), s.jar);
    }

    #[test]
    fn oracle_reachability_is_perfect() {
        let s = generate_suite(Feature::Interface).unwrap();
        let required = Level::ALL.into_iter().flat_map(|l| s.merged_truth.level(l).required.clone());
        let live = ReachabilitySet::from_refs(required);
        let out = apply_debloat(&s.jar, &live, &ShrinkPolicy::conservative()).unwrap();
        let inv = extract_inventory(&out, ParsePolicy::Strict).unwrap();
        for l in Level::ALL {
            let c = classify(&s.merged_truth, &inv, l).unwrap();
            assert_eq!((c.fn_, c.fp), (0, 0), "{l}");
        }
    }

    #[test]
    fn output_is_deterministic() {
        let s = generate_suite(Feature::Lambda).unwrap();
        let run = || {
            let pol = ShrinkPolicy::aggressive();
            let live = compute_reachable(&[s.jar.clone()], &[s.entry_method()], &pol).unwrap();
            crate::jario::write_jar(&apply_debloat(&s.jar, &live, &pol).unwrap()).unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn aggressive_keeps_a_subset() {
        for f in Feature::ALL {
            let s = generate_suite(f).unwrap();
            let c = ShrinkPolicy::conservative();
            let a = ShrinkPolicy::aggressive();
            let lc = compute_reachable(&[s.jar.clone()], &[s.entry_method()], &c).unwrap();
            let la = compute_reachable(&[s.jar.clone()], &[s.entry_method()], &a).unwrap();
            for l in Level::ALL {
                assert!(la.retained(l, &a).is_subset(&lc.retained(l, &c)), "{f} {l}");
            }
        }
    }

    #[test]
    fn removed_field_writes_become_pops() {
        let case = listing_case();
        let jar = case.jar().unwrap();
        let pol = ShrinkPolicy::aggressive();
        let live = compute_reachable(&[jar.clone()], &[main_of("Main")], &pol).unwrap();
        let out = apply_debloat(&jar, &live, &pol).unwrap();
        let car = crate::classmodel::parse_class(out.class_bytes("Abstract/Car").unwrap()).unwrap();
        assert!(car.find_field("material", "Ljava/lang/String;").is_none());
        let before = crate::classmodel::parse_class(jar.class_bytes("Abstract/Car").unwrap()).unwrap();
        let len = |u: &crate::classmodel::ClassUnit| {
            crate::classmodel::code::encode(&u.find_method("<init>", "()V").unwrap().code().unwrap().code).unwrap().len()
        };
        assert_eq!(len(&car), len(&before));
        assert!(emit_class(&car).is_ok());
    }

    #[test]
    fn policy_json_round_trips() {
        let p = ShrinkPolicy::aggressive()
            .with_levels([Level::Method])
            .with_seeds([ConstructRef::method("Vault", "open", "String", "")]);
        let back = ShrinkPolicy::from_json(&p.to_json().to_string()).unwrap();
        assert_eq!(back, p);
        let bad = r#"{"mode":"CONSERVATIVE","keep_annotations":false}"#;
        assert!(ShrinkPolicy::from_json(bad).is_err());
        assert!(ShrinkPolicy::from_json(r#"{"mode":"FAST"}"#).is_err());
    }

    #[test]
    fn seed_files_accept_lists_and_truths() {
        let list = r#"[{"type":"Vault","name":"open","return":"String","param":""},{"class":"Vault","name":"key"}]"#;
        assert_eq!(
            parse_seeds(list).unwrap(),
            vec![ConstructRef::method("Vault", "open", "String", ""), ConstructRef::field("Vault", "key")]
        );
        let gt = crate::groundtruth::emit_ground_truth(&generate_suite(Feature::Reflection).unwrap().merged_truth);
        assert!(parse_seeds(&gt).unwrap().contains(&ConstructRef::method("Vault", "open", "String", "")));
    }
}
