//! Synthesizes the feature suites: one bloated JAR per language feature,
//! with a ground truth per test case and a suite main invoking every case.

mod dsl;
mod suites;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::classmodel::code::op;
use crate::classmodel::{access, emit_class, ClassBuilder, ClassError, ClassUnit, Constant, ConstructRef, Level};
use crate::groundtruth::{emit_ground_truth, merge, validate_against_fixture, GroundTruth, GroundTruthError};
use crate::inventory::{extract_inventory, Inventory, InventoryError, ParsePolicy};
use crate::jario::{write_jar, JarArchive, JarError, Manifest};

pub const SUITE_MAIN: &str = "SuiteMain";
pub const WRAPPER_MAIN: &str = "Wrapper/Main";

#[derive(Debug, Error)]
pub enum GenerationError {
    #[error("generation invariant violated: {0}")]
    GenerationInvariantViolation(String),
    #[error(transparent)]
    Class(#[from] ClassError),
    #[error(transparent)]
    Jar(#[from] JarError),
    #[error(transparent)]
    Truth(#[from] GroundTruthError),
    #[error(transparent)]
    Inventory(#[from] InventoryError),
    #[error("io error at {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

fn violation(msg: impl Into<String>) -> GenerationError {
    GenerationError::GenerationInvariantViolation(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feature {
    Abstract,
    Annotation,
    Deserialization,
    DynamicClassLoading,
    Exception,
    Externalization,
    Generics,
    Interface,
    Lambda,
    Overloading,
    Overriding,
    Reflection,
    Serialization,
}

impl Feature {
    pub const ALL: [Feature; 13] = [
        Feature::Abstract,
        Feature::Annotation,
        Feature::Deserialization,
        Feature::DynamicClassLoading,
        Feature::Exception,
        Feature::Externalization,
        Feature::Generics,
        Feature::Interface,
        Feature::Lambda,
        Feature::Overloading,
        Feature::Overriding,
        Feature::Reflection,
        Feature::Serialization,
    ];

    /// Directory name, e.g. `dynamic_class_loading`.
    pub fn slug(self) -> &'static str {
        match self {
            Feature::Abstract => "abstract",
            Feature::Annotation => "annotation",
            Feature::Deserialization => "deserialization",
            Feature::DynamicClassLoading => "dynamic_class_loading",
            Feature::Exception => "exception",
            Feature::Externalization => "externalization",
            Feature::Generics => "generics",
            Feature::Interface => "interface",
            Feature::Lambda => "lambda",
            Feature::Overloading => "overloading",
            Feature::Overriding => "overriding",
            Feature::Reflection => "reflection",
            Feature::Serialization => "serialization",
        }
    }

    /// Report name, e.g. `dynamic class loading`.
    pub fn name(self) -> &'static str {
        match self {
            Feature::DynamicClassLoading => "dynamic class loading",
            f => f.slug(),
        }
    }

    /// Java package holding the suite's classes.
    pub fn package(self) -> &'static str {
        match self {
            Feature::Abstract => "Abstract",
            Feature::Annotation => "Annotation",
            Feature::Deserialization => "Deserialization",
            Feature::DynamicClassLoading => "DynamicClassLoading",
            Feature::Exception => "Exception",
            Feature::Externalization => "Externalization",
            Feature::Generics => "Generics",
            Feature::Interface => "Interface",
            Feature::Lambda => "Lambda",
            Feature::Overloading => "Overloading",
            Feature::Overriding => "Overriding",
            Feature::Reflection => "Reflection",
            Feature::Serialization => "Serialization",
        }
    }

    pub fn expected_cases(self) -> usize {
        match self {
            Feature::Abstract | Feature::Overloading | Feature::Reflection => 6,
            Feature::Annotation | Feature::Generics => 7,
            Feature::Deserialization | Feature::DynamicClassLoading | Feature::Externalization => 2,
            Feature::Exception | Feature::Interface | Feature::Lambda | Feature::Overriding => 4,
            Feature::Serialization => 5,
        }
    }

    /// Levels the feature does not evaluate.
    pub fn absent_levels(self) -> &'static [Level] {
        match self {
            Feature::Overloading | Feature::Overriding => &[Level::Field],
            Feature::Serialization => &[Level::Method],
            _ => &[],
        }
    }

    /// Features whose targets are reached through strings only.
    pub fn is_dynamic(self) -> bool {
        matches!(self, Feature::Reflection | Feature::DynamicClassLoading)
    }

    /// Accepts the slug, the report name, or the package name.
    pub fn parse(s: &str) -> Option<Feature> {
        let k = s.trim().to_ascii_lowercase().replace([' ', '-'], "_");
        Feature::ALL.into_iter().find(|f| f.slug() == k || f.package().to_ascii_lowercase() == k.replace('_', ""))
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub struct TestCase {
    pub id: String,
    pub feature: Feature,
    pub technique: String,
    pub classes: Vec<ClassUnit>,
    pub truth: GroundTruth,
    /// Binary name of the class whose `main` runs the case.
    pub entry: String,
    /// Constructs the case reaches only through strings.
    pub reflective_targets: Vec<ConstructRef>,
}

impl TestCase {
    pub fn jar(&self) -> Result<JarArchive, GenerationError> {
        let mut jar = JarArchive::new();
        for c in &self.classes {
            jar.insert_class(c.binary_name(), emit_class(c)?);
        }
        Ok(jar)
    }

    pub fn inventory(&self) -> Result<Inventory, GenerationError> {
        Ok(extract_inventory(&self.jar()?, ParsePolicy::Strict)?)
    }

    /// Simple names of the case's classes.
    pub fn class_names(&self) -> BTreeSet<String> {
        self.classes.iter().map(|c| crate::classmodel::descriptor::simple_name(c.binary_name()).to_owned()).collect()
    }
}

#[derive(Debug, Clone)]
pub struct FeatureSuite {
    pub feature: Feature,
    pub test_cases: Vec<TestCase>,
    pub jar: JarArchive,
    /// Case truths plus the suite main's own entry.
    pub merged_truth: GroundTruth,
    pub entry_class: ConstructRef,
}

impl FeatureSuite {
    pub fn entry_binary_name(&self) -> String {
        format!("{}/{SUITE_MAIN}", self.feature.package())
    }

    /// `main` of the suite main class.
    pub fn entry_method(&self) -> ConstructRef {
        ConstructRef::method(SUITE_MAIN, "main", "void", "String[]")
    }

    pub fn case(&self, id: &str) -> Option<&TestCase> {
        self.test_cases.iter().find(|c| c.id == id)
    }

    /// Truth for the suite main class alone.
    pub fn driver_truth(&self) -> GroundTruth {
        driver_truth(self.feature)
    }

    pub fn reflective_targets(&self) -> Vec<ConstructRef> {
        self.test_cases.iter().flat_map(|c| c.reflective_targets.iter().cloned()).collect()
    }
}

fn driver_truth(feature: Feature) -> GroundTruth {
    let mut gt = GroundTruth::default();
    for level in feature.absent_levels() {
        gt.level_mut(*level).absent = true;
    }
    gt.class.required.push(ConstructRef::class(feature.package(), SUITE_MAIN));
    let main = ConstructRef::method(SUITE_MAIN, "main", "void", "String[]");
    if !gt.method.absent {
        if feature.is_dynamic() {
            gt.method.excluded.push(main);
        } else {
            gt.method.required.push(main);
        }
    }
    gt
}

fn suite_main(feature: Feature, entries: &[String]) -> Result<ClassUnit, ClassError> {
    let name = format!("{}/{SUITE_MAIN}", feature.package());
    let mut b = ClassBuilder::new(&name, "java/lang/Object");
    b.default_constructor();
    let m = b.method(access::PUBLIC | access::STATIC, "main", dsl::MAIN_DESC, |c| {
        for e in entries {
            c.aload(0).invokestatic(e, "main", dsl::MAIN_DESC);
        }
        c.op(op::RETURN);
    });
    b.throws(m, &["java/lang/Exception"]);
    b.build()
}

pub fn generate_suite(feature: Feature) -> Result<FeatureSuite, GenerationError> {
    let test_cases: Vec<TestCase> =
        suites::cases(feature).into_iter().map(dsl::Case::build).collect::<Result<_, _>>()?;
    if test_cases.len() != feature.expected_cases() {
        return Err(violation(format!(
            "{feature} has {} test cases, expected {}",
            test_cases.len(),
            feature.expected_cases()
        )));
    }

    let mut ids = BTreeSet::new();
    let mut names: BTreeMap<String, String> = BTreeMap::new();
    for case in &test_cases {
        if !ids.insert(case.id.as_str()) {
            return Err(violation(format!("duplicate case id {}", case.id)));
        }
        for n in case.class_names() {
            if n == SUITE_MAIN {
                return Err(violation(format!("{} declares {SUITE_MAIN}", case.id)));
            }
            if let Some(other) = names.insert(n.clone(), case.id.clone()) {
                return Err(violation(format!("class {n} declared by both {other} and {}", case.id)));
            }
        }
        check_case(case)?;
    }

    let entries: Vec<String> = test_cases.iter().map(|c| c.entry.clone()).collect();
    let main = suite_main(feature, &entries)?;
    let mut jar = JarArchive::new();
    jar.manifest = Manifest::with_main_class(main.binary_name());
    jar.insert_class(main.binary_name(), emit_class(&main)?);
    for case in &test_cases {
        for c in &case.classes {
            jar.insert_class(c.binary_name(), emit_class(c)?);
        }
    }

    let mut truths: Vec<GroundTruth> = test_cases.iter().map(|c| c.truth.clone()).collect();
    truths.push(driver_truth(feature));
    let merged_truth = merge(&truths)?;
    let inv = extract_inventory(&jar, ParsePolicy::Strict)?;
    let report = validate_against_fixture(&merged_truth, &inv);
    if !report.is_clean() {
        return Err(violation(format!("{feature} suite truth incomplete: {}", report.findings[0])));
    }

    Ok(FeatureSuite {
        feature,
        test_cases,
        jar,
        merged_truth,
        entry_class: ConstructRef::class(feature.package(), SUITE_MAIN),
    })
}

/// Completeness gate plus the no-collision check on translated names.
fn check_case(case: &TestCase) -> Result<(), GenerationError> {
    let inv = case.inventory()?;
    let declared: usize = case.classes.iter().map(|c| 1 + c.methods.len() + c.fields.len()).sum();
    if inv.len() != declared {
        return Err(violation(format!("{}: two members share a source-level name", case.id)));
    }
    let report = validate_against_fixture(&case.truth, &inv);
    if !report.is_clean() {
        let list: Vec<String> = report.findings.iter().map(ToString::to_string).collect();
        return Err(violation(format!("{} truth incomplete: {}", case.id, list.join("; "))));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct Corpus {
    pub suites: Vec<FeatureSuite>,
    /// Main class calling every suite main.
    pub wrapper: JarArchive,
}

impl Corpus {
    pub fn test_case_count(&self) -> usize {
        self.suites.iter().map(|s| s.test_cases.len()).sum()
    }

    pub fn suite(&self, feature: Feature) -> Option<&FeatureSuite> {
        self.suites.iter().find(|s| s.feature == feature)
    }
}

pub fn generate_all() -> Result<Corpus, GenerationError> {
    let suites: Vec<FeatureSuite> = Feature::ALL.par_iter().map(|f| generate_suite(*f)).collect::<Result<_, _>>()?;
    Ok(Corpus { wrapper: wrapper_jar(&suites)?, suites })
}

fn wrapper_jar(suites: &[FeatureSuite]) -> Result<JarArchive, GenerationError> {
    let mut b = ClassBuilder::new(WRAPPER_MAIN, "java/lang/Object");
    b.default_constructor();
    let m = b.method(access::PUBLIC | access::STATIC, "main", dsl::MAIN_DESC, |c| {
        for s in suites {
            c.aload(0).invokestatic(&s.entry_binary_name(), "main", dsl::MAIN_DESC);
        }
        c.op(op::RETURN);
    });
    b.throws(m, &["java/lang/Exception"]);
    let mut jar = JarArchive::new();
    jar.manifest = Manifest::with_main_class(WRAPPER_MAIN);
    let class_path: Vec<String> = suites.iter().map(|s| format!("{}/bloated.jar", s.feature.slug())).collect();
    jar.manifest.set("Class-Path", &class_path.join(" "));
    jar.insert_class(WRAPPER_MAIN, b.to_bytes()?);
    Ok(jar)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), GenerationError> {
    let io = |source| GenerationError::Io { path: path.display().to_string(), source };
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    std::fs::write(path, bytes).map_err(io)
}

/// Writes `<out>/<feature>/{bloated.jar, truth/<case>.json, suite-truth.json}`.
pub fn write_suite(out: &Path, suite: &FeatureSuite) -> Result<(), GenerationError> {
    let dir = out.join(suite.feature.slug());
    write_file(&dir.join("bloated.jar"), &write_jar(&suite.jar)?)?;
    for case in &suite.test_cases {
        write_file(&dir.join("truth").join(format!("{}.json", case.id)), emit_ground_truth(&case.truth).as_bytes())?;
    }
    write_file(&dir.join("suite-truth.json"), emit_ground_truth(&suite.merged_truth).as_bytes())
}

pub fn suite_index_entry(suite: &FeatureSuite) -> serde_json::Value {
    let cases: Vec<_> = suite
        .test_cases
        .iter()
        .map(|c| {
            json!({
                "id": c.id,
                "technique": c.technique,
                "entry_class": c.entry.replace('/', "."),
                "classes": c.class_names(),
                "truth": format!("{}/truth/{}.json", suite.feature.slug(), c.id),
            })
        })
        .collect();
    json!({
        "feature": suite.feature.slug(),
        "name": suite.feature.name(),
        "jar": format!("{}/bloated.jar", suite.feature.slug()),
        "suite_truth": format!("{}/suite-truth.json", suite.feature.slug()),
        "entry_class": suite.entry_binary_name().replace('/', "."),
        "test_cases": suite.test_cases.len(),
        "cases": cases,
    })
}

/// Writes every suite, `wrapper.jar` and `index.json`.
pub fn write_corpus(out: &Path, corpus: &Corpus) -> Result<(), GenerationError> {
    for s in &corpus.suites {
        write_suite(out, s)?;
    }
    write_file(&out.join("wrapper.jar"), &write_jar(&corpus.wrapper)?)?;
    let index = json!({
        "suites": corpus.suites.iter().map(suite_index_entry).collect::<Vec<_>>(),
        "total_test_cases": corpus.test_case_count(),
        "wrapper": {"jar": "wrapper.jar", "entry_class": WRAPPER_MAIN.replace('/', ".")},
    });
    let mut text = serde_json::to_string_pretty(&index).expect("index serializes");
    text.push('\n');
    write_file(&out.join("index.json"), text.as_bytes())
}

/// Byte offset of every pool entry's tag in an emitted class file.
fn pool_offsets(unit: &ClassUnit) -> Vec<(u16, usize)> {
    let mut at = 10;
    let mut out = Vec::new();
    for (i, c) in unit.constant_pool.iter() {
        out.push((i, at));
        at += 1 + match c {
            Constant::Utf8(s) => 2 + cesu8::to_java_cesu8(s).len(),
            Constant::Integer(_) | Constant::Float(_) => 4,
            Constant::Long(_) | Constant::Double(_) => 8,
            Constant::MethodHandle { .. } => 3,
            Constant::Class { .. }
            | Constant::String { .. }
            | Constant::MethodType { .. }
            | Constant::Module { .. }
            | Constant::Package { .. } => 2,
            _ => 4,
        };
    }
    out
}

/// Copy of `jar` in which the first Methodref of class `binary_name` points
/// past the end of the constant pool, as a debloater that drops a pool
/// entry without rewriting its users would leave it. `None` if the class is
/// missing or has no Methodref.
pub fn dangling_reference_fixture(jar: &JarArchive, binary_name: &str) -> Option<JarArchive> {
    let bytes = jar.class_bytes(binary_name)?;
    let unit = crate::classmodel::parse_class(bytes).ok()?;
    let (_, at) = pool_offsets(&unit)
        .into_iter()
        .find(|(i, _)| matches!(unit.constant_pool.get(*i), Some(Constant::Methodref { .. })))?;
    let mut broken = bytes.to_vec();
    let past_end = (unit.constant_pool.count() as u16 + 7).to_be_bytes();
    broken[at + 1..at + 3].copy_from_slice(&past_end);
    let mut out = jar.clone();
    out.insert_class(binary_name, broken);
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_case_passes_its_own_gate() {
        for f in Feature::ALL {
            for k in suites::cases(f) {
                let case = k.build().unwrap();
                check_case(&case).unwrap_or_else(|e| panic!("{f}/{}: {e}", case.id));
            }
        }
    }

    #[test]
    fn corpus_has_table_one_shape() {
        let corpus = generate_all().unwrap();
        assert_eq!(corpus.suites.len(), 13);
        assert_eq!(corpus.test_case_count(), 59);
        for s in &corpus.suites {
            assert_eq!(s.test_cases.len(), s.feature.expected_cases(), "{}", s.feature);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        for f in [Feature::Abstract, Feature::Lambda, Feature::Reflection] {
            let a = write_jar(&generate_suite(f).unwrap().jar).unwrap();
            let b = write_jar(&generate_suite(f).unwrap().jar).unwrap();
            assert_eq!(a, b, "{f}");
        }
    }

    #[test]
    fn dynamic_suites_exclude_driver_mains() {
        let s = generate_suite(Feature::Reflection).unwrap();
        assert!(s.merged_truth.method.excluded.iter().any(|r| *r == driver_truth(Feature::Reflection).method.excluded[0]));
        assert_eq!(s.reflective_targets().len(), 11);
        let s = generate_suite(Feature::Lambda).unwrap();
        assert!(s.merged_truth.method.excluded.is_empty());
    }

    #[test]
    fn dangling_fixture_fails_to_parse() {
        let s = generate_suite(Feature::Abstract).unwrap();
        let bad = dangling_reference_fixture(&s.jar, "Abstract/Main").unwrap();
        let err = crate::classmodel::parse_class(bad.class_bytes("Abstract/Main").unwrap()).unwrap_err();
        assert!(matches!(err, ClassError::DanglingPoolIndex { .. }), "{err}");
    }

    #[test]
    fn feature_names_parse() {
        for f in Feature::ALL {
            assert_eq!(Feature::parse(f.slug()), Some(f));
            assert_eq!(Feature::parse(f.name()), Some(f));
            assert_eq!(Feature::parse(f.package()), Some(f));
        }
        assert_eq!(Feature::parse("nope"), None);
    }
}
