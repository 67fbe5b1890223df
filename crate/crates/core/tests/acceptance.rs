//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

#[path = "support/metric_laws.rs"]
mod metric_laws;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use debloat_bench::benchgen::{dangling_reference_fixture, generate_all, generate_suite, Feature};
use debloat_bench::classmodel::{emit_class, parse_class, ConstructRef, Level};
use debloat_bench::cli::{run, PipelineError, RunConfig, RunOutcome, Tool};
use debloat_bench::groundtruth::{emit_ground_truth, parse_ground_truth, validate_against_fixture, GroundTruth};
use debloat_bench::inventory::{extract_inventory, Inventory, InventoryError, ParsePolicy};
use debloat_bench::jario::{read_jar, write_jar};
use debloat_bench::metrics::{classify, precision, soundness, Counts, Ratio, Score};
use debloat_bench::shrinker::{apply_debloat, ReachabilitySet, ShrinkPolicy};
use proptest::test_runner::{Config, TestRunner};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

// feature | level | Deptrim | JShrink | ProGuard, each "R S B P".
const TABLE: &str = "
abstract|Class|15/15 100 5/5 100|3/15 20 5/5 100|15/15 100 5/5 100
abstract|Method|5/5 100 7/20 48|1/5 20 19/20 50|5/5 100 19/20 83
abstract|Field|2/2 100 2/3 80|1/2 50 2/3 50|2/2 100 2/3 67
annotation|Class|24/24 100 0/4 86|4/24 17 4/4 100|24/24 100 4/4 100
annotation|Method|5/5 100 0/2 71|1/5 20 2/2 100|2/5 40 2/2 100
annotation|Field|3/3 100 0/3 50|1/3 33 2/3 50|3/3 100 0/3 50
deserialization|Class|4/4 100 - 100|4/4 100 - 100|4/4 100 - 100
deserialization|Method|3/3 100 0/2 60|3/3 100 0/2 60|1/3 33 2/2 100
deserialization|Field|4/4 100 0/1 80|4/4 100 0/1 80|4/4 100 0/1 80
dynamic class loading|Class|4/6 67 4/4 100|4/6 67 4/4 100|4/6 67 4/4 100
dynamic class loading|Method|2/4 50 4/4 100|2/4 50 4/4 100|2/4 50 4/4 100
dynamic class loading|Field|0/2 0 6/6 0|0/2 0 6/6 0|0/2 0 6/6 0
exception|Class|9/9 100 3/3 100|9/9 100 3/3 100|9/9 100 3/3 100
exception|Method|1/1 100 0/1 50|1/1 100 1/1 100|1/1 100 1/1 100
exception|Field|1/1 100 0/1 50|1/1 100 1/1 100|1/1 100 1/1 100
externalization|Class|4/4 100 2/2 100|4/4 100 2/2 100|4/4 100 2/2 100
externalization|Method|2/2 100 4/6 50|2/2 100 4/6 50|2/2 100 4/6 50
externalization|Field|4/4 100 4/6 67|4/4 100 6/6 100|4/4 100 6/6 100
generics|Class|20/20 100 3/4 95|20/20 100 4/4 100|18/20 90 4/4 100
generics|Method|10/10 100 1/9 56|10/10 100 7/9 83|10/10 100 7/9 83
generics|Field|4/4 100 0/7 36|4/4 100 7/7 100|4/4 100 7/7 100
interface|Class|14/14 100 1/1 100|13/14 93 1/1 100|11/14 79 1/1 100
interface|Method|5/5 100 1/7 45|5/5 100 6/7 83|5/5 100 6/7 83
interface|Field|1/1 100 0/1 50|0/1 0 1/1 0|0/1 0 1/1 0
lambda|Class|10/10 100 1/1 100|10/10 100 1/1 100|10/10 100 1/1 100
lambda|Method|4/4 100 1/2 80|4/4 100 2/2 100|4/4 100 2/2 100
lambda|Field|2/2 100 0/2 50|2/2 100 0/2 50|2/2 100 0/2 50
overloading|Class|14/14 100 - 100|14/14 100 - 100|14/14 100 - 100
overloading|Method|8/8 100 0/7 53|8/8 100 7/7 100|7/8 88 7/7 100
overloading|Field|- - - -|- - - -|- - - -
overriding|Class|11/11 100 1/1 100|11/11 100 1/1 100|11/11 100 1/1 100
overriding|Method|4/4 100 1/4 57|4/4 100 2/4 67|4/4 100 2/4 67
overriding|Field|- - - -|- - - -|- - - -
reflection|Class|13/13 100 - 100|13/13 100 - 100|13/13 100 - 100
reflection|Method|5/5 100 0/4 56|0/5 0 4/4 0|0/5 0 4/4 0
reflection|Field|6/6 100 0/6 50|3/6 50 3/6 50|3/6 50 3/6 50
serialization|Class|13/13 100 1/2 93|13/13 100 1/2 93|13/13 100 2/2 100
serialization|Method|- - - -|- - - -|- - - -
serialization|Field|14/14 100 2/4 88|14/14 100 2/4 88|14/14 100 4/4 100
";

const TOOLS: [&str; 3] = ["Deptrim", "JShrink", "ProGuard"];

fn fraction(s: &str) -> (u64, u64) {
    if s == "-" {
        return (0, 0);
    }
    let (a, b) = s.split_once('/').unwrap();
    (a.parse().unwrap(), b.parse().unwrap())
}

fn printed(s: &str) -> Option<u64> {
    (s != "-").then(|| s.parse().unwrap())
}

fn pct(s: Score) -> Option<u64> {
    s.map(Ratio::percent)
}

fn close(computed: Option<u64>, printed: Option<u64>) -> bool {
    match (computed, printed) {
        (Some(c), Some(p)) => c.abs_diff(p) <= 1,
        (None, None) => true,
        _ => false,
    }
}

fn table_arithmetic() -> Outcome {
    let mut cells = 0;
    let mut mismatches = Vec::new();
    let mut known = None;
    for line in TABLE.lines().filter(|l| !l.is_empty()) {
        let parts: Vec<&str> = line.split('|').collect();
        let (feature, level) = (parts[0], parts[1]);
        for (tool, cell) in TOOLS.iter().zip(&parts[2..]) {
            let f: Vec<&str> = cell.split(' ').collect();
            let ((tp, req), (removed, bloated)) = (fraction(f[0]), fraction(f[2]));
            let c = Counts { tp, fn_: req - tp, fp: bloated - removed, bloated_removed: removed, unknown_retained: 0 };
            let (s, p) = (pct(soundness(&c)), pct(precision(&c)));
            cells += 1;
            if (feature, level, *tool) == ("abstract", "Method", "Deptrim") {
                known = Some((p, printed(f[3])));
                ensure!(close(s, printed(f[1])), "abstract/Method/Deptrim S {s:?}");
                continue;
            }
            if !close(s, printed(f[1])) {
                mismatches.push(format!("{feature}/{level}/{tool} S={s:?} printed {}", f[1]));
            }
            if !close(p, printed(f[3])) {
                mismatches.push(format!(
                    "{feature}/{level}/{tool} P={p:?} printed {} (printed value equals (R+B) over all ground-truth constructs: {}%)",
                    f[3],
                    Ratio::new(tp + removed, req + bloated).percent()
                ));
            }
        }
    }
    ensure!(cells == 117, "{cells} cells encoded");
    ensure!(known == Some((Some(28), Some(48))), "abstract/Method/Deptrim gave {known:?}, expected 28 vs printed 48");
    ensure!(mismatches.is_empty(), "{} of {cells} cells off by more than 1: {}", mismatches.len(), mismatches.join("; "));
    Ok(format!("{cells} cells within 1 point, abstract/Method/Deptrim = 28 vs printed 48"))
}

fn only_required(inv: &Inventory, gt: &GroundTruth) -> Inventory {
    let mut out = Inventory::default();
    for level in Level::ALL {
        for r in &gt.level(level).required {
            if inv.level(level).contains(r) {
                out.insert(r.clone());
            }
        }
    }
    out
}

fn scores(gt: &GroundTruth, inv: &Inventory) -> Result<Vec<(Option<u64>, Option<u64>)>, String> {
    Level::ALL
        .into_iter()
        .map(|l| classify(gt, inv, l).map(|c| (pct(soundness(&c)), pct(precision(&c)))).map_err(|e| e.to_string()))
        .collect()
}

fn anonymous_class_listing() -> Outcome {
    let suite = generate_suite(Feature::Abstract).map_err(|e| e.to_string())?;
    let case = suite.case("anonymous-class").ok_or("anonymous-class case missing")?;
    let jar = case.jar().map_err(|e| e.to_string())?;
    let inv = extract_inventory(&jar, ParsePolicy::Strict).map_err(|e| e.to_string())?.without_initializers();
    let gt = &case.truth;

    let sizes: Vec<(usize, usize)> = Level::ALL.into_iter().map(|l| (gt.level(l).required.len(), gt.level(l).bloated.len())).collect();
    ensure!(sizes == [(3, 0), (2, 3), (1, 1)], "truth sizes {sizes:?}");
    for level in Level::ALL {
        let universe: BTreeSet<&ConstructRef> = gt.level(level).universe();
        let found: BTreeSet<&ConstructRef> = inv.level(level).iter().collect();
        ensure!(universe == found, "{level} inventory {found:?} differs from truth {universe:?}");
    }
    let expected_classes: BTreeSet<ConstructRef> =
        ["Main", "Car", "Main$1"].iter().map(|n| ConstructRef::class("Abstract", n)).collect();
    ensure!(inv.classes == expected_classes, "classes {:?}", inv.classes);

    let identity = scores(gt, &inv)?;
    let want = |p: [u64; 3]| p.map(|p| (Some(100), Some(p))).to_vec();
    ensure!(identity == want([100, 40, 50]), "identity {identity:?}");

    let live = ReachabilitySet::from_refs(gt.class.required.iter().chain(&gt.method.required).chain(&gt.field.required).cloned());
    let debloated = apply_debloat(&jar, &live, &ShrinkPolicy::conservative()).map_err(|e| e.to_string())?;
    let oracle_inv = extract_inventory(&debloated, ParsePolicy::Strict).map_err(|e| e.to_string())?;
    let oracle = scores(gt, &oracle_inv)?;
    ensure!(oracle == want([100, 100, 100]), "oracle debloat {oracle:?}");
    ensure!(scores(gt, &only_required(&inv, gt))? == oracle, "filtered oracle disagrees with shrunk oracle");
    Ok("identity S=100 P=100/40/50, oracle S=P=100".into())
}

fn corpus_shape() -> Outcome {
    let corpus = generate_all().map_err(|e| e.to_string())?;
    ensure!(corpus.suites.len() == 13, "{} suites", corpus.suites.len());
    let table1 = [
        (Feature::Abstract, 6),
        (Feature::Annotation, 7),
        (Feature::Deserialization, 2),
        (Feature::DynamicClassLoading, 2),
        (Feature::Exception, 4),
        (Feature::Externalization, 2),
        (Feature::Generics, 7),
        (Feature::Interface, 4),
        (Feature::Lambda, 4),
        (Feature::Overloading, 6),
        (Feature::Overriding, 4),
        (Feature::Reflection, 6),
        (Feature::Serialization, 5),
    ];
    for (feature, n) in table1 {
        let suite = corpus.suite(feature).ok_or(format!("{} missing", feature.name()))?;
        ensure!(suite.test_cases.len() == n, "{} has {} cases, expected {n}", feature.name(), suite.test_cases.len());
        for case in &suite.test_cases {
            let inv = case.inventory().map_err(|e| e.to_string())?;
            let report = validate_against_fixture(&case.truth, &inv);
            ensure!(report.is_clean(), "{}/{}: {:?}", feature.name(), case.id, report.findings);
        }
    }
    ensure!(corpus.test_case_count() == 59, "{} cases", corpus.test_case_count());
    Ok("13 suites, 59 cases, every case passes the completeness gate".into())
}

fn round_trips() -> Outcome {
    let corpus = generate_all().map_err(|e| e.to_string())?;
    let (mut classes, mut jars, mut truths) = (0, 0, 0);
    let all_jars = corpus.suites.iter().map(|s| &s.jar).chain(std::iter::once(&corpus.wrapper));
    for jar in all_jars {
        for (path, bytes) in jar.class_entries() {
            let unit = parse_class(bytes).map_err(|e| format!("{path}: {e}"))?;
            let emitted = emit_class(&unit).map_err(|e| format!("{path}: {e}"))?;
            ensure!(emitted == bytes, "{path}: emit(parse(bytes)) != bytes");
            ensure!(parse_class(&emitted).as_ref() == Ok(&unit), "{path}: parse(emit(unit)) != unit");
            ensure!(emit_class(&unit).ok() == Some(emitted), "{path}: emit not deterministic");
            classes += 1;
        }
        let bytes = write_jar(jar).map_err(|e| e.to_string())?;
        ensure!(write_jar(jar).ok() == Some(bytes.clone()), "jar write not deterministic");
        let back = read_jar(&bytes).map_err(|e| e.to_string())?;
        ensure!(&back == jar, "read(write(jar)) != jar");
        ensure!(write_jar(&back).ok() == Some(bytes), "jar bytes not a fixpoint");
        jars += 1;
    }
    for suite in &corpus.suites {
        let docs = suite.test_cases.iter().map(|c| &c.truth).chain(std::iter::once(&suite.merged_truth));
        for gt in docs {
            let text = emit_ground_truth(gt);
            let back = parse_ground_truth(&text).map_err(|e| e.to_string())?;
            ensure!(&back == gt, "{}: truth JSON round-trip changed the document", suite.feature.name());
            ensure!(emit_ground_truth(&back) == text, "{}: truth JSON not a textual fixpoint", suite.feature.name());
            truths += 1;
        }
    }
    Ok(format!("{classes} class files, {jars} JARs, {truths} truth documents"))
}

fn run_in(policy: ShrinkPolicy) -> Result<RunOutcome, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = run(&RunConfig { policy, out_dir: dir.path().to_path_buf(), ..Default::default() }).map_err(|e| e.to_string())?;
    ensure!(out.exit_code() == 0, "run exited {}", out.exit_code());
    Ok(out)
}

fn shrinker_profile() -> Outcome {
    let dynamic = ["reflection", "dynamic class loading"];
    let conservative = run_in(ShrinkPolicy::conservative())?;
    for r in &conservative.rows {
        let s = pct(soundness(&r.counts()));
        if dynamic.contains(&r.feature.as_str()) && r.level == Level::Method {
            ensure!(s == Some(0), "{} method S={s:?} without seeds", r.feature);
        } else if !dynamic.contains(&r.feature.as_str()) {
            ensure!(s == Some(100), "{} {} S={s:?}", r.feature, r.level);
        }
    }

    let corpus = generate_all().map_err(|e| e.to_string())?;
    let seeds: Vec<ConstructRef> = corpus.suites.iter().flat_map(|s| s.reflective_targets()).collect();
    let seeded = run_in(ShrinkPolicy::conservative().with_seeds(seeds))?;
    for r in seeded.rows.iter().filter(|r| dynamic.contains(&r.feature.as_str())) {
        let s = pct(soundness(&r.counts()));
        ensure!(s == Some(100), "{} {} S={s:?} with seeds", r.feature, r.level);
    }

    let aggressive = run_in(ShrinkPolicy::aggressive())?;
    let mut compared = 0;
    for c in &conservative.rows {
        let a = aggressive.rows.iter().find(|a| a.feature == c.feature && a.level == c.level).ok_or("row missing")?;
        let (cs, ac) = (c.counts(), a.counts());
        if pct(soundness(&cs)) == Some(100) && pct(soundness(&ac)) == Some(100) {
            ensure!(precision(&ac) >= precision(&cs), "{} {}: aggressive P {} < conservative P {}", c.feature, c.level, a.p, c.p);
            compared += 1;
        }
    }
    Ok(format!("static pattern holds, seeds restore S=100, aggressive P >= conservative on {compared} rows"))
}

fn corruption() -> Outcome {
    let suite = generate_suite(Feature::Abstract).map_err(|e| e.to_string())?;
    let bad = dangling_reference_fixture(&suite.jar, "Abstract/Main").ok_or("no fixture")?;
    match extract_inventory(&bad, ParsePolicy::Strict) {
        Err(InventoryError::CorruptedClassEntry { entry, .. }) => ensure!(entry == "Abstract/Main.class", "entry {entry}"),
        other => return Err(format!("strict inventory gave {other:?}")),
    }
    let lenient = extract_inventory(&bad, ParsePolicy::Lenient).map_err(|e| e.to_string())?;
    ensure!(lenient.diagnostics.len() == 1, "{} diagnostics", lenient.diagnostics.len());

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let fixture = dir.path().join("corrupt.jar");
    std::fs::write(&fixture, write_jar(&bad).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let config = |lenient: bool, sub: &str| RunConfig {
        suites: vec![Feature::Abstract],
        tool: Tool::External,
        external_command: Some(format!("cp '{}' {{output}} # {{input}}", fixture.display())),
        lenient,
        out_dir: dir.path().join(sub),
        ..Default::default()
    };
    let strict = run(&config(false, "strict")).map_err(|e| e.to_string())?;
    ensure!(strict.exit_code() == 4, "strict exit {}", strict.exit_code());
    ensure!(
        matches!(&strict.failures[0].error, PipelineError::CorruptedOutput { entry, .. } if entry == "Abstract/Main.class"),
        "strict failure {:?}",
        strict.failures
    );
    let lenient = run(&config(true, "lenient")).map_err(|e| e.to_string())?;
    ensure!(lenient.exit_code() == 0, "lenient exit {}", lenient.exit_code());
    ensure!(lenient.rows.len() == 3, "lenient scored {} rows", lenient.rows.len());
    let flagged: Vec<&str> = lenient.cases.iter().filter(|c| !c.diagnostics.is_empty()).map(|c| c.case.as_str()).collect();
    ensure!(flagged == ["anonymous-class"], "diagnostics on {flagged:?}");
    Ok("STRICT exit 4 with CorruptedOutput, LENIENT scores with one diagnostic".into())
}

fn metric_properties() -> Outcome {
    let mut runner = TestRunner::new(Config { cases: 1024, failure_persistence: None, ..Config::default() });
    for (name, law) in metric_laws::LAWS {
        runner.run(&metric_laws::scenario(), |s| law(&s)).map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(format!("{} laws over 1024 random universes each", metric_laws::LAWS.len()))
}

fn main() -> ExitCode {
    let criteria: [(u8, &str, Option<Duration>, fn() -> Outcome); 7] = [
        (1, "published results table arithmetic", Some(Duration::from_secs(1)), table_arithmetic),
        (2, "anonymous-class listing end to end", Some(Duration::from_secs(1)), anonymous_class_listing),
        (3, "corpus shape and completeness gate", Some(Duration::from_secs(10)), corpus_shape),
        (4, "round-trip fixpoints", None, round_trips),
        (5, "reference shrinker soundness profile", Some(Duration::from_secs(60)), shrinker_profile),
        (6, "corruption detection", None, corruption),
        (7, "metric properties", None, metric_properties),
    ];
    let mut failed = 0;
    for (n, title, budget, check) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let result = match (result, budget) {
            (Ok(_), Some(b)) if took > b => Err(format!("took {took:.2?}, budget {b:?}")),
            (r, _) => r,
        };
        match result {
            Ok(detail) => println!("criterion {n} PASS ({took:.2?}) {title}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n} FAIL ({took:.2?}) {title}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 7 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
