use std::collections::BTreeSet;

use debloat_bench::classmodel::{access, emit_class, parse_class, ClassBuilder, Constant, ConstructRef, Level};
use debloat_bench::groundtruth::{emit_ground_truth, parse_ground_truth, GroundTruth};
use debloat_bench::jario::{read_jar, write_jar_with, JarArchive, Manifest};
use proptest::prelude::*;

const DESCS: [&str; 6] = ["I", "J", "D", "Ljava/lang/String;", "[Ljava/lang/Object;", "Z"];

#[derive(Debug, Clone)]
enum Member {
    Field(u8, usize),
    Constant(u8, i64),
    Method(u8, String),
    Abstract(u8),
}

fn member() -> impl Strategy<Value = Member> {
    prop_oneof![
        (any::<u8>(), 0..DESCS.len()).prop_map(|(n, d)| Member::Field(n, d)),
        (any::<u8>(), any::<i64>()).prop_map(|(n, v)| Member::Constant(n, v)),
        (any::<u8>(), "\\PC{0,12}|\u{0}|\u{1F600}").prop_map(|(n, s)| Member::Method(n, s)),
        any::<u8>().prop_map(Member::Abstract),
    ]
}

fn build(name: &str, members: &[Member]) -> Vec<u8> {
    let mut b = ClassBuilder::new(&format!("p/{name}"), "java/lang/Object");
    b.access(access::PUBLIC | access::SUPER | access::ABSTRACT);
    b.default_constructor();
    let mut used = BTreeSet::new();
    for m in members {
        match m {
            Member::Field(n, d) if used.insert(format!("f{n}")) => {
                b.field(access::PRIVATE, &format!("f{n}"), DESCS[*d]);
            }
            Member::Constant(n, v) if used.insert(format!("f{n}")) => {
                b.constant_field(access::PUBLIC, &format!("f{n}"), "J", Constant::Long(*v));
            }
            Member::Method(n, s) if used.insert(format!("m{n}")) => {
                b.method(access::PUBLIC | access::STATIC, &format!("m{n}"), "()Ljava/lang/String;", |c| {
                    c.ldc_string(s).op(debloat_bench::classmodel::code::op::ARETURN);
                });
            }
            Member::Abstract(n) if used.insert(format!("m{n}")) => {
                b.abstract_method(access::PUBLIC, &format!("m{n}"), "(IJ)V");
            }
            _ => {}
        }
    }
    b.to_bytes().unwrap()
}

fn refs() -> impl Strategy<Value = Vec<(ConstructRef, u8)>> {
    let r = prop_oneof![
        "[A-Z][a-z]{0,4}".prop_map(|n| ConstructRef::class("pkg", &n)),
        ("[A-Z][a-z]{0,3}", "[a-z]{1,4}", prop_oneof![Just(""), Just("int"), Just("String[],long")])
            .prop_map(|(c, n, p)| ConstructRef::method(&c, &n, "void", p)),
        ("[A-Z][a-z]{0,3}", "[a-z]{1,4}").prop_map(|(c, n)| ConstructRef::field(&c, &n)),
    ];
    proptest::collection::vec((r, 0u8..3), 0..30)
}

fn truth(entries: Vec<(ConstructRef, u8)>, absent: BTreeSet<Level>) -> GroundTruth {
    let mut gt = GroundTruth::default();
    let mut seen = BTreeSet::new();
    for (r, section) in entries {
        let level = r.level();
        if absent.contains(&level) || !seen.insert(r.clone()) {
            continue;
        }
        let lt = gt.level_mut(level);
        match section {
            0 => lt.required.push(r),
            1 => lt.bloated.push(r),
            _ => lt.excluded.push(r),
        }
    }
    for level in absent {
        gt.level_mut(level).absent = true;
    }
    gt
}

proptest! {
    #[test]
    fn built_classes_are_parse_emit_fixpoints(members in proptest::collection::vec(member(), 0..16)) {
        let bytes = build("Gen", &members);
        let unit = parse_class(&bytes).unwrap();
        prop_assert_eq!(emit_class(&unit).unwrap(), bytes);
        prop_assert_eq!(parse_class(&emit_class(&unit).unwrap()).unwrap(), unit);
    }

    #[test]
    fn jars_round_trip(
        entries in proptest::collection::btree_map("[a-z]{1,6}(/[a-z]{1,6}){0,2}\\.(class|txt)", proptest::collection::vec(any::<u8>(), 0..64), 0..8),
        main in proptest::option::of("[a-z]{1,5}/[A-Z][a-z]{0,5}"),
        deflate in any::<bool>(),
    ) {
        let jar = JarArchive {
            entries,
            manifest: main.as_deref().map_or_else(Manifest::new, Manifest::with_main_class),
        };
        let bytes = write_jar_with(&jar, deflate).unwrap();
        prop_assert_eq!(&write_jar_with(&jar, deflate).unwrap(), &bytes);
        let back = read_jar(&bytes).unwrap();
        prop_assert_eq!(&back, &jar);
        prop_assert_eq!(write_jar_with(&back, deflate).unwrap(), bytes);
    }

    #[test]
    fn truth_documents_round_trip(entries in refs(), absent in proptest::collection::btree_set(prop_oneof![Just(Level::Method), Just(Level::Field)], 0..2)) {
        let gt = truth(entries, absent);
        gt.check().unwrap();
        let text = emit_ground_truth(&gt);
        let back = parse_ground_truth(&text).unwrap();
        prop_assert_eq!(&back, &gt);
        prop_assert_eq!(emit_ground_truth(&back), text);
    }
}
