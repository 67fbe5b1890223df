// Properties of classify/soundness/precision, shared by the metric
// property tests and the acceptance runner.

use std::collections::BTreeSet;

use debloat_bench::classmodel::{ConstructRef, Level};
use debloat_bench::groundtruth::GroundTruth;
use debloat_bench::inventory::Inventory;
use debloat_bench::metrics::{classify, precision, soundness, Counts, Ratio};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

/// Where each universe member sits in the truth, and whether it survives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Required,
    Bloated,
    Excluded,
    Unlisted,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub level: Level,
    pub members: Vec<(ConstructRef, Role, bool)>,
}

fn member(level: Level, i: usize) -> ConstructRef {
    let class = format!("C{}", i % 3);
    match level {
        Level::Class => ConstructRef::class("p", &format!("K{i}")),
        Level::Method if i % 7 == 6 => ConstructRef::method(&class, "<init>", "void", &"int,".repeat(i % 4 + 1)[..(i % 4 + 1) * 4 - 1]),
        Level::Method => ConstructRef::method(&class, &format!("m{i}"), "void", ""),
        Level::Field => ConstructRef::field(&class, &format!("f{i}")),
    }
}

pub fn scenario() -> impl Strategy<Value = Scenario> {
    let role = prop_oneof![Just(Role::Required), Just(Role::Bloated), Just(Role::Excluded), Just(Role::Unlisted)];
    (
        prop_oneof![Just(Level::Class), Just(Level::Method), Just(Level::Field)],
        proptest::collection::vec((role, any::<bool>()), 0..24),
    )
        .prop_map(|(level, picks)| Scenario {
            level,
            members: picks.into_iter().enumerate().map(|(i, (r, k))| (member(level, i), r, k)).collect(),
        })
}

impl Scenario {
    pub fn truth(&self) -> GroundTruth {
        let mut gt = GroundTruth::default();
        let lt = gt.level_mut(self.level);
        for (r, role, _) in &self.members {
            match role {
                Role::Required => lt.required.push(r.clone()),
                Role::Bloated => lt.bloated.push(r.clone()),
                Role::Excluded => lt.excluded.push(r.clone()),
                Role::Unlisted => {}
            }
        }
        gt
    }

    pub fn kept_where(&self, keep: impl Fn(&ConstructRef, Role, bool) -> bool) -> Inventory {
        let mut inv = Inventory::default();
        for (r, role, k) in &self.members {
            if keep(r, *role, *k) {
                inv.insert(r.clone());
            }
        }
        inv
    }

    pub fn kept(&self) -> Inventory {
        self.kept_where(|_, _, k| k)
    }

    fn count(&self, role: Role) -> u64 {
        self.members.iter().filter(|(r, x, _)| *x == role && !r.is_initializer()).count() as u64
    }
}

/// Pairwise comparison over plain vectors, no sets.
pub fn naive(gt: &GroundTruth, inv: &Inventory, level: Level) -> Counts {
    let lt = gt.level(level);
    let kept: Vec<&ConstructRef> = inv.level(level).iter().filter(|r| !r.is_initializer()).collect();
    let mut c = Counts::default();
    for r in lt.required.iter().filter(|r| !r.is_initializer()) {
        let mut hit = false;
        for k in &kept {
            if *k == r {
                hit = true;
            }
        }
        if hit {
            c.tp += 1
        } else {
            c.fn_ += 1
        }
    }
    for b in lt.bloated.iter().filter(|r| !r.is_initializer()) {
        let mut hit = false;
        for k in &kept {
            if *k == b {
                hit = true;
            }
        }
        if hit {
            c.fp += 1
        } else {
            c.bloated_removed += 1
        }
    }
    for k in &kept {
        let mut listed = false;
        for r in lt.required.iter().chain(&lt.bloated).chain(&lt.excluded) {
            if r == *k {
                listed = true;
            }
        }
        if !listed {
            c.unknown_retained += 1;
        }
    }
    c
}

fn ratio_le(a: Option<Ratio>, b: Option<Ratio>) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => a <= b,
        (None, None) => true,
        _ => false,
    }
}

pub fn classify_matches_naive(s: &Scenario) -> Result<(), TestCaseError> {
    let gt = s.truth();
    let inv = s.kept();
    prop_assert_eq!(classify(&gt, &inv, s.level).unwrap(), naive(&gt, &inv, s.level));
    Ok(())
}

pub fn bounds_and_not_applicable(s: &Scenario) -> Result<(), TestCaseError> {
    let c = classify(&s.truth(), &s.kept(), s.level).unwrap();
    prop_assert_eq!(c.tp + c.fn_, s.count(Role::Required));
    prop_assert_eq!(c.fp + c.bloated_removed, s.count(Role::Bloated));
    for score in [soundness(&c), precision(&c)].into_iter().flatten() {
        prop_assert!(score.num <= score.den && score.percent() <= 100);
    }
    prop_assert_eq!(soundness(&c).is_none(), c.tp + c.fn_ == 0);
    prop_assert_eq!(precision(&c).is_none(), c.tp + c.fp == 0 && c.fn_ == 0);
    if c.tp + c.fp == 0 && c.fn_ > 0 {
        prop_assert_eq!(precision(&c).map(Ratio::percent), Some(0));
    }
    Ok(())
}

pub fn baselines(s: &Scenario) -> Result<(), TestCaseError> {
    let gt = s.truth();
    let (req, blo) = (s.count(Role::Required), s.count(Role::Bloated));

    let identity = classify(&gt, &s.kept_where(|_, _, _| true), s.level).unwrap();
    prop_assert_eq!(identity.fn_, 0);
    prop_assert_eq!(identity.bloated_removed, 0);
    if req > 0 {
        prop_assert_eq!(soundness(&identity).map(Ratio::percent), Some(100));
        prop_assert_eq!(precision(&identity), Some(Ratio::new(req, req + blo)));
    }

    let oracle = classify(&gt, &s.kept_where(|_, r, _| r == Role::Required), s.level).unwrap();
    prop_assert_eq!((oracle.fn_, oracle.fp), (0, 0));
    if req > 0 {
        prop_assert_eq!(precision(&oracle).map(Ratio::percent), Some(100));
    }

    let nothing = classify(&gt, &Inventory::default(), s.level).unwrap();
    prop_assert_eq!((nothing.tp, nothing.fp, nothing.unknown_retained), (0, 0, 0));
    if req > 0 {
        prop_assert_eq!(soundness(&nothing).map(Ratio::percent), Some(0));
        prop_assert_eq!(precision(&nothing).map(Ratio::percent), Some(0));
    } else {
        prop_assert_eq!(precision(&nothing), None);
    }
    Ok(())
}

/// Keeping one more required construct never lowers S or P; keeping one
/// more bloated construct leaves S alone and never raises P.
pub fn monotonicity(s: &Scenario) -> Result<(), TestCaseError> {
    let gt = s.truth();
    let base_inv = s.kept();
    let base = classify(&gt, &base_inv, s.level).unwrap();
    let dropped: BTreeSet<&ConstructRef> =
        s.members.iter().filter(|(r, _, k)| !k && !r.is_initializer()).map(|(r, _, _)| r).collect();
    for (r, role, _) in s.members.iter().filter(|(r, _, _)| dropped.contains(r)) {
        let mut inv = base_inv.clone();
        inv.insert(r.clone());
        let more = classify(&gt, &inv, s.level).unwrap();
        match role {
            Role::Required => {
                prop_assert!(ratio_le(soundness(&base), soundness(&more)));
                prop_assert!(precision(&base).is_none() || ratio_le(precision(&base), precision(&more)));
            }
            Role::Bloated => {
                prop_assert_eq!(soundness(&base), soundness(&more));
                let (b, m) = (precision(&base), precision(&more));
                prop_assert!(b.is_none() || ratio_le(m, b));
            }
            Role::Excluded | Role::Unlisted => {
                prop_assert_eq!((soundness(&base), precision(&base)), (soundness(&more), precision(&more)));
            }
        }
    }
    Ok(())
}

#[allow(dead_code)]
pub const LAWS: [(&str, fn(&Scenario) -> Result<(), TestCaseError>); 4] = [
    ("classify equals the naive oracle", classify_matches_naive),
    ("bounds and N/A conventions", bounds_and_not_applicable),
    ("identity, oracle and remove-everything baselines", baselines),
    ("monotonicity", monotonicity),
];
