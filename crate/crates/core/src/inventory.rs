//! Construct inventory of a JAR: every class, method and field it declares.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::classmodel::descriptor::{package_of, simple_name};
use crate::classmodel::{class_ref_of, field_ref_of, method_ref_of, parse_class, ClassError, ConstructRef, Level};
use crate::jario::JarArchive;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ParsePolicy {
    #[default]
    Strict,
    Lenient,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InventoryError {
    #[error("corrupted class entry {entry}: {source}")]
    CorruptedClassEntry { entry: String, source: ClassError },
}

/// A class entry that failed to parse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub entry: String,
    /// The class the entry path names, if it looks like a class path.
    pub class: Option<ConstructRef>,
    pub error: ClassError,
}

impl Diagnostic {
    pub fn message(&self) -> String {
        format!("{}: {}", self.entry, self.error)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Inventory {
    pub classes: BTreeSet<ConstructRef>,
    pub methods: BTreeSet<ConstructRef>,
    pub fields: BTreeSet<ConstructRef>,
    pub diagnostics: Vec<Diagnostic>,
}

impl Inventory {
    pub fn level(&self, level: Level) -> &BTreeSet<ConstructRef> {
        match level {
            Level::Class => &self.classes,
            Level::Method => &self.methods,
            Level::Field => &self.fields,
        }
    }

    pub fn insert(&mut self, r: ConstructRef) {
        match r.level() {
            Level::Class => self.classes.insert(r),
            Level::Method => self.methods.insert(r),
            Level::Field => self.fields.insert(r),
        };
    }

    pub fn len(&self) -> usize {
        self.classes.len() + self.methods.len() + self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &ConstructRef> {
        self.classes.iter().chain(&self.methods).chain(&self.fields)
    }

    /// Drops `<init>` and `<clinit>`.
    pub fn without_initializers(&self) -> Inventory {
        let mut inv = self.clone();
        inv.methods.retain(|m| !m.is_initializer());
        inv
    }

    /// Simple names of classes whose entries failed to parse.
    pub fn corrupted_classes(&self) -> BTreeSet<String> {
        self.diagnostics
            .iter()
            .filter_map(|d| d.class.as_ref().map(|c| c.class_name().to_owned()))
            .collect()
    }
}

/// Class ref implied by an entry path such as `Abstract/Main$1.class`.
pub fn class_ref_of_path(path: &str) -> Option<ConstructRef> {
    let bin = path.strip_suffix(".class")?;
    Some(ConstructRef::class(&package_of(bin), simple_name(bin)))
}

fn refs_of(bytes: &[u8]) -> Result<Vec<ConstructRef>, ClassError> {
    let unit = parse_class(bytes)?;
    let mut out = vec![class_ref_of(&unit)];
    for m in &unit.methods {
        out.push(method_ref_of(&unit, m)?);
    }
    for f in &unit.fields {
        out.push(field_ref_of(&unit, f)?);
    }
    Ok(out)
}

pub fn extract_inventory(jar: &JarArchive, policy: ParsePolicy) -> Result<Inventory, InventoryError> {
    let parsed: Vec<(&str, Result<Vec<ConstructRef>, ClassError>)> =
        jar.class_entries().collect::<Vec<_>>().into_par_iter().map(|(p, b)| (p, refs_of(b))).collect();
    let mut inv = Inventory::default();
    for (entry, result) in parsed {
        match result {
            Ok(refs) => refs.into_iter().for_each(|r| inv.insert(r)),
            Err(error) if policy == ParsePolicy::Lenient => inv.diagnostics.push(Diagnostic {
                entry: entry.to_owned(),
                class: class_ref_of_path(entry),
                error,
            }),
            Err(source) => return Err(InventoryError::CorruptedClassEntry { entry: entry.to_owned(), source }),
        }
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classmodel::{access, ClassBuilder};

    fn jar_of(classes: &[(&str, Vec<u8>)]) -> JarArchive {
        let mut j = JarArchive::new();
        for (n, b) in classes {
            j.insert_class(n, b.clone());
        }
        j
    }

    fn point() -> Vec<u8> {
        let mut b = ClassBuilder::new("geo/Point", "java/lang/Object");
        b.field(access::PRIVATE, "x", "I");
        b.default_constructor();
        b.method(access::PUBLIC, "scale", "(IJ)I", |c| {
            c.iload(1).op(crate::classmodel::code::op::IRETURN);
        });
        b.to_bytes().unwrap()
    }

    #[test]
    fn empty_jar_gives_empty_inventory() {
        let inv = extract_inventory(&JarArchive::new(), ParsePolicy::Strict).unwrap();
        assert!(inv.is_empty());
        assert!(inv.diagnostics.is_empty());
    }

    #[test]
    fn members_are_listed_with_source_names() {
        let inv = extract_inventory(&jar_of(&[("geo/Point", point())]), ParsePolicy::Strict).unwrap();
        assert!(inv.classes.contains(&ConstructRef::class("geo", "Point")));
        assert!(inv.methods.contains(&ConstructRef::method("Point", "scale", "int", "int,long")));
        assert!(inv.methods.contains(&ConstructRef::method("Point", "<init>", "void", "")));
        assert!(inv.fields.contains(&ConstructRef::field("Point", "x")));
        assert_eq!(inv.without_initializers().methods.len(), 1);
    }

    #[test]
    fn truncated_entry_strict_vs_lenient() {
        let good = point();
        let bad = good[..good.len() - 3].to_vec();
        let jar = jar_of(&[("geo/Point", good), ("geo/Broken", bad)]);
        let err = extract_inventory(&jar, ParsePolicy::Strict).unwrap_err();
        assert!(matches!(err, InventoryError::CorruptedClassEntry { ref entry, .. } if entry == "geo/Broken.class"));
        let inv = extract_inventory(&jar, ParsePolicy::Lenient).unwrap();
        assert_eq!(inv.classes.len(), 1);
        assert_eq!(inv.diagnostics.len(), 1);
        assert_eq!(inv.diagnostics[0].class, Some(ConstructRef::class("geo", "Broken")));
    }

    #[test]
    fn non_class_entries_are_ignored() {
        let mut j = jar_of(&[("geo/Point", point())]);
        j.insert("geo/data.txt", b"not a class".to_vec());
        let inv = extract_inventory(&j, ParsePolicy::Strict).unwrap();
        assert_eq!(inv.classes.len(), 1);
    }
}
