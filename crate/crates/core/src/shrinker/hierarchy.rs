//! Class hierarchy over the input jars, with a small model of the platform
//! types fixtures extend or implement.

use std::collections::BTreeMap;

use crate::classmodel::{parse_class, ClassUnit, Member};
use crate::jario::JarArchive;

use super::ShrinkError;

const OBJECT: &str = "java/lang/Object";
const PLATFORM_PREFIXES: [&str; 4] = ["java/", "javax/", "jdk/", "sun/"];

/// Superclass and direct interfaces of the platform types we know about.
/// Anything else under a platform prefix is treated as a direct subclass of
/// `Object` with no interfaces.
fn platform_parents(name: &str) -> (Option<&'static str>, &'static [&'static str]) {
    match name {
        OBJECT => (None, &[]),
        "java/lang/Throwable" => (Some(OBJECT), &["java/io/Serializable"]),
        "java/lang/Exception" | "java/lang/Error" => (Some("java/lang/Throwable"), &[]),
        "java/lang/RuntimeException"
        | "java/lang/ReflectiveOperationException"
        | "java/io/IOException"
        | "java/lang/InterruptedException" => (Some("java/lang/Exception"), &[]),
        "java/lang/ClassNotFoundException"
        | "java/lang/NoSuchMethodException"
        | "java/lang/NoSuchFieldException"
        | "java/lang/IllegalAccessException"
        | "java/lang/InstantiationException" => (Some("java/lang/ReflectiveOperationException"), &[]),
        "java/lang/IllegalArgumentException"
        | "java/lang/IllegalStateException"
        | "java/lang/UnsupportedOperationException"
        | "java/lang/ArithmeticException"
        | "java/lang/NullPointerException" => (Some("java/lang/RuntimeException"), &[]),
        "java/lang/Enum" => (Some(OBJECT), &["java/lang/Comparable", "java/io/Serializable"]),
        "java/lang/Number" => (Some(OBJECT), &["java/io/Serializable"]),
        "java/lang/Integer" | "java/lang/Long" | "java/lang/Double" | "java/lang/Float" => {
            (Some("java/lang/Number"), &["java/lang/Comparable"])
        }
        "java/lang/String" => (Some(OBJECT), &["java/io/Serializable", "java/lang/Comparable", "java/lang/CharSequence"]),
        "java/lang/Thread" => (Some(OBJECT), &["java/lang/Runnable"]),
        "java/io/Externalizable" => (None, &["java/io/Serializable"]),
        "java/io/Closeable" => (None, &["java/lang/AutoCloseable"]),
        "java/util/ArrayList" | "java/util/LinkedList" => (Some(OBJECT), &["java/util/List", "java/io/Serializable"]),
        "java/util/List" | "java/util/Set" => (None, &["java/util/Collection"]),
        "java/util/Collection" => (None, &["java/lang/Iterable"]),
        _ => (Some(OBJECT), &[]),
    }
}

fn platform_is_interface(name: &str) -> bool {
    matches!(
        name,
        "java/io/Serializable"
            | "java/io/Externalizable"
            | "java/io/Closeable"
            | "java/lang/AutoCloseable"
            | "java/lang/Comparable"
            | "java/lang/CharSequence"
            | "java/lang/Runnable"
            | "java/lang/Iterable"
            | "java/lang/annotation/Annotation"
            | "java/util/Collection"
            | "java/util/List"
            | "java/util/Set"
            | "java/util/Comparator"
            | "java/util/concurrent/Callable"
    ) || name.starts_with("java/util/function/")
}

pub(crate) fn is_platform(name: &str) -> bool {
    name.starts_with('[') || PLATFORM_PREFIXES.iter().any(|p| name.starts_with(p))
}

/// Element class of an array class name, or the name itself. `None` for
/// primitive arrays.
pub(crate) fn element_class(name: &str) -> Option<&str> {
    let t = name.trim_start_matches('[');
    if t.len() == name.len() {
        Some(name)
    } else {
        t.strip_prefix('L').and_then(|s| s.strip_suffix(';'))
    }
}

pub(crate) struct Hierarchy {
    classes: BTreeMap<String, ClassUnit>,
}

impl Hierarchy {
    /// Parses every class entry. The first jar declaring a name wins.
    pub(crate) fn load(jars: &[JarArchive]) -> Result<Self, ShrinkError> {
        let mut classes = BTreeMap::new();
        for jar in jars {
            for (entry, bytes) in jar.class_entries() {
                let unit = parse_class(bytes).map_err(|source| ShrinkError::Input { entry: entry.to_owned(), source })?;
                classes.entry(unit.binary_name().to_owned()).or_insert(unit);
            }
        }
        let h = Hierarchy { classes };
        h.check_supertypes()?;
        Ok(h)
    }

    /// Builds a hierarchy without the supertype check.
    pub(crate) fn from_units(units: impl IntoIterator<Item = ClassUnit>) -> Self {
        let mut classes = BTreeMap::new();
        for u in units {
            classes.entry(u.binary_name().to_owned()).or_insert(u);
        }
        Hierarchy { classes }
    }

    fn check_supertypes(&self) -> Result<(), ShrinkError> {
        for (name, c) in &self.classes {
            for s in c.superclass().into_iter().chain(c.interface_names()) {
                if !self.classes.contains_key(s) && !is_platform(s) {
                    return Err(ShrinkError::UnresolvedSuperclass { class: name.clone(), missing: s.to_owned() });
                }
            }
        }
        Ok(())
    }

    pub(crate) fn classes(&self) -> impl Iterator<Item = (&String, &ClassUnit)> {
        self.classes.iter()
    }

    pub(crate) fn get(&self, name: &str) -> Option<&ClassUnit> {
        self.classes.get(name)
    }

    pub(crate) fn contains(&self, name: &str) -> bool {
        self.classes.contains_key(name)
    }

    pub(crate) fn is_interface(&self, name: &str) -> bool {
        match self.get(name) {
            Some(c) => c.is_interface(),
            None => platform_is_interface(name),
        }
    }

    fn superclass(&self, name: &str) -> Option<String> {
        match self.get(name) {
            Some(c) => c.superclass().map(str::to_owned),
            None if self.is_interface(name) => None,
            None => platform_parents(name).0.map(str::to_owned),
        }
    }

    fn interfaces(&self, name: &str) -> Vec<String> {
        match self.get(name) {
            Some(c) => c.interface_names().map(str::to_owned).collect(),
            None => platform_parents(name).1.iter().map(|s| (*s).to_owned()).collect(),
        }
    }

    /// Direct supertypes: superclass first, then interfaces.
    pub(crate) fn direct_supertypes(&self, name: &str) -> Vec<String> {
        self.superclass(name).into_iter().chain(self.interfaces(name)).collect()
    }

    pub(crate) fn is_subtype(&self, sub: &str, sup: &str) -> bool {
        if sub == sup || sup == OBJECT {
            return true;
        }
        let mut stack = vec![sub.to_owned()];
        let mut seen = std::collections::BTreeSet::new();
        while let Some(n) = stack.pop() {
            if n == sup {
                return true;
            }
            if seen.insert(n.clone()) {
                stack.extend(self.direct_supertypes(&n));
            }
        }
        false
    }

    fn declares_method(&self, class: &str, name: &str, desc: &str) -> Option<bool> {
        let c = self.get(class)?;
        c.find_method(name, desc).map(|m| m.is_abstract())
    }

    /// Symbolic resolution of a method reference: the superclass chain, then
    /// superinterfaces. Returns the in-jar declaring class; `None` when the
    /// declaration is in a platform class or missing.
    pub(crate) fn resolve_method(&self, owner: &str, name: &str, desc: &str) -> Option<String> {
        let mut cur = Some(owner.to_owned());
        while let Some(c) = cur {
            if self.declares_method(&c, name, desc).is_some() {
                return Some(c);
            }
            if !self.contains(&c) {
                break;
            }
            cur = self.superclass(&c);
        }
        self.interface_method(owner, name, desc, false)
    }

    /// Searches all superinterfaces of `start`, preferring a non-abstract
    /// declaration when `concrete` is set.
    fn interface_method(&self, start: &str, name: &str, desc: &str, concrete: bool) -> Option<String> {
        let mut order = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        let mut stack = vec![start.to_owned()];
        while let Some(n) = stack.pop() {
            if !seen.insert(n.clone()) {
                continue;
            }
            if n != start && self.is_interface(&n) {
                order.push(n.clone());
            }
            let mut next = self.direct_supertypes(&n);
            next.reverse();
            stack.extend(next);
        }
        let found = |want_concrete: bool| {
            order.iter().find(|i| match self.declares_method(i, name, desc) {
                Some(is_abstract) => !want_concrete || !is_abstract,
                None => false,
            })
        };
        if concrete {
            found(true).cloned()
        } else {
            found(true).or_else(|| found(false)).cloned()
        }
    }

    /// Method selected by virtual dispatch on a receiver of class `receiver`.
    pub(crate) fn select_method(&self, receiver: &str, name: &str, desc: &str) -> Option<String> {
        let mut cur = Some(receiver.to_owned());
        while let Some(c) = cur {
            match self.get(&c) {
                Some(unit) => {
                    if let Some(m) = unit.find_method(name, desc) {
                        if !m.is_abstract() && !m.is_static() {
                            return Some(c);
                        }
                    }
                }
                None => break,
            }
            cur = self.superclass(&c);
        }
        self.interface_method(receiver, name, desc, true)
    }

    /// Field resolution: the class, its superinterfaces, then its superclass.
    pub(crate) fn resolve_field(&self, owner: &str, name: &str, desc: &str) -> Option<String> {
        let c = self.get(owner)?;
        if c.find_field(name, desc).is_some() {
            return Some(owner.to_owned());
        }
        for i in self.interfaces(owner) {
            if let Some(f) = self.resolve_field(&i, name, desc) {
                return Some(f);
            }
        }
        self.superclass(owner).and_then(|s| self.resolve_field(&s, name, desc))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn array_names_map_to_elements() {
        assert_eq!(element_class("[[LA/B;"), Some("A/B"));
        assert_eq!(element_class("[I"), None);
        assert_eq!(element_class("A/B"), Some("A/B"));
    }

    #[test]
    fn platform_chain_is_followed() {
        let h = Hierarchy { classes: BTreeMap::new() };
        assert!(h.is_subtype("java/lang/RuntimeException", "java/lang/Throwable"));
        assert!(h.is_subtype("java/io/Externalizable", "java/io/Serializable"));
        assert!(!h.is_subtype("java/lang/String", "java/lang/Number"));
    }
}
