//! Removal of unreached constructs from a jar.

use std::collections::BTreeSet;

use crate::classmodel::code::op;
use crate::classmodel::descriptor::parse_field_descriptor;
use crate::classmodel::{
    class_ref_of, emit_class, field_ref_of, method_ref_of, parse_class, Annotation, Attribute, AttributeBody,
    ClassUnit, Insn, Level, Member,
};
use crate::jario::JarArchive;

use super::hierarchy::{element_class, Hierarchy};
use super::{ReachabilitySet, ShrinkError, ShrinkPolicy};

/// Removes every construct outside `live` at the levels `policy` enables,
/// compacts the constant pools of changed classes and checks that each
/// rewritten class parses back. A policy without levels returns the input
/// unchanged.
pub fn apply_debloat(jar: &JarArchive, live: &ReachabilitySet, policy: &ShrinkPolicy) -> Result<JarArchive, ShrinkError> {
    if policy.levels.is_empty() {
        return Ok(jar.clone());
    }
    let mut units = Vec::new();
    for (entry, bytes) in jar.class_entries() {
        let unit = parse_class(bytes).map_err(|source| ShrinkError::Input { entry: entry.to_owned(), source })?;
        units.push((entry.to_owned(), unit));
    }
    let h = Hierarchy::from_units(units.iter().map(|(_, u)| u.clone()));

    let kept_methods = live.retained(Level::Method, policy);
    let kept_fields = live.retained(Level::Field, policy);
    let mut removed_classes = BTreeSet::new();
    let mut removed_fields = BTreeSet::new();
    for (_, u) in &units {
        let name = u.binary_name().to_owned();
        if policy.removes(Level::Class) && !live.live_classes.contains(&class_ref_of(u)) {
            removed_classes.insert(name);
            continue;
        }
        if policy.removes(Level::Field) {
            for f in &u.fields {
                if field_ref_of(u, f).is_ok_and(|r| !kept_fields.contains(&r)) {
                    let pool = &u.constant_pool;
                    removed_fields.insert((name.clone(), f.name(pool).to_owned(), f.descriptor(pool).to_owned()));
                }
            }
        }
    }

    let mut out = jar.clone();
    for (entry, mut unit) in units {
        let name = unit.binary_name().to_owned();
        if removed_classes.contains(&name) {
            out.entries.remove(&entry);
            continue;
        }
        let mut changed = false;
        if policy.removes(Level::Method) {
            let before = unit.methods.len();
            let u = &unit;
            let keep: Vec<bool> =
                u.methods.iter().map(|m| method_ref_of(u, m).map_or(true, |r| kept_methods.contains(&r))).collect();
            let mut it = keep.into_iter();
            unit.methods.retain(|_| it.next().unwrap_or(true));
            changed |= unit.methods.len() != before;
        }
        if policy.removes(Level::Field) {
            let before = unit.fields.len();
            let pool = unit.constant_pool.clone();
            unit.fields.retain(|f| {
                !removed_fields.contains(&(name.clone(), f.name(&pool).to_owned(), f.descriptor(&pool).to_owned()))
            });
            changed |= unit.fields.len() != before;
        }
        changed |= patch_field_writes(&mut unit, &h, &removed_fields);
        if !policy.keep_annotations {
            changed |= strip_annotations(&mut unit, &removed_classes);
        }
        if !changed {
            continue;
        }
        unit.compact_constant_pool();
        let bytes = emit_class(&unit).map_err(|source| ShrinkError::InvariantViolation { class: name.clone(), source })?;
        let back = parse_class(&bytes).map_err(|source| ShrinkError::InvariantViolation { class: name.clone(), source })?;
        back.validate().map_err(|source| ShrinkError::InvariantViolation { class: name.clone(), source })?;
        out.entries.insert(entry, bytes);
    }
    Ok(out)
}

/// Replaces writes to removed fields with pops of the same encoded length,
/// so no branch offset or frame moves.
fn patch_field_writes(unit: &mut ClassUnit, h: &Hierarchy, removed: &BTreeSet<(String, String, String)>) -> bool {
    if removed.is_empty() {
        return false;
    }
    let pool = unit.constant_pool.clone();
    let mut changed = false;
    for m in &mut unit.methods {
        let Some(code) = m.code_mut() else { continue };
        let mut patched = Vec::with_capacity(code.code.len());
        for insn in code.code.drain(..) {
            let target = match insn.opcode {
                op::PUTFIELD | op::PUTSTATIC => insn.pool_index().and_then(|i| pool.member_ref(i)),
                _ => None,
            };
            let gone = target.as_ref().and_then(|r| {
                let decl = h.resolve_field(r.owner, r.name, r.descriptor)?;
                removed.contains(&(decl, r.name.to_owned(), r.descriptor.to_owned())).then_some(r.descriptor)
            });
            match gone {
                Some(desc) => {
                    let wide = parse_field_descriptor(desc).is_ok_and(|t| t.slots() == 2);
                    patched.push(Insn::simple(if wide { op::POP2 } else { op::POP }));
                    patched.push(Insn::simple(if insn.opcode == op::PUTFIELD { op::POP } else { op::NOP }));
                    patched.push(Insn::simple(op::NOP));
                    changed = true;
                }
                None => patched.push(insn),
            }
        }
        code.code = patched;
    }
    changed
}

fn strip_annotations(unit: &mut ClassUnit, removed: &BTreeSet<String>) -> bool {
    if removed.is_empty() {
        return false;
    }
    let pool = unit.constant_pool.clone();
    let gone = |a: &Annotation| {
        pool.utf8(a.type_index)
            .and_then(|d| parse_field_descriptor(d).ok())
            .and_then(|t| t.class_name().and_then(element_class).map(|c| removed.contains(c)))
            .unwrap_or(false)
    };
    let mut changed = false;
    let mut strip = |attrs: &mut Vec<Attribute>| {
        for a in attrs.iter_mut() {
            match &mut a.body {
                AttributeBody::RuntimeVisibleAnnotations(list) | AttributeBody::RuntimeInvisibleAnnotations(list) => {
                    let n = list.len();
                    list.retain(|x| !gone(x));
                    changed |= list.len() != n;
                }
                AttributeBody::RuntimeVisibleParameterAnnotations(ps)
                | AttributeBody::RuntimeInvisibleParameterAnnotations(ps) => {
                    for list in ps.iter_mut() {
                        let n = list.len();
                        list.retain(|x| !gone(x));
                        changed |= list.len() != n;
                    }
                }
                _ => {}
            }
        }
        attrs.retain(|a| {
            !matches!(&a.body, AttributeBody::RuntimeVisibleAnnotations(l) | AttributeBody::RuntimeInvisibleAnnotations(l) if l.is_empty())
        });
    };
    strip(&mut unit.attributes);
    for m in &mut unit.methods {
        strip(&mut m.attributes);
    }
    for f in &mut unit.fields {
        strip(&mut f.attributes);
    }
    changed
}
