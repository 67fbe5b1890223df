//! Walks every constant pool reference held by a class: validation,
//! opacity checks, and compaction with reference rewriting.

use std::fmt;

use super::attribute::{Annotation, Attribute, AttributeBody, ElementValue, StackMapFrame, VerificationType};
use super::code::op;
use super::constant::{Constant, PoolKind};
use super::descriptor::{parse_field_descriptor, parse_method_descriptor};
use super::{ClassError, ClassUnit, Member};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiteOwner {
    Class,
    Field(usize),
    Method(usize),
}

/// Where a pool reference lives, for diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct Site {
    pub owner: SiteOwner,
    pub what: &'static str,
    /// Instruction index inside a Code attribute, when relevant.
    pub insn: Option<usize>,
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.owner {
            SiteOwner::Class => f.write_str("class")?,
            SiteOwner::Field(i) => write!(f, "field[{i}]")?,
            SiteOwner::Method(i) => write!(f, "method[{i}]")?,
        }
        write!(f, " {}", self.what)?;
        if let Some(i) = self.insn {
            write!(f, " at instruction {i}")?;
        }
        Ok(())
    }
}

type Visitor<'f> = dyn FnMut(&Site, &mut u16, PoolKind) + 'f;

fn site(owner: SiteOwner, what: &'static str) -> Site {
    Site { owner, what, insn: None }
}

pub(crate) fn visit_refs(unit: &mut ClassUnit, f: &mut Visitor<'_>) {
    let class = SiteOwner::Class;
    f(&site(class, "this_class"), &mut unit.this_class, PoolKind::Class);
    if unit.super_class != 0 {
        f(&site(class, "super_class"), &mut unit.super_class, PoolKind::Class);
    }
    for i in &mut unit.interfaces {
        f(&site(class, "interfaces"), i, PoolKind::Class);
    }
    for (n, fld) in unit.fields.iter_mut().enumerate() {
        let owner = SiteOwner::Field(n);
        f(&site(owner, "name"), &mut fld.name_index, PoolKind::Utf8);
        f(&site(owner, "descriptor"), &mut fld.descriptor_index, PoolKind::Utf8);
        visit_attributes(&mut fld.attributes, owner, f);
    }
    for (n, m) in unit.methods.iter_mut().enumerate() {
        let owner = SiteOwner::Method(n);
        f(&site(owner, "name"), &mut m.name_index, PoolKind::Utf8);
        f(&site(owner, "descriptor"), &mut m.descriptor_index, PoolKind::Utf8);
        visit_attributes(&mut m.attributes, owner, f);
    }
    visit_attributes(&mut unit.attributes, class, f);
}

fn visit_attributes(attrs: &mut [Attribute], owner: SiteOwner, f: &mut Visitor<'_>) {
    for a in attrs {
        f(&site(owner, "attribute name"), &mut a.name_index, PoolKind::Utf8);
        visit_body(&mut a.body, owner, f);
    }
}

fn visit_body(body: &mut AttributeBody, owner: SiteOwner, f: &mut Visitor<'_>) {
    match body {
        AttributeBody::Code(c) => {
            for (n, insn) in c.code.iter_mut().enumerate() {
                let kind = match insn.opcode {
                    op::LDC | op::LDC_W => PoolKind::Loadable,
                    op::LDC2_W => PoolKind::WideLoadable,
                    op::GETSTATIC | op::PUTSTATIC | op::GETFIELD | op::PUTFIELD => PoolKind::Fieldref,
                    op::INVOKEVIRTUAL => PoolKind::Methodref,
                    op::INVOKESPECIAL | op::INVOKESTATIC => PoolKind::AnyMethodref,
                    op::INVOKEINTERFACE => PoolKind::InterfaceMethodref,
                    op::INVOKEDYNAMIC => PoolKind::InvokeDynamic,
                    _ => PoolKind::Class,
                };
                if let Some(idx) = insn.pool_index_mut() {
                    let s = Site { owner, what: "Code instruction", insn: Some(n) };
                    f(&s, idx, kind);
                }
            }
            for h in &mut c.exception_table {
                if h.catch_type != 0 {
                    f(&site(owner, "exception handler catch_type"), &mut h.catch_type, PoolKind::Class);
                }
            }
            visit_attributes(&mut c.attributes, owner, f);
        }
        AttributeBody::ConstantValue(i) => f(&site(owner, "ConstantValue"), i, PoolKind::ConstantValue),
        AttributeBody::Exceptions(l) => {
            for i in l {
                f(&site(owner, "Exceptions"), i, PoolKind::Class);
            }
        }
        AttributeBody::InnerClasses(l) => {
            for ic in l {
                let s = site(owner, "InnerClasses");
                f(&s, &mut ic.inner_class_info_index, PoolKind::Class);
                if ic.outer_class_info_index != 0 {
                    f(&s, &mut ic.outer_class_info_index, PoolKind::Class);
                }
                if ic.inner_name_index != 0 {
                    f(&s, &mut ic.inner_name_index, PoolKind::Utf8);
                }
            }
        }
        AttributeBody::EnclosingMethod { class_index, method_index } => {
            let s = site(owner, "EnclosingMethod");
            f(&s, class_index, PoolKind::Class);
            if *method_index != 0 {
                f(&s, method_index, PoolKind::NameAndType);
            }
        }
        AttributeBody::BootstrapMethods(l) => {
            for m in l {
                let s = site(owner, "BootstrapMethods");
                f(&s, &mut m.method_ref, PoolKind::MethodHandle);
                for a in &mut m.arguments {
                    f(&s, a, PoolKind::BootstrapArgument);
                }
            }
        }
        AttributeBody::Signature(i) => f(&site(owner, "Signature"), i, PoolKind::Utf8),
        AttributeBody::SourceFile(i) => f(&site(owner, "SourceFile"), i, PoolKind::Utf8),
        AttributeBody::RuntimeVisibleAnnotations(l) | AttributeBody::RuntimeInvisibleAnnotations(l) => {
            for a in l {
                visit_annotation(a, owner, f);
            }
        }
        AttributeBody::RuntimeVisibleParameterAnnotations(p)
        | AttributeBody::RuntimeInvisibleParameterAnnotations(p) => {
            for l in p {
                for a in l {
                    visit_annotation(a, owner, f);
                }
            }
        }
        AttributeBody::AnnotationDefault(v) => visit_element(v, owner, f),
        AttributeBody::StackMapTable(frames) => {
            for fr in frames {
                let mut visit_v = |v: &mut VerificationType| {
                    if let VerificationType::Object(i) = v {
                        f(&site(owner, "StackMapTable"), i, PoolKind::Class);
                    }
                };
                match fr {
                    StackMapFrame::Same { .. } | StackMapFrame::Chop { .. } => {}
                    StackMapFrame::SameLocals1StackItem { stack, .. } => visit_v(stack),
                    StackMapFrame::Append { locals, .. } => locals.iter_mut().for_each(&mut visit_v),
                    StackMapFrame::Full { locals, stack, .. } => {
                        locals.iter_mut().chain(stack.iter_mut()).for_each(&mut visit_v)
                    }
                }
            }
        }
        AttributeBody::LocalVariableTable(l) | AttributeBody::LocalVariableTypeTable(l) => {
            for v in l {
                let s = site(owner, "LocalVariableTable");
                f(&s, &mut v.name_index, PoolKind::Utf8);
                f(&s, &mut v.descriptor_index, PoolKind::Utf8);
            }
        }
        AttributeBody::MethodParameters(l) => {
            for p in l {
                if p.name_index != 0 {
                    f(&site(owner, "MethodParameters"), &mut p.name_index, PoolKind::Utf8);
                }
            }
        }
        AttributeBody::NestHost(i) => f(&site(owner, "NestHost"), i, PoolKind::Class),
        AttributeBody::NestMembers(l) | AttributeBody::PermittedSubclasses(l) => {
            for i in l {
                f(&site(owner, "nest/permitted class list"), i, PoolKind::Class);
            }
        }
        AttributeBody::Raw(_) => {}
    }
}

fn visit_annotation(a: &mut Annotation, owner: SiteOwner, f: &mut Visitor<'_>) {
    f(&site(owner, "annotation type"), &mut a.type_index, PoolKind::Utf8);
    for (name, v) in &mut a.elements {
        f(&site(owner, "annotation element name"), name, PoolKind::Utf8);
        visit_element(v, owner, f);
    }
}

fn visit_element(v: &mut ElementValue, owner: SiteOwner, f: &mut Visitor<'_>) {
    let s = site(owner, "annotation element value");
    match v {
        ElementValue::Const { tag, index } => {
            let kind = match tag {
                b'D' => PoolKind::Double,
                b'F' => PoolKind::Float,
                b'J' => PoolKind::Long,
                b's' => PoolKind::Utf8,
                _ => PoolKind::Integer,
            };
            f(&s, index, kind);
        }
        ElementValue::Enum { type_name_index, const_name_index } => {
            f(&s, type_name_index, PoolKind::Utf8);
            f(&s, const_name_index, PoolKind::Utf8);
        }
        ElementValue::Class(i) => f(&s, i, PoolKind::Utf8),
        ElementValue::Annotation(a) => visit_annotation(a, owner, f),
        ElementValue::Array(l) => {
            for v in l {
                visit_element(v, owner, f);
            }
        }
    }
}

fn check_index(unit: &ClassUnit, index: u16, kind: PoolKind, site: &dyn fmt::Display) -> Result<(), ClassError> {
    match unit.constant_pool.get(index) {
        Some(c) if kind.accepts(c) => Ok(()),
        Some(c) => Err(ClassError::DanglingPoolIndex {
            index,
            site: site.to_string(),
            reason: format!("expected {kind}, found {}", c.kind_name()),
        }),
        None => Err(ClassError::DanglingPoolIndex {
            index,
            site: site.to_string(),
            reason: if (index as usize) < unit.constant_pool.count() {
                format!("expected {kind}, slot is unusable")
            } else {
                format!("expected {kind}, pool has {} slots", unit.constant_pool.count())
            },
        }),
    }
}

fn bootstrap_count(unit: &ClassUnit) -> usize {
    unit.attributes
        .iter()
        .find_map(|a| match &a.body {
            AttributeBody::BootstrapMethods(l) => Some(l.len()),
            _ => None,
        })
        .unwrap_or(0)
}

pub(crate) fn validate(unit: &ClassUnit) -> Result<(), ClassError> {
    let pool = &unit.constant_pool;
    let bsm = bootstrap_count(unit);
    for (i, c) in pool.iter() {
        for (idx, kind) in c.references() {
            check_index(unit, idx, kind, &format_args!("constant #{i} ({})", c.kind_name()))?;
        }
        if let Constant::InvokeDynamic { bootstrap_method_attr_index: b, .. }
        | Constant::Dynamic { bootstrap_method_attr_index: b, .. } = c
        {
            if *b as usize >= bsm {
                return Err(ClassError::InvariantViolation(format!(
                    "constant #{i} names bootstrap method {b} but the class has {bsm}"
                )));
            }
        }
    }
    // The visitor needs `&mut`; validation never writes through it.
    let mut scratch = unit.clone();
    let mut result = Ok(());
    visit_refs(&mut scratch, &mut |s, idx, kind| {
        if result.is_ok() {
            result = check_index(unit, *idx, kind, s);
        }
    });
    result?;

    for f in &unit.fields {
        parse_field_descriptor(f.descriptor(pool))?;
    }
    for m in &unit.methods {
        parse_method_descriptor(m.descriptor(pool))?;
        let has_code = m.code().is_some();
        let needs_code = !m.is_abstract() && !m.is_native();
        if has_code != needs_code {
            return Err(ClassError::InvariantViolation(format!(
                "method {}{} in {}: {}",
                m.name(pool),
                m.descriptor(pool),
                unit.binary_name(),
                if needs_code { "missing Code attribute" } else { "abstract or native method with Code" }
            )));
        }
    }
    Ok(())
}

pub(crate) fn has_opaque_attributes(unit: &ClassUnit) -> bool {
    let pool = &unit.constant_pool;
    let opaque = |attrs: &[Attribute]| {
        attrs.iter().any(|a| {
            a.is_opaque(pool)
                || matches!(&a.body, AttributeBody::Code(c) if c.attributes.iter().any(|x| x.is_opaque(pool)))
        })
    };
    opaque(&unit.attributes)
        || unit.fields.iter().any(|f| opaque(&f.attributes))
        || unit.methods.iter().any(|m| opaque(&m.attributes))
}

pub(crate) fn compact(unit: &mut ClassUnit) {
    if has_opaque_attributes(unit) {
        return;
    }
    let count = unit.constant_pool.count();
    let mut keep = vec![false; count];

    // Structure references, leaving the bootstrap table out so that unused
    // bootstrap methods can be dropped.
    let bsm_pos = unit.attributes.iter().position(|a| matches!(a.body, AttributeBody::BootstrapMethods(_)));
    let bsm_attr = bsm_pos.map(|p| unit.attributes.remove(p));
    let mut roots = Vec::new();
    visit_refs(unit, &mut |_, idx, _| roots.push(*idx));

    let bsms = match &bsm_attr {
        Some(Attribute { body: AttributeBody::BootstrapMethods(l), .. }) => l.clone(),
        _ => Vec::new(),
    };
    let mut used_bsm = vec![false; bsms.len()];
    let mut work = roots;
    loop {
        while let Some(i) = work.pop() {
            if keep[i as usize] {
                continue;
            }
            keep[i as usize] = true;
            if let Some(c) = unit.constant_pool.get(i) {
                work.extend(c.references().into_iter().map(|(r, _)| r));
                if let Constant::InvokeDynamic { bootstrap_method_attr_index: b, .. }
                | Constant::Dynamic { bootstrap_method_attr_index: b, .. } = c
                {
                    if let Some(u) = used_bsm.get_mut(*b as usize) {
                        *u = true;
                    }
                }
            }
        }
        let mut grew = false;
        for (b, m) in bsms.iter().enumerate() {
            if used_bsm[b] && !keep[m.method_ref as usize] {
                work.push(m.method_ref);
                grew = true;
            }
            if used_bsm[b] {
                for &a in &m.arguments {
                    if !keep[a as usize] {
                        work.push(a);
                        grew = true;
                    }
                }
            }
        }
        if !grew {
            break;
        }
    }

    let mut bsm_remap = vec![0u16; bsms.len()];
    let mut kept_bsms = Vec::new();
    for (b, m) in bsms.into_iter().enumerate() {
        if used_bsm[b] {
            bsm_remap[b] = kept_bsms.len() as u16;
            kept_bsms.push(m);
        }
    }
    if let (Some(pos), Some(mut attr)) = (bsm_pos, bsm_attr) {
        if !kept_bsms.is_empty() {
            keep[attr.name_index as usize] = true;
            attr.body = AttributeBody::BootstrapMethods(kept_bsms);
            unit.attributes.insert(pos.min(unit.attributes.len()), attr);
        }
    }

    let (mut pool, remap) = unit.constant_pool.retain_slots(&keep);
    let rewritten: Vec<(u16, Constant)> = pool
        .iter()
        .filter_map(|(i, c)| match c {
            Constant::InvokeDynamic { bootstrap_method_attr_index: b, name_and_type_index } => Some((
                i,
                Constant::InvokeDynamic {
                    bootstrap_method_attr_index: bsm_remap[*b as usize],
                    name_and_type_index: *name_and_type_index,
                },
            )),
            Constant::Dynamic { bootstrap_method_attr_index: b, name_and_type_index } => Some((
                i,
                Constant::Dynamic {
                    bootstrap_method_attr_index: bsm_remap[*b as usize],
                    name_and_type_index: *name_and_type_index,
                },
            )),
            _ => None,
        })
        .collect();
    if !rewritten.is_empty() {
        pool = rebuild_with(&pool, &rewritten);
    }
    visit_refs(unit, &mut |_, idx, _| *idx = remap[*idx as usize]);
    unit.constant_pool = pool;
}

fn rebuild_with(pool: &super::ConstantPool, replace: &[(u16, Constant)]) -> super::ConstantPool {
    let mut out = super::ConstantPool::new();
    for (i, c) in pool.iter() {
        let c = replace.iter().find(|(j, _)| *j == i).map_or_else(|| c.clone(), |(_, r)| r.clone());
        out.push(c);
    }
    out
}
