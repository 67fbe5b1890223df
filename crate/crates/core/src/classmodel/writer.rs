use super::attribute::write_attributes;
use super::bytes::{count_u16, PutBe};
use super::constant::Constant;
use super::{ClassError, ClassUnit, Member, MAGIC};

/// Serializes a class. The unit is validated first; any dangling pool
/// reference or member invariant breach is reported instead of written.
pub fn emit_class(unit: &ClassUnit) -> Result<Vec<u8>, ClassError> {
    unit.validate().map_err(|e| match e {
        ClassError::DanglingPoolIndex { index, site, reason } => {
            ClassError::InvariantViolation(format!("pool index #{index} in {site}: {reason}"))
        }
        other => other,
    })?;
    let mut out = Vec::with_capacity(1024);
    out.u4(MAGIC);
    out.u2(unit.minor_version);
    out.u2(unit.major_version);

    let pool = &unit.constant_pool;
    out.u2(count_u16(pool.count(), "constant pool slots")?);
    for (_, c) in pool.iter() {
        out.u1(c.tag());
        match c {
            Constant::Utf8(s) => {
                let bytes = cesu8::to_java_cesu8(s);
                out.u2(count_u16(bytes.len(), "Utf8 bytes")?);
                out.extend_from_slice(&bytes);
            }
            Constant::Integer(v) => out.u4(*v as u32),
            Constant::Float(bits) => out.u4(*bits),
            Constant::Long(v) => out.extend_from_slice(&v.to_be_bytes()),
            Constant::Double(bits) => out.extend_from_slice(&bits.to_be_bytes()),
            Constant::Class { name_index: i }
            | Constant::String { string_index: i }
            | Constant::MethodType { descriptor_index: i }
            | Constant::Module { name_index: i }
            | Constant::Package { name_index: i } => out.u2(*i),
            Constant::Fieldref { class_index: a, name_and_type_index: b }
            | Constant::Methodref { class_index: a, name_and_type_index: b }
            | Constant::InterfaceMethodref { class_index: a, name_and_type_index: b }
            | Constant::NameAndType { name_index: a, descriptor_index: b }
            | Constant::Dynamic { bootstrap_method_attr_index: a, name_and_type_index: b }
            | Constant::InvokeDynamic { bootstrap_method_attr_index: a, name_and_type_index: b } => {
                out.u2(*a);
                out.u2(*b);
            }
            Constant::MethodHandle { reference_kind, reference_index } => {
                out.u1(*reference_kind);
                out.u2(*reference_index);
            }
        }
    }

    out.u2(unit.access_flags);
    out.u2(unit.this_class);
    out.u2(unit.super_class);
    out.u2(count_u16(unit.interfaces.len(), "interfaces")?);
    for &i in &unit.interfaces {
        out.u2(i);
    }
    out.u2(count_u16(unit.fields.len(), "fields")?);
    for f in &unit.fields {
        write_member(&mut out, f)?;
    }
    out.u2(count_u16(unit.methods.len(), "methods")?);
    for m in &unit.methods {
        write_member(&mut out, m)?;
    }
    write_attributes(&mut out, &unit.attributes)?;
    Ok(out)
}

fn write_member(out: &mut Vec<u8>, m: &impl Member) -> Result<(), ClassError> {
    out.u2(m.access_flags());
    out.u2(m.name_index());
    out.u2(m.descriptor_index());
    write_attributes(out, m.attributes())
}
