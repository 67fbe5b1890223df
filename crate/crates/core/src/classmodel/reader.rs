use super::attribute::read_attributes;
use super::bytes::ByteReader;
use super::constant::*;
use super::{ClassError, ClassUnit, FieldMember, MethodMember, MAGIC, MAX_MAJOR_VERSION, MIN_MAJOR_VERSION};

/// Parses a class file and validates every constant pool reference.
pub fn parse_class(bytes: &[u8]) -> Result<ClassUnit, ClassError> {
    let mut r = ByteReader::new(bytes);
    let magic = r.u4()?;
    if magic != MAGIC {
        return Err(ClassError::BadMagic(magic));
    }
    let minor_version = r.u2()?;
    let major_version = r.u2()?;
    if !(MIN_MAJOR_VERSION..=MAX_MAJOR_VERSION).contains(&major_version) {
        return Err(ClassError::UnsupportedMajorVersion(major_version));
    }
    let constant_pool = read_pool(&mut r)?;
    let access_flags = r.u2()?;
    let this_class = r.u2()?;
    let super_class = r.u2()?;
    let n = r.u2()?;
    let interfaces = (0..n).map(|_| r.u2()).collect::<Result<_, _>>()?;

    let n = r.u2()?;
    let mut fields = Vec::with_capacity(n as usize);
    for _ in 0..n {
        fields.push(FieldMember {
            access_flags: r.u2()?,
            name_index: r.u2()?,
            descriptor_index: r.u2()?,
            attributes: read_attributes(&mut r, &constant_pool)?,
        });
    }
    let n = r.u2()?;
    let mut methods = Vec::with_capacity(n as usize);
    for _ in 0..n {
        methods.push(MethodMember {
            access_flags: r.u2()?,
            name_index: r.u2()?,
            descriptor_index: r.u2()?,
            attributes: read_attributes(&mut r, &constant_pool)?,
        });
    }
    let attributes = read_attributes(&mut r, &constant_pool)?;
    r.expect_end("class file")?;

    let unit = ClassUnit {
        minor_version,
        major_version,
        constant_pool,
        access_flags,
        this_class,
        super_class,
        interfaces,
        fields,
        methods,
        attributes,
    };
    unit.validate()?;
    Ok(unit)
}

fn read_pool(r: &mut ByteReader<'_>) -> Result<ConstantPool, ClassError> {
    let count = r.u2()?;
    if count == 0 {
        return Err(ClassError::Malformed { offset: r.offset(), reason: "constant_pool_count is 0".into() });
    }
    let mut pool = ConstantPool::new();
    while pool.count() < count as usize {
        let at = r.offset();
        let tag = r.u1()?;
        let c = match tag {
            TAG_UTF8 => {
                let len = r.u2()? as usize;
                let raw = r.take(len)?;
                let s = cesu8::from_java_cesu8(raw).map_err(|_| ClassError::Malformed {
                    offset: at,
                    reason: "invalid modified UTF-8".into(),
                })?;
                Constant::Utf8(s.into_owned())
            }
            TAG_INTEGER => Constant::Integer(r.u4()? as i32),
            TAG_FLOAT => Constant::Float(r.u4()?),
            TAG_LONG => Constant::Long(r.u8()? as i64),
            TAG_DOUBLE => Constant::Double(r.u8()?),
            TAG_CLASS => Constant::Class { name_index: r.u2()? },
            TAG_STRING => Constant::String { string_index: r.u2()? },
            TAG_FIELDREF => Constant::Fieldref { class_index: r.u2()?, name_and_type_index: r.u2()? },
            TAG_METHODREF => Constant::Methodref { class_index: r.u2()?, name_and_type_index: r.u2()? },
            TAG_INTERFACE_METHODREF => {
                Constant::InterfaceMethodref { class_index: r.u2()?, name_and_type_index: r.u2()? }
            }
            TAG_NAME_AND_TYPE => Constant::NameAndType { name_index: r.u2()?, descriptor_index: r.u2()? },
            TAG_METHOD_HANDLE => {
                let reference_kind = r.u1()?;
                if !(REF_GET_FIELD..=REF_INVOKE_INTERFACE).contains(&reference_kind) {
                    return Err(ClassError::Malformed {
                        offset: at,
                        reason: format!("bad method handle kind {reference_kind}"),
                    });
                }
                Constant::MethodHandle { reference_kind, reference_index: r.u2()? }
            }
            TAG_METHOD_TYPE => Constant::MethodType { descriptor_index: r.u2()? },
            TAG_DYNAMIC => Constant::Dynamic { bootstrap_method_attr_index: r.u2()?, name_and_type_index: r.u2()? },
            TAG_INVOKE_DYNAMIC => {
                Constant::InvokeDynamic { bootstrap_method_attr_index: r.u2()?, name_and_type_index: r.u2()? }
            }
            TAG_MODULE => Constant::Module { name_index: r.u2()? },
            TAG_PACKAGE => Constant::Package { name_index: r.u2()? },
            _ => {
                return Err(ClassError::Malformed { offset: at, reason: format!("unknown constant tag {tag}") });
            }
        };
        if c.is_wide() && pool.count() + 2 > count as usize {
            return Err(ClassError::Malformed { offset: at, reason: "wide constant in last pool slot".into() });
        }
        pool.push(c);
    }
    Ok(pool)
}
