//! Attributes understood structurally, plus an opaque fallback.
//!
//! Every attribute that can hold constant pool indices is modelled so that
//! the indices can be validated and rewritten. Unknown attributes are kept
//! as raw bytes; a class carrying one cannot have its pool compacted safely.

use super::bytes::{count_u16, ByteReader, PutBe};
use super::code::{self, Insn};
use super::constant::ConstantPool;
use super::ClassError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribute {
    /// Utf8 index of the attribute name.
    pub name_index: u16,
    pub body: AttributeBody,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AttributeBody {
    Code(CodeAttribute),
    ConstantValue(u16),
    Exceptions(Vec<u16>),
    InnerClasses(Vec<InnerClass>),
    EnclosingMethod { class_index: u16, method_index: u16 },
    BootstrapMethods(Vec<BootstrapMethod>),
    Signature(u16),
    SourceFile(u16),
    RuntimeVisibleAnnotations(Vec<Annotation>),
    RuntimeInvisibleAnnotations(Vec<Annotation>),
    RuntimeVisibleParameterAnnotations(Vec<Vec<Annotation>>),
    RuntimeInvisibleParameterAnnotations(Vec<Vec<Annotation>>),
    AnnotationDefault(ElementValue),
    StackMapTable(Vec<StackMapFrame>),
    LocalVariableTable(Vec<LocalVariable>),
    LocalVariableTypeTable(Vec<LocalVariable>),
    MethodParameters(Vec<MethodParameter>),
    NestHost(u16),
    NestMembers(Vec<u16>),
    PermittedSubclasses(Vec<u16>),
    /// Attributes without pool references (LineNumberTable, Deprecated, ...)
    /// or not understood at all.
    Raw(Vec<u8>),
}

/// Attribute names whose raw bodies are known to hold no pool indices.
const REFERENCE_FREE: &[&str] =
    &["LineNumberTable", "Deprecated", "Synthetic", "SourceDebugExtension"];

impl Attribute {
    /// True when this is a raw attribute that may hide pool references.
    pub fn is_opaque(&self, pool: &ConstantPool) -> bool {
        matches!(self.body, AttributeBody::Raw(_))
            && !pool.utf8(self.name_index).is_some_and(|n| REFERENCE_FREE.contains(&n))
    }

    pub fn name<'p>(&self, pool: &'p ConstantPool) -> Option<&'p str> {
        pool.utf8(self.name_index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeAttribute {
    pub max_stack: u16,
    pub max_locals: u16,
    pub code: Vec<Insn>,
    pub exception_table: Vec<ExceptionHandler>,
    pub attributes: Vec<Attribute>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExceptionHandler {
    pub start_pc: u16,
    pub end_pc: u16,
    pub handler_pc: u16,
    /// Class index, or 0 for a catch-all.
    pub catch_type: u16,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InnerClass {
    pub inner_class_info_index: u16,
    pub outer_class_info_index: u16,
    pub inner_name_index: u16,
    pub access_flags: u16,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BootstrapMethod {
    pub method_ref: u16,
    pub arguments: Vec<u16>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Annotation {
    /// Utf8 index of the annotation type's field descriptor.
    pub type_index: u16,
    pub elements: Vec<(u16, ElementValue)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ElementValue {
    /// Tags B C D F I J S Z s.
    Const { tag: u8, index: u16 },
    Enum { type_name_index: u16, const_name_index: u16 },
    Class(u16),
    Annotation(Box<Annotation>),
    Array(Vec<ElementValue>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerificationType {
    Top,
    Integer,
    Float,
    Double,
    Long,
    Null,
    UninitializedThis,
    Object(u16),
    /// Offset of the `new` instruction.
    Uninitialized(u16),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StackMapFrame {
    Same { offset_delta: u16, extended: bool },
    SameLocals1StackItem { offset_delta: u16, stack: VerificationType, extended: bool },
    Chop { offset_delta: u16, chopped: u8 },
    Append { offset_delta: u16, locals: Vec<VerificationType> },
    Full { offset_delta: u16, locals: Vec<VerificationType>, stack: Vec<VerificationType> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalVariable {
    pub start_pc: u16,
    pub length: u16,
    pub name_index: u16,
    /// Descriptor (LocalVariableTable) or signature (LocalVariableTypeTable).
    pub descriptor_index: u16,
    pub index: u16,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MethodParameter {
    pub name_index: u16,
    pub access_flags: u16,
}

fn malformed(r: &ByteReader<'_>, reason: impl Into<String>) -> ClassError {
    ClassError::Malformed { offset: r.offset(), reason: reason.into() }
}

pub(crate) fn read_attributes(
    r: &mut ByteReader<'_>,
    pool: &ConstantPool,
) -> Result<Vec<Attribute>, ClassError> {
    let n = r.u2()?;
    (0..n).map(|_| read_attribute(r, pool)).collect()
}

fn u2_list(r: &mut ByteReader<'_>) -> Result<Vec<u16>, ClassError> {
    let n = r.u2()?;
    (0..n).map(|_| r.u2()).collect()
}

fn read_attribute(r: &mut ByteReader<'_>, pool: &ConstantPool) -> Result<Attribute, ClassError> {
    let at = r.offset();
    let name_index = r.u2()?;
    let len = r.u4()? as usize;
    let name = pool.utf8(name_index).ok_or_else(|| ClassError::DanglingPoolIndex {
        index: name_index,
        site: format!("attribute name at offset {at}"),
        reason: "expected Utf8".into(),
    })?;
    let mut b = r.sub(len)?;
    let body = match name {
        "Code" => {
            let max_stack = b.u2()?;
            let max_locals = b.u2()?;
            let code_len = b.u4()? as usize;
            let code_base = b.offset();
            let code = code::decode(b.take(code_len)?, code_base)?;
            let n = b.u2()?;
            let exception_table = (0..n)
                .map(|_| {
                    Ok(ExceptionHandler {
                        start_pc: b.u2()?,
                        end_pc: b.u2()?,
                        handler_pc: b.u2()?,
                        catch_type: b.u2()?,
                    })
                })
                .collect::<Result<_, ClassError>>()?;
            let attributes = read_attributes(&mut b, pool)?;
            AttributeBody::Code(CodeAttribute { max_stack, max_locals, code, exception_table, attributes })
        }
        "ConstantValue" => AttributeBody::ConstantValue(b.u2()?),
        "Exceptions" => AttributeBody::Exceptions(u2_list(&mut b)?),
        "InnerClasses" => {
            let n = b.u2()?;
            AttributeBody::InnerClasses(
                (0..n)
                    .map(|_| {
                        Ok(InnerClass {
                            inner_class_info_index: b.u2()?,
                            outer_class_info_index: b.u2()?,
                            inner_name_index: b.u2()?,
                            access_flags: b.u2()?,
                        })
                    })
                    .collect::<Result<_, ClassError>>()?,
            )
        }
        "EnclosingMethod" => AttributeBody::EnclosingMethod { class_index: b.u2()?, method_index: b.u2()? },
        "BootstrapMethods" => {
            let n = b.u2()?;
            AttributeBody::BootstrapMethods(
                (0..n)
                    .map(|_| Ok(BootstrapMethod { method_ref: b.u2()?, arguments: u2_list(&mut b)? }))
                    .collect::<Result<_, ClassError>>()?,
            )
        }
        "Signature" => AttributeBody::Signature(b.u2()?),
        "SourceFile" => AttributeBody::SourceFile(b.u2()?),
        "RuntimeVisibleAnnotations" => AttributeBody::RuntimeVisibleAnnotations(read_annotations(&mut b)?),
        "RuntimeInvisibleAnnotations" => AttributeBody::RuntimeInvisibleAnnotations(read_annotations(&mut b)?),
        "RuntimeVisibleParameterAnnotations" => {
            AttributeBody::RuntimeVisibleParameterAnnotations(read_parameter_annotations(&mut b)?)
        }
        "RuntimeInvisibleParameterAnnotations" => {
            AttributeBody::RuntimeInvisibleParameterAnnotations(read_parameter_annotations(&mut b)?)
        }
        "AnnotationDefault" => AttributeBody::AnnotationDefault(read_element_value(&mut b, 0)?),
        "StackMapTable" => {
            let n = b.u2()?;
            AttributeBody::StackMapTable((0..n).map(|_| read_frame(&mut b)).collect::<Result<_, _>>()?)
        }
        "LocalVariableTable" | "LocalVariableTypeTable" => {
            let n = b.u2()?;
            let vars = (0..n)
                .map(|_| {
                    Ok(LocalVariable {
                        start_pc: b.u2()?,
                        length: b.u2()?,
                        name_index: b.u2()?,
                        descriptor_index: b.u2()?,
                        index: b.u2()?,
                    })
                })
                .collect::<Result<_, ClassError>>()?;
            if name == "LocalVariableTable" {
                AttributeBody::LocalVariableTable(vars)
            } else {
                AttributeBody::LocalVariableTypeTable(vars)
            }
        }
        "MethodParameters" => {
            let n = b.u1()?;
            AttributeBody::MethodParameters(
                (0..n)
                    .map(|_| Ok(MethodParameter { name_index: b.u2()?, access_flags: b.u2()? }))
                    .collect::<Result<_, ClassError>>()?,
            )
        }
        "NestHost" => AttributeBody::NestHost(b.u2()?),
        "NestMembers" => AttributeBody::NestMembers(u2_list(&mut b)?),
        "PermittedSubclasses" => AttributeBody::PermittedSubclasses(u2_list(&mut b)?),
        _ => AttributeBody::Raw(b.take(len)?.to_vec()),
    };
    b.expect_end(&format!("{name} attribute"))?;
    Ok(Attribute { name_index, body })
}

fn read_annotations(b: &mut ByteReader<'_>) -> Result<Vec<Annotation>, ClassError> {
    let n = b.u2()?;
    (0..n).map(|_| read_annotation(b, 0)).collect()
}

fn read_parameter_annotations(b: &mut ByteReader<'_>) -> Result<Vec<Vec<Annotation>>, ClassError> {
    let n = b.u1()?;
    (0..n).map(|_| read_annotations(b)).collect()
}

// Nesting limit for element values; real annotations are shallow.
const MAX_DEPTH: usize = 64;

fn read_annotation(b: &mut ByteReader<'_>, depth: usize) -> Result<Annotation, ClassError> {
    let type_index = b.u2()?;
    let n = b.u2()?;
    let elements = (0..n)
        .map(|_| Ok((b.u2()?, read_element_value(b, depth + 1)?)))
        .collect::<Result<_, ClassError>>()?;
    Ok(Annotation { type_index, elements })
}

fn read_element_value(b: &mut ByteReader<'_>, depth: usize) -> Result<ElementValue, ClassError> {
    if depth > MAX_DEPTH {
        return Err(malformed(b, "annotation nesting too deep"));
    }
    let tag = b.u1()?;
    Ok(match tag {
        b'B' | b'C' | b'D' | b'F' | b'I' | b'J' | b'S' | b'Z' | b's' => {
            ElementValue::Const { tag, index: b.u2()? }
        }
        b'e' => ElementValue::Enum { type_name_index: b.u2()?, const_name_index: b.u2()? },
        b'c' => ElementValue::Class(b.u2()?),
        b'@' => ElementValue::Annotation(Box::new(read_annotation(b, depth + 1)?)),
        b'[' => {
            let n = b.u2()?;
            ElementValue::Array((0..n).map(|_| read_element_value(b, depth + 1)).collect::<Result<_, _>>()?)
        }
        _ => return Err(malformed(b, format!("bad element_value tag {tag:#04x}"))),
    })
}

fn read_vtype(b: &mut ByteReader<'_>) -> Result<VerificationType, ClassError> {
    Ok(match b.u1()? {
        0 => VerificationType::Top,
        1 => VerificationType::Integer,
        2 => VerificationType::Float,
        3 => VerificationType::Double,
        4 => VerificationType::Long,
        5 => VerificationType::Null,
        6 => VerificationType::UninitializedThis,
        7 => VerificationType::Object(b.u2()?),
        8 => VerificationType::Uninitialized(b.u2()?),
        t => return Err(malformed(b, format!("bad verification type tag {t}"))),
    })
}

fn read_frame(b: &mut ByteReader<'_>) -> Result<StackMapFrame, ClassError> {
    let ty = b.u1()?;
    Ok(match ty {
        0..=63 => StackMapFrame::Same { offset_delta: ty as u16, extended: false },
        64..=127 => StackMapFrame::SameLocals1StackItem {
            offset_delta: (ty - 64) as u16,
            stack: read_vtype(b)?,
            extended: false,
        },
        247 => {
            let offset_delta = b.u2()?;
            StackMapFrame::SameLocals1StackItem { offset_delta, stack: read_vtype(b)?, extended: true }
        }
        248..=250 => StackMapFrame::Chop { offset_delta: b.u2()?, chopped: 251 - ty },
        251 => StackMapFrame::Same { offset_delta: b.u2()?, extended: true },
        252..=254 => {
            let offset_delta = b.u2()?;
            let locals = (0..ty - 251).map(|_| read_vtype(b)).collect::<Result<_, _>>()?;
            StackMapFrame::Append { offset_delta, locals }
        }
        255 => {
            let offset_delta = b.u2()?;
            let nl = b.u2()?;
            let locals = (0..nl).map(|_| read_vtype(b)).collect::<Result<_, _>>()?;
            let ns = b.u2()?;
            let stack = (0..ns).map(|_| read_vtype(b)).collect::<Result<_, _>>()?;
            StackMapFrame::Full { offset_delta, locals, stack }
        }
        _ => return Err(malformed(b, format!("reserved stack map frame type {ty}"))),
    })
}

pub(crate) fn write_attributes(out: &mut Vec<u8>, attrs: &[Attribute]) -> Result<(), ClassError> {
    out.u2(count_u16(attrs.len(), "attributes")?);
    for a in attrs {
        write_attribute(out, a)?;
    }
    Ok(())
}

fn write_u2_list(out: &mut Vec<u8>, items: &[u16], what: &str) -> Result<(), ClassError> {
    out.u2(count_u16(items.len(), what)?);
    for &i in items {
        out.u2(i);
    }
    Ok(())
}

fn write_attribute(out: &mut Vec<u8>, a: &Attribute) -> Result<(), ClassError> {
    let mut b: Vec<u8> = Vec::new();
    match &a.body {
        AttributeBody::Code(c) => {
            b.u2(c.max_stack);
            b.u2(c.max_locals);
            let code = code::encode(&c.code)?;
            if code.is_empty() || code.len() >= 65536 {
                return Err(ClassError::InvariantViolation(format!("code length {} out of range", code.len())));
            }
            b.u4(code.len() as u32);
            b.extend_from_slice(&code);
            b.u2(count_u16(c.exception_table.len(), "exception handlers")?);
            for h in &c.exception_table {
                b.u2(h.start_pc);
                b.u2(h.end_pc);
                b.u2(h.handler_pc);
                b.u2(h.catch_type);
            }
            write_attributes(&mut b, &c.attributes)?;
        }
        AttributeBody::ConstantValue(i)
        | AttributeBody::Signature(i)
        | AttributeBody::SourceFile(i)
        | AttributeBody::NestHost(i) => b.u2(*i),
        AttributeBody::Exceptions(l) => write_u2_list(&mut b, l, "exceptions")?,
        AttributeBody::NestMembers(l) => write_u2_list(&mut b, l, "nest members")?,
        AttributeBody::PermittedSubclasses(l) => write_u2_list(&mut b, l, "permitted subclasses")?,
        AttributeBody::InnerClasses(l) => {
            b.u2(count_u16(l.len(), "inner classes")?);
            for ic in l {
                b.u2(ic.inner_class_info_index);
                b.u2(ic.outer_class_info_index);
                b.u2(ic.inner_name_index);
                b.u2(ic.access_flags);
            }
        }
        AttributeBody::EnclosingMethod { class_index, method_index } => {
            b.u2(*class_index);
            b.u2(*method_index);
        }
        AttributeBody::BootstrapMethods(l) => {
            b.u2(count_u16(l.len(), "bootstrap methods")?);
            for m in l {
                b.u2(m.method_ref);
                write_u2_list(&mut b, &m.arguments, "bootstrap arguments")?;
            }
        }
        AttributeBody::RuntimeVisibleAnnotations(l) | AttributeBody::RuntimeInvisibleAnnotations(l) => {
            write_annotations(&mut b, l)?
        }
        AttributeBody::RuntimeVisibleParameterAnnotations(p)
        | AttributeBody::RuntimeInvisibleParameterAnnotations(p) => {
            let n = u8::try_from(p.len())
                .map_err(|_| ClassError::InvariantViolation("too many annotated parameters".into()))?;
            b.u1(n);
            for l in p {
                write_annotations(&mut b, l)?;
            }
        }
        AttributeBody::AnnotationDefault(v) => write_element_value(&mut b, v)?,
        AttributeBody::StackMapTable(frames) => {
            b.u2(count_u16(frames.len(), "stack map frames")?);
            for f in frames {
                write_frame(&mut b, f)?;
            }
        }
        AttributeBody::LocalVariableTable(l) | AttributeBody::LocalVariableTypeTable(l) => {
            b.u2(count_u16(l.len(), "local variables")?);
            for v in l {
                b.u2(v.start_pc);
                b.u2(v.length);
                b.u2(v.name_index);
                b.u2(v.descriptor_index);
                b.u2(v.index);
            }
        }
        AttributeBody::MethodParameters(l) => {
            let n = u8::try_from(l.len())
                .map_err(|_| ClassError::InvariantViolation("too many method parameters".into()))?;
            b.u1(n);
            for p in l {
                b.u2(p.name_index);
                b.u2(p.access_flags);
            }
        }
        AttributeBody::Raw(bytes) => b.extend_from_slice(bytes),
    }
    out.u2(a.name_index);
    out.u4(u32::try_from(b.len()).map_err(|_| ClassError::InvariantViolation("attribute too large".into()))?);
    out.extend_from_slice(&b);
    Ok(())
}

fn write_annotations(b: &mut Vec<u8>, l: &[Annotation]) -> Result<(), ClassError> {
    b.u2(count_u16(l.len(), "annotations")?);
    for a in l {
        write_annotation(b, a)?;
    }
    Ok(())
}

fn write_annotation(b: &mut Vec<u8>, a: &Annotation) -> Result<(), ClassError> {
    b.u2(a.type_index);
    b.u2(count_u16(a.elements.len(), "annotation elements")?);
    for (name, v) in &a.elements {
        b.u2(*name);
        write_element_value(b, v)?;
    }
    Ok(())
}

fn write_element_value(b: &mut Vec<u8>, v: &ElementValue) -> Result<(), ClassError> {
    match v {
        ElementValue::Const { tag, index } => {
            b.u1(*tag);
            b.u2(*index);
        }
        ElementValue::Enum { type_name_index, const_name_index } => {
            b.u1(b'e');
            b.u2(*type_name_index);
            b.u2(*const_name_index);
        }
        ElementValue::Class(i) => {
            b.u1(b'c');
            b.u2(*i);
        }
        ElementValue::Annotation(a) => {
            b.u1(b'@');
            write_annotation(b, a)?;
        }
        ElementValue::Array(l) => {
            b.u1(b'[');
            b.u2(count_u16(l.len(), "array elements")?);
            for v in l {
                write_element_value(b, v)?;
            }
        }
    }
    Ok(())
}

fn write_vtype(b: &mut Vec<u8>, v: &VerificationType) {
    match v {
        VerificationType::Top => b.u1(0),
        VerificationType::Integer => b.u1(1),
        VerificationType::Float => b.u1(2),
        VerificationType::Double => b.u1(3),
        VerificationType::Long => b.u1(4),
        VerificationType::Null => b.u1(5),
        VerificationType::UninitializedThis => b.u1(6),
        VerificationType::Object(i) => {
            b.u1(7);
            b.u2(*i);
        }
        VerificationType::Uninitialized(o) => {
            b.u1(8);
            b.u2(*o);
        }
    }
}

fn write_frame(b: &mut Vec<u8>, f: &StackMapFrame) -> Result<(), ClassError> {
    match f {
        StackMapFrame::Same { offset_delta, extended } => {
            if !extended && *offset_delta < 64 {
                b.u1(*offset_delta as u8);
            } else {
                b.u1(251);
                b.u2(*offset_delta);
            }
        }
        StackMapFrame::SameLocals1StackItem { offset_delta, stack, extended } => {
            if !extended && *offset_delta < 64 {
                b.u1(64 + *offset_delta as u8);
            } else {
                b.u1(247);
                b.u2(*offset_delta);
            }
            write_vtype(b, stack);
        }
        StackMapFrame::Chop { offset_delta, chopped } => {
            if !(1..=3).contains(chopped) {
                return Err(ClassError::InvariantViolation(format!("chop frame of {chopped} locals")));
            }
            b.u1(251 - chopped);
            b.u2(*offset_delta);
        }
        StackMapFrame::Append { offset_delta, locals } => {
            if !(1..=3).contains(&locals.len()) {
                return Err(ClassError::InvariantViolation(format!("append frame of {} locals", locals.len())));
            }
            b.u1(251 + locals.len() as u8);
            b.u2(*offset_delta);
            for v in locals {
                write_vtype(b, v);
            }
        }
        StackMapFrame::Full { offset_delta, locals, stack } => {
            b.u1(255);
            b.u2(*offset_delta);
            b.u2(count_u16(locals.len(), "frame locals")?);
            for v in locals {
                write_vtype(b, v);
            }
            b.u2(count_u16(stack.len(), "frame stack")?);
            for v in stack {
                write_vtype(b, v);
            }
        }
    }
    Ok(())
}
