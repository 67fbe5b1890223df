//! JVM class files: parsing, emission, and translation of binary
//! descriptors into the source-like names used by ground truths.

mod attribute;
mod builder;
mod bytes;
pub mod code;
mod constant;
pub mod descriptor;
mod reader;
mod refs;
mod visit;
mod writer;

pub use attribute::{
    Annotation, Attribute, AttributeBody, BootstrapMethod, CodeAttribute, ElementValue,
    ExceptionHandler, InnerClass, LocalVariable, MethodParameter, StackMapFrame, VerificationType,
};
pub use builder::{AnnotationValue, BootstrapArg, ClassBuilder, CodeBuilder, Label, Target};
pub use code::{Insn, Operand};
pub use constant::*;
pub use reader::parse_class;
pub use refs::{class_ref_of, field_ref_of, method_ref_of, ConstructRef, Level};
pub use visit::Site;
pub use writer::emit_class;

use thiserror::Error;

pub const MAGIC: u32 = 0xCAFE_BABE;
/// Version written for generated fixtures (Java 8).
pub const FIXTURE_MAJOR_VERSION: u16 = 52;
pub const MIN_MAJOR_VERSION: u16 = 45;
pub const MAX_MAJOR_VERSION: u16 = 61;

pub mod access {
    pub const PUBLIC: u16 = 0x0001;
    pub const PRIVATE: u16 = 0x0002;
    pub const PROTECTED: u16 = 0x0004;
    pub const STATIC: u16 = 0x0008;
    pub const FINAL: u16 = 0x0010;
    pub const SUPER: u16 = 0x0020;
    pub const SYNCHRONIZED: u16 = 0x0020;
    pub const VOLATILE: u16 = 0x0040;
    pub const BRIDGE: u16 = 0x0040;
    pub const TRANSIENT: u16 = 0x0080;
    pub const VARARGS: u16 = 0x0080;
    pub const NATIVE: u16 = 0x0100;
    pub const INTERFACE: u16 = 0x0200;
    pub const ABSTRACT: u16 = 0x0400;
    pub const STRICT: u16 = 0x0800;
    pub const SYNTHETIC: u16 = 0x1000;
    pub const ANNOTATION: u16 = 0x2000;
    pub const ENUM: u16 = 0x4000;
    pub const MODULE: u16 = 0x8000;
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassError {
    #[error("not a class file: magic 0x{0:08X}")]
    BadMagic(u32),
    #[error("truncated input: need {needed} byte(s) at offset {offset}")]
    TruncatedInput { offset: usize, needed: usize },
    #[error("dangling constant pool index #{index} in {site}: {reason}")]
    DanglingPoolIndex { index: u16, site: String, reason: String },
    #[error("unsupported class file major version {0} (supported {MIN_MAJOR_VERSION}..={MAX_MAJOR_VERSION})")]
    UnsupportedMajorVersion(u16),
    #[error("malformed class file at offset {offset}: {reason}")]
    Malformed { offset: usize, reason: String },
    #[error("malformed descriptor {0:?}")]
    MalformedDescriptor(String),
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldMember {
    pub access_flags: u16,
    pub name_index: u16,
    pub descriptor_index: u16,
    pub attributes: Vec<Attribute>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodMember {
    pub access_flags: u16,
    pub name_index: u16,
    pub descriptor_index: u16,
    pub attributes: Vec<Attribute>,
}

/// Shared accessors for fields and methods.
pub trait Member {
    fn access_flags(&self) -> u16;
    fn name_index(&self) -> u16;
    fn descriptor_index(&self) -> u16;
    fn attributes(&self) -> &[Attribute];

    fn name<'p>(&self, pool: &'p ConstantPool) -> &'p str {
        pool.utf8(self.name_index()).unwrap_or("")
    }

    fn descriptor<'p>(&self, pool: &'p ConstantPool) -> &'p str {
        pool.utf8(self.descriptor_index()).unwrap_or("")
    }

    fn is_static(&self) -> bool {
        self.access_flags() & access::STATIC != 0
    }
}

macro_rules! impl_member {
    ($t:ty) => {
        impl Member for $t {
            fn access_flags(&self) -> u16 {
                self.access_flags
            }
            fn name_index(&self) -> u16 {
                self.name_index
            }
            fn descriptor_index(&self) -> u16 {
                self.descriptor_index
            }
            fn attributes(&self) -> &[Attribute] {
                &self.attributes
            }
        }
    };
}

impl_member!(FieldMember);
impl_member!(MethodMember);

impl MethodMember {
    pub fn code(&self) -> Option<&CodeAttribute> {
        self.attributes.iter().find_map(|a| match &a.body {
            AttributeBody::Code(c) => Some(c),
            _ => None,
        })
    }

    pub fn code_mut(&mut self) -> Option<&mut CodeAttribute> {
        self.attributes.iter_mut().find_map(|a| match &mut a.body {
            AttributeBody::Code(c) => Some(c),
            _ => None,
        })
    }

    pub fn is_abstract(&self) -> bool {
        self.access_flags & access::ABSTRACT != 0
    }

    pub fn is_native(&self) -> bool {
        self.access_flags & access::NATIVE != 0
    }
}

/// A parsed class file. Members and attributes refer into `constant_pool`
/// by index, exactly as in the binary form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassUnit {
    pub minor_version: u16,
    pub major_version: u16,
    pub constant_pool: ConstantPool,
    pub access_flags: u16,
    pub this_class: u16,
    /// 0 only for `java/lang/Object`.
    pub super_class: u16,
    pub interfaces: Vec<u16>,
    pub fields: Vec<FieldMember>,
    pub methods: Vec<MethodMember>,
    pub attributes: Vec<Attribute>,
}

impl ClassUnit {
    pub fn binary_name(&self) -> &str {
        self.constant_pool.class_name(self.this_class).unwrap_or("")
    }

    pub fn superclass(&self) -> Option<&str> {
        if self.super_class == 0 {
            None
        } else {
            self.constant_pool.class_name(self.super_class)
        }
    }

    pub fn interface_names(&self) -> impl Iterator<Item = &str> {
        self.interfaces.iter().filter_map(|&i| self.constant_pool.class_name(i))
    }

    pub fn is_interface(&self) -> bool {
        self.access_flags & access::INTERFACE != 0
    }

    pub fn is_abstract(&self) -> bool {
        self.access_flags & access::ABSTRACT != 0
    }

    pub fn is_annotation(&self) -> bool {
        self.access_flags & access::ANNOTATION != 0
    }

    pub fn find_method(&self, name: &str, descriptor: &str) -> Option<&MethodMember> {
        self.methods
            .iter()
            .find(|m| m.name(&self.constant_pool) == name && m.descriptor(&self.constant_pool) == descriptor)
    }

    pub fn find_field(&self, name: &str, descriptor: &str) -> Option<&FieldMember> {
        self.fields
            .iter()
            .find(|f| f.name(&self.constant_pool) == name && f.descriptor(&self.constant_pool) == descriptor)
    }

    /// Checks every pool reference and the member invariants.
    pub fn validate(&self) -> Result<(), ClassError> {
        visit::validate(self)
    }

    /// True when some attribute is kept as raw bytes that may contain pool
    /// indices, which rules out safe compaction.
    pub fn has_opaque_attributes(&self) -> bool {
        visit::has_opaque_attributes(self)
    }

    /// Drops every pool entry no longer reachable from the class structure
    /// and rewrites all indices. A class with opaque attributes keeps its
    /// pool as is.
    pub fn compact_constant_pool(&mut self) {
        visit::compact(self)
    }

    /// Visits every pool index held by the class structure (not by pool
    /// entries themselves), in emission order.
    pub fn for_each_pool_ref(&mut self, f: &mut dyn FnMut(&Site, &mut u16, PoolKind)) {
        visit::visit_refs(self, f)
    }
}
