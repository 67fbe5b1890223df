//! Constant pool entries and the indexed pool that owns them.

use std::collections::HashMap;
use std::fmt;

pub const TAG_UTF8: u8 = 1;
pub const TAG_INTEGER: u8 = 3;
pub const TAG_FLOAT: u8 = 4;
pub const TAG_LONG: u8 = 5;
pub const TAG_DOUBLE: u8 = 6;
pub const TAG_CLASS: u8 = 7;
pub const TAG_STRING: u8 = 8;
pub const TAG_FIELDREF: u8 = 9;
pub const TAG_METHODREF: u8 = 10;
pub const TAG_INTERFACE_METHODREF: u8 = 11;
pub const TAG_NAME_AND_TYPE: u8 = 12;
pub const TAG_METHOD_HANDLE: u8 = 15;
pub const TAG_METHOD_TYPE: u8 = 16;
pub const TAG_DYNAMIC: u8 = 17;
pub const TAG_INVOKE_DYNAMIC: u8 = 18;
pub const TAG_MODULE: u8 = 19;
pub const TAG_PACKAGE: u8 = 20;

// Method handle reference kinds.
pub const REF_GET_FIELD: u8 = 1;
pub const REF_GET_STATIC: u8 = 2;
pub const REF_PUT_FIELD: u8 = 3;
pub const REF_PUT_STATIC: u8 = 4;
pub const REF_INVOKE_VIRTUAL: u8 = 5;
pub const REF_INVOKE_STATIC: u8 = 6;
pub const REF_INVOKE_SPECIAL: u8 = 7;
pub const REF_NEW_INVOKE_SPECIAL: u8 = 8;
pub const REF_INVOKE_INTERFACE: u8 = 9;

/// One constant pool entry. Floating point values are kept as raw IEEE bits
/// so that entries stay `Eq + Hash` and NaN payloads survive a round trip.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Constant {
    Utf8(String),
    Integer(i32),
    Float(u32),
    Long(i64),
    Double(u64),
    Class { name_index: u16 },
    String { string_index: u16 },
    Fieldref { class_index: u16, name_and_type_index: u16 },
    Methodref { class_index: u16, name_and_type_index: u16 },
    InterfaceMethodref { class_index: u16, name_and_type_index: u16 },
    NameAndType { name_index: u16, descriptor_index: u16 },
    MethodHandle { reference_kind: u8, reference_index: u16 },
    MethodType { descriptor_index: u16 },
    Dynamic { bootstrap_method_attr_index: u16, name_and_type_index: u16 },
    InvokeDynamic { bootstrap_method_attr_index: u16, name_and_type_index: u16 },
    Module { name_index: u16 },
    Package { name_index: u16 },
}

impl Constant {
    pub fn tag(&self) -> u8 {
        match self {
            Constant::Utf8(_) => TAG_UTF8,
            Constant::Integer(_) => TAG_INTEGER,
            Constant::Float(_) => TAG_FLOAT,
            Constant::Long(_) => TAG_LONG,
            Constant::Double(_) => TAG_DOUBLE,
            Constant::Class { .. } => TAG_CLASS,
            Constant::String { .. } => TAG_STRING,
            Constant::Fieldref { .. } => TAG_FIELDREF,
            Constant::Methodref { .. } => TAG_METHODREF,
            Constant::InterfaceMethodref { .. } => TAG_INTERFACE_METHODREF,
            Constant::NameAndType { .. } => TAG_NAME_AND_TYPE,
            Constant::MethodHandle { .. } => TAG_METHOD_HANDLE,
            Constant::MethodType { .. } => TAG_METHOD_TYPE,
            Constant::Dynamic { .. } => TAG_DYNAMIC,
            Constant::InvokeDynamic { .. } => TAG_INVOKE_DYNAMIC,
            Constant::Module { .. } => TAG_MODULE,
            Constant::Package { .. } => TAG_PACKAGE,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        tag_name(self.tag())
    }

    /// Long and Double occupy two pool slots.
    pub fn is_wide(&self) -> bool {
        matches!(self, Constant::Long(_) | Constant::Double(_))
    }

    /// Pool indices this entry refers to, each paired with the kind the
    /// referenced entry must have.
    pub fn references(&self) -> Vec<(u16, PoolKind)> {
        match *self {
            Constant::Class { name_index } => vec![(name_index, PoolKind::Utf8)],
            Constant::String { string_index } => vec![(string_index, PoolKind::Utf8)],
            Constant::Fieldref { class_index, name_and_type_index }
            | Constant::Methodref { class_index, name_and_type_index }
            | Constant::InterfaceMethodref { class_index, name_and_type_index } => vec![
                (class_index, PoolKind::Class),
                (name_and_type_index, PoolKind::NameAndType),
            ],
            Constant::NameAndType { name_index, descriptor_index } => {
                vec![(name_index, PoolKind::Utf8), (descriptor_index, PoolKind::Utf8)]
            }
            Constant::MethodHandle { reference_kind, reference_index } => {
                vec![(reference_index, PoolKind::handle_target(reference_kind))]
            }
            Constant::MethodType { descriptor_index } => vec![(descriptor_index, PoolKind::Utf8)],
            Constant::Dynamic { name_and_type_index, .. }
            | Constant::InvokeDynamic { name_and_type_index, .. } => {
                vec![(name_and_type_index, PoolKind::NameAndType)]
            }
            Constant::Module { name_index } | Constant::Package { name_index } => {
                vec![(name_index, PoolKind::Utf8)]
            }
            Constant::Utf8(_)
            | Constant::Integer(_)
            | Constant::Float(_)
            | Constant::Long(_)
            | Constant::Double(_) => Vec::new(),
        }
    }

    pub(crate) fn references_mut(&mut self) -> Vec<(&mut u16, PoolKind)> {
        match self {
            Constant::Class { name_index } => vec![(name_index, PoolKind::Utf8)],
            Constant::String { string_index } => vec![(string_index, PoolKind::Utf8)],
            Constant::Fieldref { class_index, name_and_type_index }
            | Constant::Methodref { class_index, name_and_type_index }
            | Constant::InterfaceMethodref { class_index, name_and_type_index } => vec![
                (class_index, PoolKind::Class),
                (name_and_type_index, PoolKind::NameAndType),
            ],
            Constant::NameAndType { name_index, descriptor_index } => {
                vec![(name_index, PoolKind::Utf8), (descriptor_index, PoolKind::Utf8)]
            }
            Constant::MethodHandle { reference_kind, reference_index } => {
                let kind = PoolKind::handle_target(*reference_kind);
                vec![(reference_index, kind)]
            }
            Constant::MethodType { descriptor_index } => vec![(descriptor_index, PoolKind::Utf8)],
            Constant::Dynamic { name_and_type_index, .. }
            | Constant::InvokeDynamic { name_and_type_index, .. } => {
                vec![(name_and_type_index, PoolKind::NameAndType)]
            }
            Constant::Module { name_index } | Constant::Package { name_index } => {
                vec![(name_index, PoolKind::Utf8)]
            }
            Constant::Utf8(_)
            | Constant::Integer(_)
            | Constant::Float(_)
            | Constant::Long(_)
            | Constant::Double(_) => Vec::new(),
        }
    }
}

pub fn tag_name(tag: u8) -> &'static str {
    match tag {
        TAG_UTF8 => "Utf8",
        TAG_INTEGER => "Integer",
        TAG_FLOAT => "Float",
        TAG_LONG => "Long",
        TAG_DOUBLE => "Double",
        TAG_CLASS => "Class",
        TAG_STRING => "String",
        TAG_FIELDREF => "Fieldref",
        TAG_METHODREF => "Methodref",
        TAG_INTERFACE_METHODREF => "InterfaceMethodref",
        TAG_NAME_AND_TYPE => "NameAndType",
        TAG_METHOD_HANDLE => "MethodHandle",
        TAG_METHOD_TYPE => "MethodType",
        TAG_DYNAMIC => "Dynamic",
        TAG_INVOKE_DYNAMIC => "InvokeDynamic",
        TAG_MODULE => "Module",
        TAG_PACKAGE => "Package",
        _ => "unknown",
    }
}

/// What kind of entry a reference site expects to find at its index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoolKind {
    Utf8,
    Class,
    String,
    NameAndType,
    Fieldref,
    Methodref,
    InterfaceMethodref,
    /// Methodref or InterfaceMethodref (invokestatic/invokespecial since v52).
    AnyMethodref,
    MethodHandle,
    MethodType,
    InvokeDynamic,
    /// Single-slot ldc operand.
    Loadable,
    /// ldc2_w operand.
    WideLoadable,
    /// ConstantValue attribute operand.
    ConstantValue,
    /// Bootstrap method argument.
    BootstrapArgument,
    Integer,
    Float,
    Long,
    Double,
}

impl PoolKind {
    fn handle_target(reference_kind: u8) -> PoolKind {
        match reference_kind {
            REF_GET_FIELD..=REF_PUT_STATIC => PoolKind::Fieldref,
            REF_INVOKE_VIRTUAL | REF_NEW_INVOKE_SPECIAL => PoolKind::Methodref,
            REF_INVOKE_INTERFACE => PoolKind::InterfaceMethodref,
            _ => PoolKind::AnyMethodref,
        }
    }

    pub fn accepts(self, c: &Constant) -> bool {
        use Constant as C;
        match self {
            PoolKind::Utf8 => matches!(c, C::Utf8(_)),
            PoolKind::Class => matches!(c, C::Class { .. }),
            PoolKind::String => matches!(c, C::String { .. }),
            PoolKind::NameAndType => matches!(c, C::NameAndType { .. }),
            PoolKind::Fieldref => matches!(c, C::Fieldref { .. }),
            PoolKind::Methodref => matches!(c, C::Methodref { .. }),
            PoolKind::InterfaceMethodref => matches!(c, C::InterfaceMethodref { .. }),
            PoolKind::AnyMethodref => {
                matches!(c, C::Methodref { .. } | C::InterfaceMethodref { .. })
            }
            PoolKind::MethodHandle => matches!(c, C::MethodHandle { .. }),
            PoolKind::MethodType => matches!(c, C::MethodType { .. }),
            PoolKind::InvokeDynamic => matches!(c, C::InvokeDynamic { .. }),
            PoolKind::Loadable => matches!(
                c,
                C::Integer(_)
                    | C::Float(_)
                    | C::String { .. }
                    | C::Class { .. }
                    | C::MethodType { .. }
                    | C::MethodHandle { .. }
                    | C::Dynamic { .. }
            ),
            PoolKind::WideLoadable => matches!(c, C::Long(_) | C::Double(_) | C::Dynamic { .. }),
            PoolKind::ConstantValue => matches!(
                c,
                C::Integer(_) | C::Float(_) | C::Long(_) | C::Double(_) | C::String { .. }
            ),
            PoolKind::BootstrapArgument => !matches!(
                c,
                C::Utf8(_)
                    | C::NameAndType { .. }
                    | C::Fieldref { .. }
                    | C::Methodref { .. }
                    | C::InterfaceMethodref { .. }
                    | C::InvokeDynamic { .. }
                    | C::Module { .. }
                    | C::Package { .. }
            ),
            PoolKind::Integer => matches!(c, C::Integer(_)),
            PoolKind::Float => matches!(c, C::Float(_)),
            PoolKind::Long => matches!(c, C::Long(_)),
            PoolKind::Double => matches!(c, C::Double(_)),
        }
    }
}

impl fmt::Display for PoolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PoolKind::Utf8 => "Utf8",
            PoolKind::Class => "Class",
            PoolKind::String => "String",
            PoolKind::NameAndType => "NameAndType",
            PoolKind::Fieldref => "Fieldref",
            PoolKind::Methodref => "Methodref",
            PoolKind::InterfaceMethodref => "InterfaceMethodref",
            PoolKind::AnyMethodref => "Methodref or InterfaceMethodref",
            PoolKind::MethodHandle => "MethodHandle",
            PoolKind::MethodType => "MethodType",
            PoolKind::InvokeDynamic => "InvokeDynamic",
            PoolKind::Loadable => "loadable constant",
            PoolKind::WideLoadable => "Long or Double",
            PoolKind::ConstantValue => "constant value",
            PoolKind::BootstrapArgument => "bootstrap argument",
            PoolKind::Integer => "Integer",
            PoolKind::Float => "Float",
            PoolKind::Long => "Long",
            PoolKind::Double => "Double",
        };
        f.write_str(s)
    }
}

/// A symbolic member reference resolved out of the pool.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MemberRef<'a> {
    pub owner: &'a str,
    pub name: &'a str,
    pub descriptor: &'a str,
}

/// The constant pool. Slot 0 and the slot following every Long/Double are
/// unusable and stored as `None`.
#[derive(Clone, Default)]
pub struct ConstantPool {
    entries: Vec<Option<Constant>>,
    lookup: HashMap<Constant, u16>,
}

impl PartialEq for ConstantPool {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl Eq for ConstantPool {}

impl fmt::Debug for ConstantPool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut map = f.debug_map();
        for (i, c) in self.iter() {
            map.entry(&i, c);
        }
        map.finish()
    }
}

impl ConstantPool {
    pub fn new() -> Self {
        ConstantPool { entries: vec![None], lookup: HashMap::new() }
    }

    /// The `constant_pool_count` value: one more than the highest slot.
    pub fn count(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, index: u16) -> Option<&Constant> {
        self.entries.get(index as usize).and_then(Option::as_ref)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u16, &Constant)> {
        self.entries
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.as_ref().map(|c| (i as u16, c)))
    }

    /// Appends without deduplication (used by the reader so that indices
    /// match the input exactly).
    ///
    /// # Panics
    /// If the pool would exceed 65535 slots.
    pub fn push(&mut self, constant: Constant) -> u16 {
        let index = self.entries.len();
        let width = if constant.is_wide() { 2 } else { 1 };
        assert!(index + width <= u16::MAX as usize, "constant pool overflow");
        let index = index as u16;
        self.lookup.entry(constant.clone()).or_insert(index);
        let wide = constant.is_wide();
        self.entries.push(Some(constant));
        if wide {
            self.entries.push(None);
        }
        index
    }

    /// Returns the index of an equal entry, appending one if none exists.
    ///
    /// # Panics
    /// If the pool would exceed 65535 slots.
    pub fn intern(&mut self, constant: Constant) -> u16 {
        if let Some(&i) = self.lookup.get(&constant) {
            return i;
        }
        self.push(constant)
    }

    pub fn intern_utf8(&mut self, s: &str) -> u16 {
        self.intern(Constant::Utf8(s.to_owned()))
    }

    pub fn intern_class(&mut self, binary_name: &str) -> u16 {
        let name_index = self.intern_utf8(binary_name);
        self.intern(Constant::Class { name_index })
    }

    pub fn intern_string(&mut self, s: &str) -> u16 {
        let string_index = self.intern_utf8(s);
        self.intern(Constant::String { string_index })
    }

    pub fn intern_integer(&mut self, v: i32) -> u16 {
        self.intern(Constant::Integer(v))
    }

    pub fn intern_long(&mut self, v: i64) -> u16 {
        self.intern(Constant::Long(v))
    }

    pub fn intern_name_and_type(&mut self, name: &str, descriptor: &str) -> u16 {
        let name_index = self.intern_utf8(name);
        let descriptor_index = self.intern_utf8(descriptor);
        self.intern(Constant::NameAndType { name_index, descriptor_index })
    }

    pub fn intern_fieldref(&mut self, owner: &str, name: &str, descriptor: &str) -> u16 {
        let class_index = self.intern_class(owner);
        let name_and_type_index = self.intern_name_and_type(name, descriptor);
        self.intern(Constant::Fieldref { class_index, name_and_type_index })
    }

    pub fn intern_methodref(&mut self, owner: &str, name: &str, descriptor: &str) -> u16 {
        let class_index = self.intern_class(owner);
        let name_and_type_index = self.intern_name_and_type(name, descriptor);
        self.intern(Constant::Methodref { class_index, name_and_type_index })
    }

    pub fn intern_interface_methodref(&mut self, owner: &str, name: &str, descriptor: &str) -> u16 {
        let class_index = self.intern_class(owner);
        let name_and_type_index = self.intern_name_and_type(name, descriptor);
        self.intern(Constant::InterfaceMethodref { class_index, name_and_type_index })
    }

    pub fn intern_method_handle(&mut self, reference_kind: u8, reference_index: u16) -> u16 {
        self.intern(Constant::MethodHandle { reference_kind, reference_index })
    }

    pub fn intern_method_type(&mut self, descriptor: &str) -> u16 {
        let descriptor_index = self.intern_utf8(descriptor);
        self.intern(Constant::MethodType { descriptor_index })
    }

    pub fn intern_invoke_dynamic(&mut self, bootstrap: u16, name: &str, descriptor: &str) -> u16 {
        let name_and_type_index = self.intern_name_and_type(name, descriptor);
        self.intern(Constant::InvokeDynamic {
            bootstrap_method_attr_index: bootstrap,
            name_and_type_index,
        })
    }

    pub fn utf8(&self, index: u16) -> Option<&str> {
        match self.get(index)? {
            Constant::Utf8(s) => Some(s),
            _ => None,
        }
    }

    pub fn class_name(&self, index: u16) -> Option<&str> {
        match self.get(index)? {
            Constant::Class { name_index } => self.utf8(*name_index),
            _ => None,
        }
    }

    pub fn string(&self, index: u16) -> Option<&str> {
        match self.get(index)? {
            Constant::String { string_index } => self.utf8(*string_index),
            _ => None,
        }
    }

    pub fn name_and_type(&self, index: u16) -> Option<(&str, &str)> {
        match self.get(index)? {
            Constant::NameAndType { name_index, descriptor_index } => {
                Some((self.utf8(*name_index)?, self.utf8(*descriptor_index)?))
            }
            _ => None,
        }
    }

    /// Resolves a Fieldref, Methodref or InterfaceMethodref.
    pub fn member_ref(&self, index: u16) -> Option<MemberRef<'_>> {
        match self.get(index)? {
            Constant::Fieldref { class_index, name_and_type_index }
            | Constant::Methodref { class_index, name_and_type_index }
            | Constant::InterfaceMethodref { class_index, name_and_type_index } => {
                let owner = self.class_name(*class_index)?;
                let (name, descriptor) = self.name_and_type(*name_and_type_index)?;
                Some(MemberRef { owner, name, descriptor })
            }
            _ => None,
        }
    }

    /// Rebuilds the pool keeping only `keep`ed slots, in their original
    /// relative order. Returns the new pool and an old-to-new index map
    /// (0 for dropped slots). Indices only ever shrink, so one-byte ldc
    /// operands stay encodable.
    pub(crate) fn retain_slots(&self, keep: &[bool]) -> (ConstantPool, Vec<u16>) {
        let mut remap = vec![0u16; self.entries.len()];
        let mut next = 1usize;
        for (i, c) in self.iter() {
            if keep.get(i as usize).copied().unwrap_or(false) {
                remap[i as usize] = next as u16;
                next += if c.is_wide() { 2 } else { 1 };
            }
        }
        let mut pool = ConstantPool::new();
        for (i, c) in self.iter() {
            if remap[i as usize] == 0 {
                continue;
            }
            let mut c = c.clone();
            for (idx, _) in c.references_mut() {
                *idx = remap[*idx as usize];
            }
            pool.push(c);
        }
        (pool, remap)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intern_deduplicates_in_first_use_order() {
        let mut pool = ConstantPool::new();
        let a = pool.intern_class("Abstract/Car");
        let b = pool.intern_utf8("Abstract/Car");
        let c = pool.intern_class("Abstract/Car");
        assert_eq!(b, 1);
        assert_eq!(a, 2);
        assert_eq!(a, c);
        assert_eq!(pool.count(), 3);
    }

    #[test]
    fn wide_entries_take_two_slots() {
        let mut pool = ConstantPool::new();
        let l = pool.intern_long(7);
        let u = pool.intern_utf8("x");
        assert_eq!(l, 1);
        assert_eq!(u, 3);
        assert!(pool.get(2).is_none());
    }

    #[test]
    fn member_ref_resolves_through_name_and_type() {
        let mut pool = ConstantPool::new();
        let i = pool.intern_methodref("Abstract/Car", "engine", "()V");
        let m = pool.member_ref(i).unwrap();
        assert_eq!(m.owner, "Abstract/Car");
        assert_eq!(m.name, "engine");
        assert_eq!(m.descriptor, "()V");
    }

    #[test]
    fn retain_slots_renumbers_references() {
        let mut pool = ConstantPool::new();
        pool.intern_utf8("unused");
        let cls = pool.intern_class("A");
        let mut keep = vec![false; pool.count()];
        keep[cls as usize] = true;
        keep[pool.intern_utf8("A") as usize] = true;
        let (compact, remap) = pool.retain_slots(&keep);
        assert_eq!(compact.count(), 3);
        assert_eq!(compact.class_name(remap[cls as usize]), Some("A"));
    }
}
