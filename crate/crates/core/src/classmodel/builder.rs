//! Programmatic class construction for fixtures.
//!
//! `CodeBuilder` computes `max_stack`/`max_locals` and emits a
//! StackMapTable. Frames at branch targets restate the parameter locals
//! only, unless the label was given explicit locals with
//! [`CodeBuilder::frame_locals`], in which case every frame of the method is
//! written as a full frame.

use std::collections::BTreeMap;

use super::attribute::*;
use super::code::{op, Insn, Operand};
use super::constant::*;
use super::descriptor::{parse_field_descriptor, parse_method_descriptor, BaseType, FieldType};
use super::{access, emit_class, ClassError, ClassUnit, FieldMember, MethodMember, FIXTURE_MAJOR_VERSION};

const METAFACTORY_DESC: &str = "(Ljava/lang/invoke/MethodHandles$Lookup;Ljava/lang/String;Ljava/lang/invoke/MethodType;Ljava/lang/invoke/MethodType;Ljava/lang/invoke/MethodHandle;Ljava/lang/invoke/MethodType;)Ljava/lang/invoke/CallSite;";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Label(usize);

/// Annotation element values accepted by the builder.
#[derive(Debug, Clone)]
pub enum AnnotationValue {
    Int(i32),
    Str(String),
    /// Class literal, as a return descriptor (`LFoo;`, `V`).
    Class(String),
    Enum { type_desc: String, constant: String },
    Array(Vec<AnnotationValue>),
}

#[derive(Debug, Clone, Copy)]
pub enum Target {
    Class,
    Field(usize),
    Method(usize),
}

#[derive(Default)]
struct MemberExtras {
    signature: Option<u16>,
    exceptions: Vec<u16>,
    visible: Vec<Annotation>,
    invisible: Vec<Annotation>,
    default_value: Option<ElementValue>,
    constant_value: Option<u16>,
}

pub struct ClassBuilder {
    pool: ConstantPool,
    access_flags: u16,
    this_class: u16,
    super_class: u16,
    interfaces: Vec<u16>,
    fields: Vec<(FieldMember, MemberExtras)>,
    methods: Vec<(MethodMember, MemberExtras)>,
    code: BTreeMap<usize, CodeAttribute>,
    bootstrap: Vec<BootstrapMethod>,
    class_extras: MemberExtras,
    source_file: Option<u16>,
    inner_classes: Vec<InnerClass>,
    enclosing: Option<(u16, u16)>,
}

impl ClassBuilder {
    /// A public class extending `super_name`.
    pub fn new(name: &str, super_name: &str) -> Self {
        let mut pool = ConstantPool::new();
        let this_class = pool.intern_class(name);
        let super_class = pool.intern_class(super_name);
        ClassBuilder {
            pool,
            access_flags: access::PUBLIC | access::SUPER,
            this_class,
            super_class,
            interfaces: Vec::new(),
            fields: Vec::new(),
            methods: Vec::new(),
            code: BTreeMap::new(),
            bootstrap: Vec::new(),
            class_extras: MemberExtras::default(),
            source_file: None,
            inner_classes: Vec::new(),
            enclosing: None,
        }
    }

    /// A public interface.
    pub fn interface(name: &str) -> Self {
        let mut b = ClassBuilder::new(name, "java/lang/Object");
        b.access_flags = access::PUBLIC | access::INTERFACE | access::ABSTRACT;
        b
    }

    pub fn name(&self) -> &str {
        self.pool.class_name(self.this_class).unwrap_or("")
    }

    pub fn pool(&mut self) -> &mut ConstantPool {
        &mut self.pool
    }

    pub fn access(&mut self, flags: u16) -> &mut Self {
        self.access_flags = flags;
        self
    }

    pub fn access_flags(&self) -> u16 {
        self.access_flags
    }

    pub fn implements(&mut self, iface: &str) -> &mut Self {
        let i = self.pool.intern_class(iface);
        self.interfaces.push(i);
        self
    }

    pub fn source_file(&mut self, name: &str) -> &mut Self {
        self.source_file = Some(self.pool.intern_utf8(name));
        self
    }

    /// Adds an InnerClasses entry. `outer`/`simple` are `None` for local
    /// and anonymous classes.
    pub fn inner_class(&mut self, inner: &str, outer: Option<&str>, simple: Option<&str>, flags: u16) -> &mut Self {
        let inner_class_info_index = self.pool.intern_class(inner);
        let outer_class_info_index = outer.map_or(0, |o| self.pool.intern_class(o));
        let inner_name_index = simple.map_or(0, |s| self.pool.intern_utf8(s));
        self.inner_classes.push(InnerClass {
            inner_class_info_index,
            outer_class_info_index,
            inner_name_index,
            access_flags: flags,
        });
        self
    }

    pub fn enclosing_method(&mut self, class: &str, method: Option<(&str, &str)>) -> &mut Self {
        let c = self.pool.intern_class(class);
        let m = method.map_or(0, |(n, d)| self.pool.intern_name_and_type(n, d));
        self.enclosing = Some((c, m));
        self
    }

    pub fn field(&mut self, flags: u16, name: &str, desc: &str) -> usize {
        let member = FieldMember {
            access_flags: flags,
            name_index: self.pool.intern_utf8(name),
            descriptor_index: self.pool.intern_utf8(desc),
            attributes: Vec::new(),
        };
        self.fields.push((member, MemberExtras::default()));
        self.fields.len() - 1
    }

    /// A static final field initialised through ConstantValue.
    pub fn constant_field(&mut self, flags: u16, name: &str, desc: &str, value: Constant) -> usize {
        let idx = self.field(flags | access::STATIC | access::FINAL, name, desc);
        let v = self.pool.intern(value);
        self.fields[idx].1.constant_value = Some(v);
        idx
    }

    /// Adds a method with a body produced by `body`.
    pub fn method(&mut self, flags: u16, name: &str, desc: &str, body: impl FnOnce(&mut CodeBuilder)) -> usize {
        let idx = self.declare_method(flags, name, desc);
        let this = (flags & access::STATIC == 0).then_some(self.this_class);
        let mut cb = CodeBuilder::new(&mut self.pool, &mut self.bootstrap, this, name == "<init>", desc);
        body(&mut cb);
        let code = cb.finish();
        self.code.insert(idx, code);
        idx
    }

    pub fn abstract_method(&mut self, flags: u16, name: &str, desc: &str) -> usize {
        self.declare_method(flags | access::ABSTRACT, name, desc)
    }

    fn declare_method(&mut self, flags: u16, name: &str, desc: &str) -> usize {
        let member = MethodMember {
            access_flags: flags,
            name_index: self.pool.intern_utf8(name),
            descriptor_index: self.pool.intern_utf8(desc),
            attributes: Vec::new(),
        };
        self.methods.push((member, MemberExtras::default()));
        self.methods.len() - 1
    }

    /// `public <init>()V` calling the superclass no-arg constructor.
    pub fn default_constructor(&mut self) -> usize {
        let sup = self.pool.class_name(self.super_class).unwrap_or("java/lang/Object").to_owned();
        self.method(access::PUBLIC, "<init>", "()V", |c| {
            c.aload(0);
            c.invokespecial(&sup, "<init>", "()V");
            c.op(op::RETURN);
        })
    }

    pub fn signature(&mut self, target: Target, signature: &str) -> &mut Self {
        let s = self.pool.intern_utf8(signature);
        self.extras(target).signature = Some(s);
        self
    }

    pub fn throws(&mut self, method: usize, classes: &[&str]) -> &mut Self {
        let idx: Vec<u16> = classes.iter().map(|c| self.pool.intern_class(c)).collect();
        self.methods[method].1.exceptions.extend(idx);
        self
    }

    /// Attaches an annotation; `type_desc` is a field descriptor such as
    /// `Lpkg/Marker;`.
    pub fn annotate(
        &mut self,
        target: Target,
        type_desc: &str,
        visible: bool,
        elements: &[(&str, AnnotationValue)],
    ) -> &mut Self {
        let ann = self.annotation(type_desc, elements);
        let extras = self.extras(target);
        if visible {
            extras.visible.push(ann);
        } else {
            extras.invisible.push(ann);
        }
        self
    }

    /// Marks an annotation type as retained at run time.
    pub fn runtime_retention(&mut self) -> &mut Self {
        self.annotate(
            Target::Class,
            "Ljava/lang/annotation/Retention;",
            true,
            &[(
                "value",
                AnnotationValue::Enum {
                    type_desc: "Ljava/lang/annotation/RetentionPolicy;".into(),
                    constant: "RUNTIME".into(),
                },
            )],
        )
    }

    pub fn annotation_default(&mut self, method: usize, value: AnnotationValue) -> &mut Self {
        let v = self.element_value(&value);
        self.methods[method].1.default_value = Some(v);
        self
    }

    fn annotation(&mut self, type_desc: &str, elements: &[(&str, AnnotationValue)]) -> Annotation {
        let type_index = self.pool.intern_utf8(type_desc);
        let elements = elements
            .iter()
            .map(|(n, v)| (self.pool.intern_utf8(n), self.element_value(v)))
            .collect();
        Annotation { type_index, elements }
    }

    fn element_value(&mut self, v: &AnnotationValue) -> ElementValue {
        match v {
            AnnotationValue::Int(i) => ElementValue::Const { tag: b'I', index: self.pool.intern_integer(*i) },
            AnnotationValue::Str(s) => ElementValue::Const { tag: b's', index: self.pool.intern_utf8(s) },
            AnnotationValue::Class(d) => ElementValue::Class(self.pool.intern_utf8(d)),
            AnnotationValue::Enum { type_desc, constant } => ElementValue::Enum {
                type_name_index: self.pool.intern_utf8(type_desc),
                const_name_index: self.pool.intern_utf8(constant),
            },
            AnnotationValue::Array(items) => ElementValue::Array(items.iter().map(|i| self.element_value(i)).collect()),
        }
    }

    fn extras(&mut self, target: Target) -> &mut MemberExtras {
        match target {
            Target::Class => &mut self.class_extras,
            Target::Field(i) => &mut self.fields[i].1,
            Target::Method(i) => &mut self.methods[i].1,
        }
    }

    fn attr(&mut self, name: &str, body: AttributeBody) -> Attribute {
        Attribute { name_index: self.pool.intern_utf8(name), body }
    }

    fn extra_attrs(&mut self, x: MemberExtras, out: &mut Vec<Attribute>) {
        if let Some(v) = x.constant_value {
            out.push(self.attr("ConstantValue", AttributeBody::ConstantValue(v)));
        }
        if !x.exceptions.is_empty() {
            out.push(self.attr("Exceptions", AttributeBody::Exceptions(x.exceptions)));
        }
        if let Some(s) = x.signature {
            out.push(self.attr("Signature", AttributeBody::Signature(s)));
        }
        if !x.visible.is_empty() {
            out.push(self.attr("RuntimeVisibleAnnotations", AttributeBody::RuntimeVisibleAnnotations(x.visible)));
        }
        if !x.invisible.is_empty() {
            out.push(
                self.attr("RuntimeInvisibleAnnotations", AttributeBody::RuntimeInvisibleAnnotations(x.invisible)),
            );
        }
        if let Some(v) = x.default_value {
            out.push(self.attr("AnnotationDefault", AttributeBody::AnnotationDefault(v)));
        }
    }

    pub fn build(mut self) -> Result<ClassUnit, ClassError> {
        let mut fields = Vec::new();
        for (mut f, x) in std::mem::take(&mut self.fields) {
            self.extra_attrs(x, &mut f.attributes);
            fields.push(f);
        }
        let mut methods = Vec::new();
        for (i, (mut m, x)) in std::mem::take(&mut self.methods).into_iter().enumerate() {
            if let Some(mut code) = self.code.remove(&i) {
                let frames = code.attributes.len();
                for a in &mut code.attributes {
                    a.name_index = self.pool.intern_utf8("StackMapTable");
                }
                debug_assert!(frames <= 1);
                m.attributes.push(self.attr("Code", AttributeBody::Code(code)));
            }
            self.extra_attrs(x, &mut m.attributes);
            methods.push(m);
        }
        let mut attributes = Vec::new();
        if let Some(s) = self.source_file {
            attributes.push(self.attr("SourceFile", AttributeBody::SourceFile(s)));
        }
        if !self.inner_classes.is_empty() {
            let ic = std::mem::take(&mut self.inner_classes);
            attributes.push(self.attr("InnerClasses", AttributeBody::InnerClasses(ic)));
        }
        if let Some((class_index, method_index)) = self.enclosing {
            attributes.push(self.attr("EnclosingMethod", AttributeBody::EnclosingMethod { class_index, method_index }));
        }
        let x = std::mem::take(&mut self.class_extras);
        self.extra_attrs(x, &mut attributes);
        if !self.bootstrap.is_empty() {
            let bsm = std::mem::take(&mut self.bootstrap);
            attributes.push(self.attr("BootstrapMethods", AttributeBody::BootstrapMethods(bsm)));
        }
        let unit = ClassUnit {
            minor_version: 0,
            major_version: FIXTURE_MAJOR_VERSION,
            constant_pool: self.pool,
            access_flags: self.access_flags,
            this_class: self.this_class,
            super_class: self.super_class,
            interfaces: self.interfaces,
            fields,
            methods,
            attributes,
        };
        unit.validate()?;
        Ok(unit)
    }

    pub fn to_bytes(self) -> Result<Vec<u8>, ClassError> {
        emit_class(&self.build()?)
    }
}

/// Bootstrap static arguments.
#[derive(Debug, Clone)]
pub enum BootstrapArg {
    MethodType(String),
    MethodHandle { kind: u8, owner: String, name: String, desc: String, interface: bool },
    String(String),
    Class(String),
    Int(i32),
}

enum Item {
    Insn(Insn),
    Branch(u8, Label),
}

pub struct CodeBuilder<'a> {
    pool: &'a mut ConstantPool,
    bootstrap: &'a mut Vec<BootstrapMethod>,
    items: Vec<Item>,
    labels: Vec<Option<usize>>,
    label_depth: Vec<Option<i32>>,
    targets: Vec<bool>,
    handlers: Vec<(Label, Label, Label, u16)>,
    explicit: BTreeMap<usize, Vec<VerificationType>>,
    initial: Vec<VerificationType>,
    depth: Option<i32>,
    max_stack: i32,
    max_locals: u16,
}

impl<'a> CodeBuilder<'a> {
    fn new(
        pool: &'a mut ConstantPool,
        bootstrap: &'a mut Vec<BootstrapMethod>,
        this: Option<u16>,
        is_ctor: bool,
        desc: &str,
    ) -> Self {
        let d = parse_method_descriptor(desc).expect("builder method descriptor");
        let max_locals = d.arg_slots() + u16::from(this.is_some());
        let mut initial = Vec::new();
        if let Some(t) = this {
            initial.push(if is_ctor { VerificationType::UninitializedThis } else { VerificationType::Object(t) });
        }
        for p in &d.params {
            initial.push(verification_type(pool, p));
        }
        CodeBuilder {
            pool,
            bootstrap,
            items: Vec::new(),
            labels: Vec::new(),
            label_depth: Vec::new(),
            targets: Vec::new(),
            handlers: Vec::new(),
            explicit: BTreeMap::new(),
            initial,
            depth: Some(0),
            max_stack: 0,
            max_locals,
        }
    }

    pub fn pool(&mut self) -> &mut ConstantPool {
        self.pool
    }

    pub fn label(&mut self) -> Label {
        self.labels.push(None);
        self.label_depth.push(None);
        self.targets.push(false);
        Label(self.labels.len() - 1)
    }

    /// Binds `label` to the next instruction.
    pub fn place(&mut self, label: Label) -> &mut Self {
        assert!(self.labels[label.0].is_none(), "label placed twice");
        self.labels[label.0] = Some(self.items.len());
        match (self.depth, self.label_depth[label.0]) {
            (Some(d), Some(l)) => assert_eq!(d, l, "stack depth mismatch at label"),
            (Some(d), None) => self.label_depth[label.0] = Some(d),
            (None, l) => self.depth = Some(l.unwrap_or(0)),
        }
        self
    }

    /// Protects `[start, end)` with a handler at `handler`; `catch` of
    /// `None` catches everything. Must precede placing `handler`.
    pub fn try_catch(&mut self, start: Label, end: Label, handler: Label, catch: Option<&str>) -> &mut Self {
        assert!(self.labels[handler.0].is_none(), "handler declared after placement");
        let t = catch.map_or(0, |c| self.pool.intern_class(c));
        self.handlers.push((start, end, handler, t));
        self.targets[handler.0] = true;
        self.label_depth[handler.0] = Some(1);
        self
    }

    /// Verification type of a class or array-descriptor operand.
    pub fn object_type(&mut self, name: &str) -> VerificationType {
        VerificationType::Object(self.pool.intern_class(name))
    }

    /// Declares the full local-variable state at `label`, parameters
    /// included.
    pub fn frame_locals(&mut self, label: Label, locals: Vec<VerificationType>) -> &mut Self {
        self.explicit.insert(label.0, locals);
        self
    }

    pub fn insn(&mut self, insn: Insn) -> &mut Self {
        let delta = stack_delta(&insn, self.pool);
        self.track_locals(&insn);
        self.adjust(delta);
        if insn.ends_block() {
            self.depth = None;
        }
        self.items.push(Item::Insn(insn));
        self
    }

    pub fn op(&mut self, opcode: u8) -> &mut Self {
        self.insn(Insn::simple(opcode))
    }

    pub fn branch(&mut self, opcode: u8, target: Label) -> &mut Self {
        let delta = stack_delta(&Insn::new(opcode, Operand::Branch(0)), self.pool);
        self.adjust(delta);
        let d = self.depth.expect("branch from unreachable code");
        match self.label_depth[target.0] {
            Some(l) => assert_eq!(l, d, "stack depth mismatch at branch"),
            None => self.label_depth[target.0] = Some(d),
        }
        self.targets[target.0] = true;
        self.items.push(Item::Branch(opcode, target));
        if opcode == op::GOTO || opcode == op::GOTO_W {
            self.depth = None;
        }
        self
    }

    pub fn goto(&mut self, target: Label) -> &mut Self {
        self.branch(op::GOTO, target)
    }

    fn adjust(&mut self, delta: i32) {
        let d = self.depth.expect("instruction in unreachable code") + delta;
        assert!(d >= 0, "operand stack underflow");
        self.max_stack = self.max_stack.max(d);
        self.depth = Some(d);
    }

    fn track_locals(&mut self, insn: &Insn) {
        let (index, width) = match insn.operand {
            Operand::Local { index, .. } => (index, local_width(insn.opcode)),
            Operand::Iinc { index, .. } => (index, 1),
            Operand::None if (op::ILOAD_0..=0x2d).contains(&insn.opcode) => {
                let k = insn.opcode - op::ILOAD_0;
                (u16::from(k % 4), if matches!(k / 4, 1 | 3) { 2 } else { 1 })
            }
            Operand::None if (op::ISTORE_0..=0x4e).contains(&insn.opcode) => {
                let k = insn.opcode - op::ISTORE_0;
                (u16::from(k % 4), if matches!(k / 4, 1 | 3) { 2 } else { 1 })
            }
            _ => return,
        };
        self.max_locals = self.max_locals.max(index + width);
    }

    fn local(&mut self, base: u8, short_base: u8, index: u16) -> &mut Self {
        if index <= 3 {
            self.op(short_base + index as u8)
        } else {
            self.insn(Insn::new(base, Operand::Local { index, wide: index > 255 }))
        }
    }

    pub fn aload(&mut self, index: u16) -> &mut Self {
        self.local(op::ALOAD, op::ALOAD_0, index)
    }

    pub fn astore(&mut self, index: u16) -> &mut Self {
        self.local(op::ASTORE, op::ASTORE_0, index)
    }

    pub fn iload(&mut self, index: u16) -> &mut Self {
        self.local(op::ILOAD, op::ILOAD_0, index)
    }

    pub fn istore(&mut self, index: u16) -> &mut Self {
        self.local(op::ISTORE, op::ISTORE_0, index)
    }

    pub fn iinc(&mut self, index: u16, delta: i16) -> &mut Self {
        let wide = index > 0xff || !(-128..=127).contains(&delta);
        self.insn(Insn::new(op::IINC, Operand::Iinc { index, delta, wide }))
    }

    pub fn lload(&mut self, index: u16) -> &mut Self {
        self.local(op::LLOAD, op::LLOAD_0, index)
    }

    pub fn dload(&mut self, index: u16) -> &mut Self {
        self.local(op::DLOAD, op::DLOAD_0, index)
    }

    pub fn iconst(&mut self, v: i32) -> &mut Self {
        match v {
            -1..=5 => self.op((op::ICONST_0 as i32 + v) as u8),
            -128..=127 => self.insn(Insn::new(op::BIPUSH, Operand::Byte(v as i8))),
            -32768..=32767 => self.insn(Insn::new(op::SIPUSH, Operand::Short(v as i16))),
            _ => {
                let i = self.pool.intern_integer(v);
                self.ldc_index(i)
            }
        }
    }

    pub fn lconst(&mut self, v: i64) -> &mut Self {
        match v {
            0 | 1 => self.op(op::LCONST_0 + v as u8),
            _ => {
                let i = self.pool.intern_long(v);
                self.insn(Insn::new(op::LDC2_W, Operand::Pool(i)))
            }
        }
    }

    pub fn dconst(&mut self, v: f64) -> &mut Self {
        if v.to_bits() == 0 {
            self.op(op::DCONST_0)
        } else {
            let i = self.pool.intern(Constant::Double(v.to_bits()));
            self.insn(Insn::new(op::LDC2_W, Operand::Pool(i)))
        }
    }

    fn ldc_index(&mut self, i: u16) -> &mut Self {
        if i <= 255 {
            self.insn(Insn::new(op::LDC, Operand::Pool(i)))
        } else {
            self.insn(Insn::new(op::LDC_W, Operand::Pool(i)))
        }
    }

    pub fn ldc_string(&mut self, s: &str) -> &mut Self {
        let i = self.pool.intern_string(s);
        self.ldc_index(i)
    }

    pub fn ldc_class(&mut self, name: &str) -> &mut Self {
        let i = self.pool.intern_class(name);
        self.ldc_index(i)
    }

    fn class_op(&mut self, opcode: u8, name: &str) -> &mut Self {
        let i = self.pool.intern_class(name);
        self.insn(Insn::new(opcode, Operand::Pool(i)))
    }

    pub fn new_object(&mut self, name: &str) -> &mut Self {
        self.class_op(op::NEW, name)
    }

    pub fn anewarray(&mut self, name: &str) -> &mut Self {
        self.class_op(op::ANEWARRAY, name)
    }

    /// Primitive array; `atype` is the newarray type code (10 = int).
    pub fn newarray(&mut self, atype: u8) -> &mut Self {
        self.insn(Insn::new(op::NEWARRAY, Operand::ArrayType(atype)))
    }

    pub fn checkcast(&mut self, name: &str) -> &mut Self {
        self.class_op(op::CHECKCAST, name)
    }

    pub fn instanceof(&mut self, name: &str) -> &mut Self {
        self.class_op(op::INSTANCEOF, name)
    }

    fn field_op(&mut self, opcode: u8, owner: &str, name: &str, desc: &str) -> &mut Self {
        let i = self.pool.intern_fieldref(owner, name, desc);
        self.insn(Insn::new(opcode, Operand::Pool(i)))
    }

    pub fn getstatic(&mut self, owner: &str, name: &str, desc: &str) -> &mut Self {
        self.field_op(op::GETSTATIC, owner, name, desc)
    }

    pub fn putstatic(&mut self, owner: &str, name: &str, desc: &str) -> &mut Self {
        self.field_op(op::PUTSTATIC, owner, name, desc)
    }

    pub fn getfield(&mut self, owner: &str, name: &str, desc: &str) -> &mut Self {
        self.field_op(op::GETFIELD, owner, name, desc)
    }

    pub fn putfield(&mut self, owner: &str, name: &str, desc: &str) -> &mut Self {
        self.field_op(op::PUTFIELD, owner, name, desc)
    }

    pub fn invokevirtual(&mut self, owner: &str, name: &str, desc: &str) -> &mut Self {
        let i = self.pool.intern_methodref(owner, name, desc);
        self.insn(Insn::new(op::INVOKEVIRTUAL, Operand::Pool(i)))
    }

    pub fn invokespecial(&mut self, owner: &str, name: &str, desc: &str) -> &mut Self {
        let i = self.pool.intern_methodref(owner, name, desc);
        self.insn(Insn::new(op::INVOKESPECIAL, Operand::Pool(i)))
    }

    pub fn invokestatic(&mut self, owner: &str, name: &str, desc: &str) -> &mut Self {
        let i = self.pool.intern_methodref(owner, name, desc);
        self.insn(Insn::new(op::INVOKESTATIC, Operand::Pool(i)))
    }

    /// invokestatic of a static interface method.
    pub fn invokestatic_interface(&mut self, owner: &str, name: &str, desc: &str) -> &mut Self {
        let i = self.pool.intern_interface_methodref(owner, name, desc);
        self.insn(Insn::new(op::INVOKESTATIC, Operand::Pool(i)))
    }

    pub fn invokeinterface(&mut self, owner: &str, name: &str, desc: &str) -> &mut Self {
        let i = self.pool.intern_interface_methodref(owner, name, desc);
        let count = parse_method_descriptor(desc).map_or(1, |d| d.arg_slots() as u8 + 1);
        self.insn(Insn::new(op::INVOKEINTERFACE, Operand::InvokeInterface { index: i, count }))
    }

    fn bootstrap_arg(&mut self, a: &BootstrapArg) -> u16 {
        match a {
            BootstrapArg::MethodType(d) => self.pool.intern_method_type(d),
            BootstrapArg::MethodHandle { kind, owner, name, desc, interface } => {
                let r = if *interface {
                    self.pool.intern_interface_methodref(owner, name, desc)
                } else if matches!(*kind, REF_GET_FIELD..=REF_PUT_STATIC) {
                    self.pool.intern_fieldref(owner, name, desc)
                } else {
                    self.pool.intern_methodref(owner, name, desc)
                };
                self.pool.intern_method_handle(*kind, r)
            }
            BootstrapArg::String(s) => self.pool.intern_string(s),
            BootstrapArg::Class(c) => self.pool.intern_class(c),
            BootstrapArg::Int(v) => self.pool.intern_integer(*v),
        }
    }

    /// invokedynamic through a static bootstrap method.
    pub fn invokedynamic(
        &mut self,
        bsm: (&str, &str, &str),
        args: &[BootstrapArg],
        name: &str,
        desc: &str,
    ) -> &mut Self {
        let m = self.pool.intern_methodref(bsm.0, bsm.1, bsm.2);
        let method_ref = self.pool.intern_method_handle(REF_INVOKE_STATIC, m);
        let arguments: Vec<u16> = args.iter().map(|a| self.bootstrap_arg(a)).collect();
        let entry = BootstrapMethod { method_ref, arguments };
        let bsm_index = match self.bootstrap.iter().position(|b| *b == entry) {
            Some(i) => i,
            None => {
                self.bootstrap.push(entry);
                self.bootstrap.len() - 1
            }
        };
        let i = self.pool.intern_invoke_dynamic(bsm_index as u16, name, desc);
        self.insn(Insn::new(op::INVOKEDYNAMIC, Operand::InvokeDynamic { index: i }))
    }

    /// Creates a lambda instance the way javac does. `sam` is the
    /// functional interface method (owner, name, erased descriptor),
    /// `target` the implementation method handle, `instantiated` the
    /// specialised SAM descriptor, `captures` the parenthesised captured
    /// argument types such as `()` or `(Ljava/lang/String;)`.
    pub fn lambda(
        &mut self,
        sam: (&str, &str, &str),
        target: BootstrapArg,
        instantiated: &str,
        captures: &str,
    ) -> &mut Self {
        let args = [BootstrapArg::MethodType(sam.2.to_owned()), target, BootstrapArg::MethodType(instantiated.to_owned())];
        let indy_desc = format!("{captures}L{};", sam.0);
        self.invokedynamic(
            ("java/lang/invoke/LambdaMetafactory", "metafactory", METAFACTORY_DESC),
            &args,
            sam.1,
            &indy_desc,
        )
    }

    /// `System.out.println(s)`.
    pub fn println(&mut self, s: &str) -> &mut Self {
        self.getstatic("java/lang/System", "out", "Ljava/io/PrintStream;");
        self.ldc_string(s);
        self.invokevirtual("java/io/PrintStream", "println", "(Ljava/lang/String;)V")
    }

    fn finish(self) -> CodeAttribute {
        assert!(self.depth.is_none(), "method body falls off the end");
        let mut offsets = Vec::with_capacity(self.items.len() + 1);
        let mut pc = 0usize;
        for item in &self.items {
            offsets.push(pc);
            pc += match item {
                Item::Insn(i) => i.encoded_len(pc),
                Item::Branch(o, _) => Insn::new(*o, Operand::Branch(0)).encoded_len(pc),
            };
        }
        offsets.push(pc);
        let at = |l: Label| offsets[self.labels[l.0].expect("unplaced label")];

        let code: Vec<Insn> = self
            .items
            .iter()
            .enumerate()
            .map(|(k, item)| match item {
                Item::Insn(i) => i.clone(),
                Item::Branch(o, l) => Insn::new(*o, Operand::Branch(at(*l) as i32 - offsets[k] as i32)),
            })
            .collect();

        let exception_table: Vec<ExceptionHandler> = self
            .handlers
            .iter()
            .map(|&(s, e, h, t)| ExceptionHandler {
                start_pc: at(s) as u16,
                end_pc: at(e) as u16,
                handler_pc: at(h) as u16,
                catch_type: t,
            })
            .collect();

        let mut frames: BTreeMap<usize, Option<VerificationType>> = BTreeMap::new();
        for (l, &targeted) in self.targets.iter().enumerate() {
            if targeted && self.label_depth[l] == Some(0) {
                frames.entry(at(Label(l))).or_insert(None);
            }
        }
        for h in &exception_table {
            let t = if h.catch_type == 0 { self.pool.intern_class("java/lang/Throwable") } else { h.catch_type };
            let prev = frames.insert(h.handler_pc as usize, Some(VerificationType::Object(t)));
            assert!(prev.is_none_or(|p| p == Some(VerificationType::Object(t))), "handler shares a branch target");
        }
        for (l, &targeted) in self.targets.iter().enumerate() {
            if targeted && !matches!(self.label_depth[l], Some(0)) {
                assert!(frames.get(&at(Label(l))).is_some_and(|f| f.is_some()), "branch target with non-empty stack");
            }
        }
        let mut locals_at: BTreeMap<usize, &Vec<VerificationType>> = BTreeMap::new();
        for (l, locals) in &self.explicit {
            locals_at.insert(at(Label(*l)), locals);
        }
        let full = !self.explicit.is_empty();
        let mut smt = Vec::new();
        let mut last: Option<usize> = None;
        for (off, stack) in frames {
            let offset_delta = match last {
                None => off,
                Some(p) => off - p - 1,
            } as u16;
            last = Some(off);
            smt.push(match stack {
                _ if full => StackMapFrame::Full {
                    offset_delta,
                    locals: locals_at.get(&off).map_or_else(|| self.initial.clone(), |l| (*l).clone()),
                    stack: stack.into_iter().collect(),
                },
                None => StackMapFrame::Same { offset_delta, extended: false },
                Some(stack) => StackMapFrame::SameLocals1StackItem { offset_delta, stack, extended: false },
            });
        }
        let attributes = if smt.is_empty() {
            Vec::new()
        } else {
            // name index is filled in by ClassBuilder::build
            vec![Attribute { name_index: 0, body: AttributeBody::StackMapTable(smt) }]
        };
        CodeAttribute {
            max_stack: self.max_stack as u16,
            max_locals: self.max_locals,
            code,
            exception_table,
            attributes,
        }
    }
}

fn verification_type(pool: &mut ConstantPool, t: &FieldType) -> VerificationType {
    match t {
        FieldType::Base(BaseType::Long) => VerificationType::Long,
        FieldType::Base(BaseType::Double) => VerificationType::Double,
        FieldType::Base(BaseType::Float) => VerificationType::Float,
        FieldType::Base(_) => VerificationType::Integer,
        FieldType::Object(name) => VerificationType::Object(pool.intern_class(name)),
        FieldType::Array(_) => VerificationType::Object(pool.intern_class(&t.to_string())),
    }
}

fn local_width(opcode: u8) -> u16 {
    match opcode {
        op::LLOAD | op::DLOAD | op::LSTORE | op::DSTORE => 2,
        _ => 1,
    }
}

fn field_slots(pool: &ConstantPool, index: u16) -> i32 {
    pool.member_ref(index)
        .and_then(|m| parse_field_descriptor(m.descriptor).ok())
        .map_or(1, |t| t.slots() as i32)
}

fn invoke_delta(pool: &ConstantPool, index: u16, receiver: bool) -> i32 {
    let desc = match pool.get(index) {
        Some(Constant::InvokeDynamic { name_and_type_index, .. }) => {
            pool.name_and_type(*name_and_type_index).map(|(_, d)| d)
        }
        _ => pool.member_ref(index).map(|m| m.descriptor),
    };
    let d = desc.and_then(|d| parse_method_descriptor(d).ok()).expect("invoke of unresolvable method");
    d.return_slots() as i32 - d.arg_slots() as i32 - i32::from(receiver)
}

/// Net operand stack change in slots.
pub(crate) fn stack_delta(insn: &Insn, pool: &ConstantPool) -> i32 {
    let o = insn.opcode;
    match o {
        0x00 => 0,
        0x01..=0x08 => 1,
        0x09 | 0x0a => 2,
        0x0b..=0x0d => 1,
        0x0e | 0x0f => 2,
        0x10..=0x13 => 1,
        0x14 => 2,
        0x15 | 0x17 | 0x19 => 1,
        0x16 | 0x18 => 2,
        0x1a..=0x2d => {
            if matches!((o - 0x1a) / 4, 1 | 3) {
                2
            } else {
                1
            }
        }
        0x2f | 0x31 => 0,
        0x2e..=0x35 => -1,
        0x36 | 0x38 | 0x3a => -1,
        0x37 | 0x39 => -2,
        0x3b..=0x4e => {
            if matches!((o - 0x3b) / 4, 1 | 3) {
                -2
            } else {
                -1
            }
        }
        0x50 | 0x52 => -4,
        0x4f..=0x56 => -3,
        0x57 => -1,
        0x58 => -2,
        0x59..=0x5b => 1,
        0x5c..=0x5e => 2,
        0x5f => 0,
        0x60..=0x73 => {
            if (o - 0x60) % 2 == 1 {
                -2
            } else {
                -1
            }
        }
        0x74..=0x77 => 0,
        0x78..=0x7d => -1,
        0x7e..=0x83 => {
            if (o - 0x7e) % 2 == 1 {
                -2
            } else {
                -1
            }
        }
        0x84 => 0,
        0x85 | 0x87 | 0x8c | 0x8d => 1,
        0x88 | 0x89 | 0x8e | 0x90 => -1,
        0x86 | 0x8a | 0x8b | 0x8f | 0x91..=0x93 => 0,
        0x94 | 0x97 | 0x98 => -3,
        0x95 | 0x96 => -1,
        0x99..=0x9e => -1,
        0x9f..=0xa6 => -2,
        0xa7 => 0,
        0xa8 => 1,
        0xa9 => 0,
        0xaa | 0xab => -1,
        0xac | 0xae | 0xb0 => -1,
        0xad | 0xaf => -2,
        0xb1 => 0,
        op::GETSTATIC | op::PUTSTATIC | op::GETFIELD | op::PUTFIELD => {
            let s = insn.pool_index().map_or(1, |i| field_slots(pool, i));
            match o {
                op::GETSTATIC => s,
                op::PUTSTATIC => -s,
                op::GETFIELD => s - 1,
                _ => -s - 1,
            }
        }
        op::INVOKEVIRTUAL | op::INVOKESPECIAL | op::INVOKEINTERFACE => {
            invoke_delta(pool, insn.pool_index().unwrap_or(0), true)
        }
        op::INVOKESTATIC | op::INVOKEDYNAMIC => invoke_delta(pool, insn.pool_index().unwrap_or(0), false),
        op::NEW => 1,
        0xbc..=0xbe => 0,
        op::ATHROW => -1,
        op::CHECKCAST | op::INSTANCEOF => 0,
        op::MONITORENTER | op::MONITOREXIT => -1,
        op::MULTIANEWARRAY => match insn.operand {
            Operand::MultiANewArray { dimensions, .. } => 1 - dimensions as i32,
            _ => 0,
        },
        op::IFNULL | op::IFNONNULL => -1,
        op::GOTO_W => 0,
        op::JSR_W => 1,
        _ => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classmodel::parse_class;

    #[test]
    fn builds_a_parseable_class_with_frames() {
        let mut b = ClassBuilder::new("p/Demo", "java/lang/Object");
        b.default_constructor();
        b.field(access::PRIVATE, "count", "I");
        b.method(access::PUBLIC | access::STATIC, "main", "([Ljava/lang/String;)V", |c| {
            let else_ = c.label();
            let end = c.label();
            c.aload(0).op(op::ARRAYLENGTH).branch(op::IFEQ, else_);
            c.println("args");
            c.goto(end);
            c.place(else_).println("none");
            c.place(end).op(op::RETURN);
        });
        let bytes = b.to_bytes().unwrap();
        let unit = parse_class(&bytes).unwrap();
        let main = unit.find_method("main", "([Ljava/lang/String;)V").unwrap();
        let code = main.code().unwrap();
        assert_eq!(code.max_stack, 2);
        assert_eq!(code.max_locals, 1);
        let smt = code.attributes.iter().find_map(|a| match &a.body {
            AttributeBody::StackMapTable(f) => Some(f.len()),
            _ => None,
        });
        assert_eq!(smt, Some(2));
    }

    #[test]
    fn handler_frame_carries_exception_type() {
        let mut b = ClassBuilder::new("Demo", "java/lang/Object");
        b.method(access::PUBLIC | access::STATIC, "f", "()V", |c| {
            let (s, e, h, done) = (c.label(), c.label(), c.label(), c.label());
            c.try_catch(s, e, h, Some("java/lang/RuntimeException"));
            c.place(s).println("try");
            c.place(e).goto(done);
            c.place(h).astore(0).println("caught");
            c.place(done).op(op::RETURN);
        });
        let unit = b.build().unwrap();
        let code = unit.methods[0].code().unwrap();
        assert_eq!(code.exception_table.len(), 1);
        assert_eq!(code.max_locals, 1);
        let frames = code.attributes.iter().find_map(|a| match &a.body {
            AttributeBody::StackMapTable(f) => Some(f.clone()),
            _ => None,
        });
        let frames = frames.unwrap();
        assert!(matches!(frames[0], StackMapFrame::SameLocals1StackItem { .. }));
    }

    #[test]
    fn explicit_locals_switch_to_full_frames() {
        let mut b = ClassBuilder::new("Loop", "java/lang/Object");
        b.method(access::PUBLIC | access::STATIC, "main", "([Ljava/lang/String;)V", |c| {
            let (head, done) = (c.label(), c.label());
            let arr = c.object_type("[Ljava/lang/String;");
            c.frame_locals(head, vec![arr, VerificationType::Integer]);
            c.frame_locals(done, vec![arr, VerificationType::Integer]);
            c.iconst(0).istore(1);
            c.place(head).iload(1).aload(0).op(op::ARRAYLENGTH).branch(op::IF_ICMPGE, done);
            c.insn(Insn::new(op::IINC, Operand::Iinc { index: 1, delta: 1, wide: false }));
            c.goto(head);
            c.place(done).op(op::RETURN);
        });
        let unit = b.build().unwrap();
        let code = unit.methods[0].code().unwrap();
        let frames = code.attributes.iter().find_map(|a| match &a.body {
            AttributeBody::StackMapTable(f) => Some(f.clone()),
            _ => None,
        });
        let frames = frames.unwrap();
        assert_eq!(frames.len(), 2);
        assert!(frames.iter().all(|f| matches!(f, StackMapFrame::Full { locals, .. } if locals.len() == 2)));
    }

    #[test]
    fn wide_arguments_count_two_slots() {
        let mut b = ClassBuilder::new("W", "java/lang/Object");
        b.method(access::STATIC, "f", "(JD)J", |c| {
            c.lload(0).op(op::LRETURN);
        });
        let unit = b.build().unwrap();
        let code = unit.methods[0].code().unwrap();
        assert_eq!(code.max_locals, 4);
        assert_eq!(code.max_stack, 2);
    }

    #[test]
    fn lambda_registers_one_bootstrap_method() {
        let mut b = ClassBuilder::new("L", "java/lang/Object");
        b.method(access::PRIVATE | access::STATIC, "lambda$main$0", "()V", |c| {
            c.op(op::RETURN);
        });
        b.method(access::PUBLIC | access::STATIC, "main", "([Ljava/lang/String;)V", |c| {
            for _ in 0..2 {
                c.lambda(
                    ("java/lang/Runnable", "run", "()V"),
                    BootstrapArg::MethodHandle {
                        kind: REF_INVOKE_STATIC,
                        owner: "L".into(),
                        name: "lambda$main$0".into(),
                        desc: "()V".into(),
                        interface: false,
                    },
                    "()V",
                    "()",
                );
                c.invokeinterface("java/lang/Runnable", "run", "()V");
            }
            c.op(op::RETURN);
        });
        let unit = parse_class(&b.to_bytes().unwrap()).unwrap();
        let bsm = unit.attributes.iter().find_map(|a| match &a.body {
            AttributeBody::BootstrapMethods(b) => Some(b.len()),
            _ => None,
        });
        assert_eq!(bsm, Some(1));
    }
}
