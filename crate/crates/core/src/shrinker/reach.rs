//! Worklist reachability over the class hierarchy.

use std::collections::{BTreeSet, VecDeque};

use crate::classmodel::code::op;
use crate::classmodel::descriptor::{package_of, parse_field_descriptor, parse_method_descriptor, simple_name};
use crate::classmodel::{
    access, class_ref_of, field_ref_of, method_ref_of, Annotation, Attribute, AttributeBody, ClassUnit, Constant,
    ConstantPool, ConstructRef, ElementValue, Level, Member, Operand, REF_GET_FIELD, REF_GET_STATIC,
    REF_NEW_INVOKE_SPECIAL, REF_PUT_FIELD, REF_PUT_STATIC,
};
use crate::jario::JarArchive;

use super::hierarchy::{element_class, Hierarchy};
use super::{Edge, EdgeReason, ReachabilitySet, ShrinkError, ShrinkMode, ShrinkPolicy};

const SERIALIZABLE: &str = "java/io/Serializable";
const EXTERNALIZABLE: &str = "java/io/Externalizable";

const SERIAL_METHODS: [(&str, &str); 5] = [
    ("writeObject", "(Ljava/io/ObjectOutputStream;)V"),
    ("readObject", "(Ljava/io/ObjectInputStream;)V"),
    ("readObjectNoData", "()V"),
    ("writeReplace", "()Ljava/lang/Object;"),
    ("readResolve", "()Ljava/lang/Object;"),
];
const EXTERNAL_METHODS: [(&str, &str); 2] =
    [("writeExternal", "(Ljava/io/ObjectOutput;)V"), ("readExternal", "(Ljava/io/ObjectInput;)V")];

/// Binary class name, member name, descriptor.
type Key = (String, String, String);

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Node {
    Class(String),
    Method(Key),
    Field(Key),
}

enum Work {
    Class(String),
    Instantiated(String),
    Method(Key),
}

struct CallSite {
    from: Node,
    owner: String,
    name: String,
    desc: String,
    reason: EdgeReason,
}

struct Reach<'a> {
    h: &'a Hierarchy,
    policy: &'a ShrinkPolicy,
    classes: BTreeSet<String>,
    instantiated: BTreeSet<String>,
    methods: BTreeSet<Key>,
    linked: BTreeSet<Key>,
    read: BTreeSet<Key>,
    written: BTreeSet<Key>,
    sites: Vec<CallSite>,
    queue: VecDeque<Work>,
    edges: Vec<(Option<Node>, Node, EdgeReason)>,
}

/// Computes the constructs reachable from `entries` (method refs, or class
/// refs for whole classes) plus the policy's seeds and keep rules.
pub fn compute_reachable(
    jars: &[JarArchive],
    entries: &[ConstructRef],
    policy: &ShrinkPolicy,
) -> Result<ReachabilitySet, ShrinkError> {
    policy.check()?;
    let h = Hierarchy::load(jars)?;
    let mut r = Reach {
        h: &h,
        policy,
        classes: BTreeSet::new(),
        instantiated: BTreeSet::new(),
        methods: BTreeSet::new(),
        linked: BTreeSet::new(),
        read: BTreeSet::new(),
        written: BTreeSet::new(),
        sites: Vec::new(),
        queue: VecDeque::new(),
        edges: Vec::new(),
    };

    for e in entries {
        let hits = matching(&h, e);
        if hits.is_empty() {
            return Err(ShrinkError::MissingEntryPoint(e.to_string()));
        }
        for n in hits {
            r.mark(n, None, EdgeReason::EntryPoint);
        }
    }
    for s in &policy.reflection_seeds {
        for n in matching(&h, s) {
            if let Node::Method(k) = &n {
                if k.1 == "<init>" {
                    r.instantiate(&k.0.clone(), None, EdgeReason::Seed);
                }
            }
            if let Node::Class(c) = &n {
                r.instantiate(&c.clone(), None, EdgeReason::Seed);
            }
            r.mark(n, None, EdgeReason::Seed);
        }
    }
    r.run();
    Ok(r.finish())
}

/// In-jar constructs whose source-level ref equals `target`.
fn matching(h: &Hierarchy, target: &ConstructRef) -> Vec<Node> {
    let mut out = Vec::new();
    for (name, c) in h.classes() {
        if target.class_name() != simple_name(name) {
            continue;
        }
        match target.level() {
            Level::Class => {
                if &class_ref_of(c) == target {
                    out.push(Node::Class(name.clone()));
                }
            }
            Level::Method => {
                for m in &c.methods {
                    if method_ref_of(c, m).ok().as_ref() == Some(target) {
                        out.push(Node::Method(key(name, m.name(&c.constant_pool), m.descriptor(&c.constant_pool))));
                    }
                }
            }
            Level::Field => {
                for f in &c.fields {
                    if field_ref_of(c, f).ok().as_ref() == Some(target) {
                        out.push(Node::Field(key(name, f.name(&c.constant_pool), f.descriptor(&c.constant_pool))));
                    }
                }
            }
        }
    }
    out
}

fn key(class: &str, name: &str, desc: &str) -> Key {
    (class.to_owned(), name.to_owned(), desc.to_owned())
}

fn descriptor_classes(desc: &str) -> Vec<String> {
    let types = if desc.starts_with('(') {
        match parse_method_descriptor(desc) {
            Ok(d) => d.params.into_iter().chain(d.ret).collect(),
            Err(_) => Vec::new(),
        }
    } else {
        parse_field_descriptor(desc).into_iter().collect()
    };
    types.iter().filter_map(|t| t.class_name().map(str::to_owned)).collect()
}

fn annotation_types(pool: &ConstantPool, attrs: &[Attribute]) -> Vec<String> {
    fn walk_value(pool: &ConstantPool, v: &ElementValue, out: &mut Vec<String>) {
        match v {
            ElementValue::Enum { type_name_index: i, .. } | ElementValue::Class(i) => {
                out.extend(pool.utf8(*i).map(descriptor_classes).unwrap_or_default());
            }
            ElementValue::Annotation(a) => walk(pool, a, out),
            ElementValue::Array(vs) => vs.iter().for_each(|v| walk_value(pool, v, out)),
            ElementValue::Const { .. } => {}
        }
    }
    fn walk(pool: &ConstantPool, a: &Annotation, out: &mut Vec<String>) {
        out.extend(pool.utf8(a.type_index).map(descriptor_classes).unwrap_or_default());
        a.elements.iter().for_each(|(_, v)| walk_value(pool, v, out));
    }
    let mut out = Vec::new();
    for a in attrs {
        match &a.body {
            AttributeBody::RuntimeVisibleAnnotations(list) | AttributeBody::RuntimeInvisibleAnnotations(list) => {
                list.iter().for_each(|x| walk(pool, x, &mut out));
            }
            AttributeBody::RuntimeVisibleParameterAnnotations(ps)
            | AttributeBody::RuntimeInvisibleParameterAnnotations(ps) => {
                ps.iter().flatten().for_each(|x| walk(pool, x, &mut out));
            }
            AttributeBody::AnnotationDefault(v) => walk_value(pool, v, &mut out),
            _ => {}
        }
    }
    out
}

impl Reach<'_> {
    fn conservative(&self) -> bool {
        self.policy.mode == ShrinkMode::Conservative
    }

    fn mark(&mut self, n: Node, from: Option<&Node>, reason: EdgeReason) {
        match n {
            Node::Class(c) => self.class(&c, from, reason),
            Node::Method(k) => self.method(k, from, reason),
            Node::Field(k) => self.field(k, true, from, reason),
        }
    }

    fn edge(&mut self, from: Option<&Node>, to: Node, reason: EdgeReason) {
        self.edges.push((from.cloned(), to, reason));
    }

    fn class(&mut self, name: &str, from: Option<&Node>, reason: EdgeReason) {
        let Some(name) = element_class(name) else { return };
        if !self.h.contains(name) || self.classes.contains(name) {
            return;
        }
        self.classes.insert(name.to_owned());
        self.edge(from, Node::Class(name.to_owned()), reason);
        self.queue.push_back(Work::Class(name.to_owned()));
    }

    fn instantiate(&mut self, name: &str, from: Option<&Node>, reason: EdgeReason) {
        self.class(name, from, reason);
        if self.h.contains(name) && self.instantiated.insert(name.to_owned()) {
            self.queue.push_back(Work::Instantiated(name.to_owned()));
        }
    }

    fn method(&mut self, k: Key, from: Option<&Node>, reason: EdgeReason) {
        let Some(unit) = self.h.get(&k.0) else { return };
        let Some(m) = unit.find_method(&k.1, &k.2) else { return };
        if m.is_abstract() && !matches!(reason, EdgeReason::EntryPoint | EdgeReason::Seed | EdgeReason::PolicyKeep) {
            self.link(k, from, reason);
            return;
        }
        if self.methods.contains(&k) {
            return;
        }
        self.methods.insert(k.clone());
        self.edge(from, Node::Method(k.clone()), reason);
        self.class(&k.0.clone(), Some(&Node::Method(k.clone())), EdgeReason::TypeReference);
        self.queue.push_back(Work::Method(k));
    }

    /// An abstract declaration a call site resolves to; kept so the
    /// reference still links, but it has no body to scan.
    fn link(&mut self, k: Key, from: Option<&Node>, reason: EdgeReason) {
        if self.linked.insert(k.clone()) {
            self.edge(from, Node::Method(k.clone()), reason);
            let me = Node::Method(k.clone());
            self.class(&k.0.clone(), Some(&me), EdgeReason::TypeReference);
            for c in descriptor_classes(&k.2) {
                self.class(&c, Some(&me), EdgeReason::TypeReference);
            }
        }
    }

    fn field(&mut self, k: Key, read: bool, from: Option<&Node>, reason: EdgeReason) {
        if !self.h.get(&k.0).is_some_and(|c| c.find_field(&k.1, &k.2).is_some()) {
            return;
        }
        let set = if read { &mut self.read } else { &mut self.written };
        if !set.insert(k.clone()) {
            return;
        }
        self.edge(from, Node::Field(k.clone()), reason);
        let me = Node::Field(k.clone());
        let from = Some(&me);
        self.class(&k.0, from, EdgeReason::TypeReference);
        for c in descriptor_classes(&k.2) {
            self.class(&c, from, EdgeReason::TypeReference);
        }
        if self.policy.keep_annotations {
            let unit = self.h.get(&k.0).expect("checked above");
            let f = unit.find_field(&k.1, &k.2).expect("checked above");
            for a in annotation_types(&unit.constant_pool, &f.attributes) {
                self.class(&a, from, EdgeReason::PolicyKeep);
            }
        }
    }

    fn run(&mut self) {
        while let Some(w) = self.queue.pop_front() {
            match w {
                Work::Class(c) => self.on_class(&c),
                Work::Instantiated(c) => {
                    if !self.conservative() {
                        self.redispatch(&c);
                    }
                }
                Work::Method(k) => self.on_method(&k),
            }
        }
    }

    fn dispatch_candidates(&self) -> &BTreeSet<String> {
        if self.conservative() {
            &self.classes
        } else {
            &self.instantiated
        }
    }

    fn on_class(&mut self, name: &str) {
        let h = self.h;
        let unit = h.get(name).expect("live classes are in-jar");
        let me = Node::Class(name.to_owned());
        let from = Some(&me);
        for s in h.direct_supertypes(name) {
            self.class(&s, from, EdgeReason::TypeReference);
        }
        if unit.find_method("<clinit>", "()V").is_some() {
            self.method(key(name, "<clinit>", "()V"), from, EdgeReason::DirectCall);
        }
        if self.conservative() {
            self.redispatch(name);
        }
        if self.policy.keep_annotations {
            for a in annotation_types(&unit.constant_pool, &unit.attributes) {
                self.class(&a, from, EdgeReason::PolicyKeep);
            }
            if unit.is_annotation() {
                for m in &unit.methods {
                    let k = key(name, m.name(&unit.constant_pool), m.descriptor(&unit.constant_pool));
                    self.method(k, from, EdgeReason::PolicyKeep);
                }
            }
        }
        if self.policy.keep_serialization_members && h.is_subtype(name, SERIALIZABLE) && !unit.is_interface() {
            self.serialization_members(name, unit);
        }
    }

    /// Members the serialization runtime reaches by name.
    fn serialization_members(&mut self, name: &str, unit: &ClassUnit) {
        let pool = &unit.constant_pool;
        let me = Node::Class(name.to_owned());
        let from = Some(&me);
        let keep = EdgeReason::PolicyKeep;
        for (n, d) in SERIAL_METHODS {
            if unit.find_method(n, d).is_some() {
                self.method(key(name, n, d), from, keep);
            }
        }
        for f in &unit.fields {
            let (n, d) = (f.name(pool), f.descriptor(pool));
            let persistent = f.access_flags & (access::STATIC | access::TRANSIENT) == 0;
            if persistent || (n == "serialVersionUID" && f.is_static()) {
                self.field(key(name, n, d), true, from, keep);
            }
        }
        if self.h.is_subtype(name, EXTERNALIZABLE) {
            for (n, d) in EXTERNAL_METHODS {
                if let Some(c) = self.h.select_method(name, n, d) {
                    self.method(key(&c, n, d), from, keep);
                }
            }
            if unit.find_method("<init>", "()V").is_some() {
                self.method(key(name, "<init>", "()V"), from, keep);
            }
        } else {
            let mut cur = unit.superclass().map(str::to_owned);
            while let Some(s) = cur {
                if !self.h.contains(&s) {
                    break;
                }
                if !self.h.is_subtype(&s, SERIALIZABLE) {
                    self.method(key(&s, "<init>", "()V"), from, keep);
                    break;
                }
                cur = self.h.get(&s).and_then(|u| u.superclass().map(str::to_owned));
            }
        }
    }

    /// Re-runs every recorded call site against a newly eligible receiver.
    fn redispatch(&mut self, receiver: &str) {
        let mut hits = Vec::new();
        for s in &self.sites {
            if let Some(t) = self.target(receiver, s) {
                hits.push((t, s.from.clone(), s.reason));
            }
        }
        for (t, from, reason) in hits {
            self.method(t, Some(&from), reason);
        }
    }

    fn target(&self, receiver: &str, s: &CallSite) -> Option<Key> {
        let unit = self.h.get(receiver)?;
        if unit.is_interface() || unit.is_abstract() || !self.h.is_subtype(receiver, &s.owner) {
            return None;
        }
        let c = self.h.select_method(receiver, &s.name, &s.desc)?;
        Some(key(&c, &s.name, &s.desc))
    }

    fn call_site(&mut self, from: &Node, owner: &str, name: &str, desc: &str, reason: EdgeReason) {
        if let Some(decl) = self.h.resolve_method(owner, name, desc) {
            self.method(key(&decl, name, desc), Some(from), reason);
        }
        let site = CallSite { from: from.clone(), owner: owner.to_owned(), name: name.to_owned(), desc: desc.to_owned(), reason };
        let hits: Vec<Key> = self.dispatch_candidates().iter().filter_map(|c| self.target(c, &site)).collect();
        self.sites.push(site);
        for t in hits {
            self.method(t, Some(from), reason);
        }
    }

    fn direct(&mut self, from: &Node, owner: &str, name: &str, desc: &str) {
        if let Some(decl) = self.h.resolve_method(owner, name, desc) {
            self.method(key(&decl, name, desc), Some(from), EdgeReason::DirectCall);
        }
    }

    fn field_access(&mut self, from: &Node, owner: &str, name: &str, desc: &str, read: bool) {
        self.class(owner, Some(from), EdgeReason::TypeReference);
        if let Some(decl) = self.h.resolve_field(owner, name, desc) {
            self.field(key(&decl, name, desc), read, Some(from), EdgeReason::FieldAccess);
        }
    }

    fn handle(&mut self, from: &Node, pool: &ConstantPool, kind: u8, index: u16) {
        let Some(r) = pool.member_ref(index) else { return };
        let (owner, name, desc) = (r.owner.to_owned(), r.name.to_owned(), r.descriptor.to_owned());
        match kind {
            REF_GET_FIELD | REF_GET_STATIC => self.field_access(from, &owner, &name, &desc, true),
            REF_PUT_FIELD | REF_PUT_STATIC => self.field_access(from, &owner, &name, &desc, false),
            _ => {
                if kind == REF_NEW_INVOKE_SPECIAL {
                    self.instantiate(&owner, Some(from), EdgeReason::IndyBootstrap);
                }
                if let Some(decl) = self.h.resolve_method(&owner, &name, &desc) {
                    self.method(key(&decl, &name, &desc), Some(from), EdgeReason::IndyBootstrap);
                }
            }
        }
    }

    fn loadable(&mut self, from: &Node, pool: &ConstantPool, index: u16) {
        match pool.get(index) {
            Some(Constant::Class { .. }) => {
                if let Some(c) = pool.class_name(index) {
                    self.class(c, Some(from), EdgeReason::TypeReference);
                }
            }
            Some(Constant::MethodHandle { reference_kind, reference_index }) => {
                self.handle(from, pool, *reference_kind, *reference_index)
            }
            Some(Constant::MethodType { descriptor_index }) => {
                for c in pool.utf8(*descriptor_index).map(descriptor_classes).unwrap_or_default() {
                    self.class(&c, Some(from), EdgeReason::TypeReference);
                }
            }
            _ => {}
        }
    }

    fn indy(&mut self, from: &Node, unit: &ClassUnit, index: u16) {
        let pool = &unit.constant_pool;
        let Some(Constant::InvokeDynamic { bootstrap_method_attr_index, name_and_type_index }) = pool.get(index) else {
            return;
        };
        let Some((name, desc)) = pool.name_and_type(*name_and_type_index) else { return };
        for c in descriptor_classes(desc) {
            self.class(&c, Some(from), EdgeReason::TypeReference);
        }
        let Some(bsm) = unit.attributes.iter().find_map(|a| match &a.body {
            AttributeBody::BootstrapMethods(b) => b.get(*bootstrap_method_attr_index as usize),
            _ => None,
        }) else {
            return;
        };
        let mut metafactory = false;
        if let Some(Constant::MethodHandle { reference_kind, reference_index }) = pool.get(bsm.method_ref) {
            metafactory = pool.member_ref(*reference_index).is_some_and(|r| r.owner == "java/lang/invoke/LambdaMetafactory");
            self.handle(from, pool, *reference_kind, *reference_index);
        }
        for &arg in &bsm.arguments {
            self.loadable(from, pool, arg);
        }
        // The generated class implements the functional interface method.
        if metafactory && self.conservative() {
            let sam_desc = bsm.arguments.first().and_then(|&a| match pool.get(a) {
                Some(Constant::MethodType { descriptor_index }) => pool.utf8(*descriptor_index),
                _ => None,
            });
            let iface = parse_method_descriptor(desc).ok().and_then(|d| d.ret).and_then(|t| t.class_name().map(str::to_owned));
            if let (Some(iface), Some(sd)) = (iface, sam_desc) {
                if let Some(decl) = self.h.resolve_method(&iface, name, sd) {
                    self.method(key(&decl, name, sd), Some(from), EdgeReason::PolicyKeep);
                }
            }
        }
    }

    fn on_method(&mut self, k: &Key) {
        let h = self.h;
        let unit = h.get(&k.0).expect("live methods are in-jar");
        let m = unit.find_method(&k.1, &k.2).expect("live methods exist");
        let pool = &unit.constant_pool;
        let me = Node::Method(k.clone());
        let from = Some(&me);
        for c in descriptor_classes(&k.2) {
            self.class(&c, from, EdgeReason::TypeReference);
        }
        if self.policy.keep_annotations {
            for a in annotation_types(pool, &m.attributes) {
                self.class(&a, from, EdgeReason::PolicyKeep);
            }
        }
        if self.conservative() {
            for a in &m.attributes {
                if let AttributeBody::Exceptions(list) = &a.body {
                    for &i in list {
                        if let Some(c) = pool.class_name(i) {
                            self.class(c, from, EdgeReason::TypeReference);
                        }
                    }
                }
            }
        }
        let Some(code) = m.code() else { return };
        for hnd in &code.exception_table {
            if let Some(c) = pool.class_name(hnd.catch_type) {
                self.class(c, from, EdgeReason::TypeReference);
            }
        }
        for insn in &code.code {
            let Some(idx) = insn.pool_index() else { continue };
            match insn.opcode {
                op::INVOKESTATIC | op::INVOKESPECIAL => {
                    if let Some(r) = pool.member_ref(idx) {
                        self.direct(&me, r.owner, r.name, r.descriptor);
                    }
                }
                op::INVOKEVIRTUAL | op::INVOKEINTERFACE => {
                    if let Some(r) = pool.member_ref(idx) {
                        let reason = if h.is_interface(r.owner) {
                            EdgeReason::InterfaceDispatch
                        } else {
                            EdgeReason::VirtualDispatch
                        };
                        self.class(r.owner, from, EdgeReason::TypeReference);
                        self.call_site(&me, r.owner, r.name, r.descriptor, reason);
                    }
                }
                op::INVOKEDYNAMIC => {
                    if let Operand::InvokeDynamic { index } = insn.operand {
                        self.indy(&me, unit, index);
                    }
                }
                op::GETFIELD | op::GETSTATIC | op::PUTFIELD | op::PUTSTATIC => {
                    if let Some(r) = pool.member_ref(idx) {
                        let read = matches!(insn.opcode, op::GETFIELD | op::GETSTATIC);
                        self.field_access(&me, r.owner, r.name, r.descriptor, read);
                    }
                }
                op::NEW => {
                    if let Some(c) = pool.class_name(idx) {
                        self.instantiate(c, from, EdgeReason::NewInstance);
                    }
                }
                op::ANEWARRAY | op::CHECKCAST | op::INSTANCEOF | op::MULTIANEWARRAY => {
                    if let Some(c) = pool.class_name(idx) {
                        self.class(c, from, EdgeReason::TypeReference);
                    }
                }
                op::LDC | op::LDC_W | op::LDC2_W => self.loadable(&me, pool, idx),
                _ => {}
            }
            if let Some(r) = pool.member_ref(idx) {
                for c in descriptor_classes(r.descriptor) {
                    self.class(&c, from, EdgeReason::TypeReference);
                }
            }
        }
    }

    fn finish(self) -> ReachabilitySet {
        let class_ref = |c: &str| ConstructRef::class(&package_of(c), simple_name(c));
        let method_ref = |k: &Key| {
            let d = parse_method_descriptor(&k.2).expect("descriptors of parsed methods are valid");
            ConstructRef::Method {
                class: simple_name(&k.0).to_owned(),
                name: k.1.clone(),
                ret: d.return_source_name(),
                params: d.param_source_names(),
            }
        };
        let field_ref = |k: &Key| ConstructRef::field(simple_name(&k.0), &k.1);
        let node_ref = |n: &Node| match n {
            Node::Class(c) => class_ref(c),
            Node::Method(k) => method_ref(k),
            Node::Field(k) => field_ref(k),
        };
        let live_fields: BTreeSet<ConstructRef> = self.read.iter().map(field_ref).collect();
        let live_methods: BTreeSet<ConstructRef> = self.methods.iter().map(method_ref).collect();
        let mut edges: Vec<Edge> = self
            .edges
            .iter()
            .map(|(f, t, reason)| Edge { from: f.as_ref().map(node_ref), to: node_ref(t), reason: *reason })
            .collect();
        edges.sort();
        edges.dedup();
        ReachabilitySet {
            live_classes: self.classes.iter().map(|c| class_ref(c)).collect(),
            linked_methods: self.linked.iter().map(method_ref).filter(|m| !live_methods.contains(m)).collect(),
            written_fields: self.written.iter().map(field_ref).filter(|f| !live_fields.contains(f)).collect(),
            live_methods,
            live_fields,
            edges,
        }
    }
}
