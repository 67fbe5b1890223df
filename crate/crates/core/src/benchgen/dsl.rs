//! Small fixture language: classes and members are declared together with
//! their ground-truth mark, so the truth cannot drift from the bytecode.

use crate::classmodel::code::op;
use crate::classmodel::descriptor::parse_method_descriptor;
use crate::classmodel::{access, ClassBuilder, CodeBuilder, ConstructRef};
use crate::groundtruth::{GroundTruth, LevelTruth};

use super::{Feature, GenerationError, TestCase};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Mark {
    Req,
    Bloat,
    /// Harness wiring that exists in the jar but is not scored.
    Driver,
}

pub(crate) use Mark::{Bloat, Req};

pub(crate) const OUT: (&str, &str, &str) = ("java/lang/System", "out", "Ljava/io/PrintStream;");
pub(crate) const PRINT_STREAM: &str = "java/io/PrintStream";
pub(crate) const OBJECT: &str = "java/lang/Object";
pub(crate) const MAIN_DESC: &str = "([Ljava/lang/String;)V";

pub(crate) fn out(c: &mut CodeBuilder) {
    c.getstatic(OUT.0, OUT.1, OUT.2);
}

/// Prints the value on top of the stack, which sits above `System.out`.
pub(crate) fn print_top(c: &mut CodeBuilder, desc: &str) {
    c.invokevirtual(PRINT_STREAM, "println", &format!("({desc})V"));
}

pub(crate) struct Cls {
    simple: String,
    builder: ClassBuilder,
    marks: Vec<(ConstructRef, Mark)>,
}

impl Cls {
    fn new(package: &str, simple: &str, mark: Mark, builder: ClassBuilder) -> Self {
        Cls {
            simple: simple.to_owned(),
            builder,
            marks: vec![(ConstructRef::class(package, simple), mark)],
        }
    }

    pub fn raw(&mut self) -> &mut ClassBuilder {
        &mut self.builder
    }

    pub fn implements(&mut self, iface: &str) -> &mut Self {
        self.builder.implements(iface);
        self
    }

    pub fn source_file(&mut self, name: &str) -> &mut Self {
        self.builder.source_file(name);
        self
    }

    pub fn ctor(&mut self) -> &mut Self {
        self.builder.default_constructor();
        self
    }

    /// A public constructor; the body must call the super constructor.
    pub fn init(&mut self, desc: &str, body: impl FnOnce(&mut CodeBuilder)) -> &mut Self {
        self.builder.method(access::PUBLIC, "<init>", desc, body);
        self
    }

    pub fn clinit(&mut self, body: impl FnOnce(&mut CodeBuilder)) -> &mut Self {
        self.builder.method(access::STATIC, "<clinit>", "()V", body);
        self
    }

    pub fn field(&mut self, mark: Mark, flags: u16, name: &str, desc: &str) -> usize {
        self.marks.push((ConstructRef::field(&self.simple, name), mark));
        self.builder.field(flags, name, desc)
    }

    pub fn method(
        &mut self,
        mark: Mark,
        flags: u16,
        name: &str,
        desc: &str,
        body: impl FnOnce(&mut CodeBuilder),
    ) -> usize {
        self.mark_method(mark, name, desc);
        self.builder.method(flags, name, desc, body)
    }

    pub fn abstract_method(&mut self, mark: Mark, flags: u16, name: &str, desc: &str) -> usize {
        self.mark_method(mark, name, desc);
        self.builder.abstract_method(flags, name, desc)
    }

    /// `private static final long serialVersionUID`.
    pub fn serial_version(&mut self, mark: Mark, uid: i64) -> &mut Self {
        self.marks.push((ConstructRef::field(&self.simple, "serialVersionUID"), mark));
        let v = crate::classmodel::Constant::Long(uid);
        self.builder.constant_field(access::PRIVATE, "serialVersionUID", "J", v);
        self
    }

    fn mark_method(&mut self, mark: Mark, name: &str, desc: &str) {
        let d = parse_method_descriptor(desc).expect("fixture descriptor");
        let r = ConstructRef::method(&self.simple, name, &d.return_source_name(), &d.param_source_names().join(","));
        self.marks.push((r, mark));
    }
}

/// One test case under construction.
pub(crate) struct Case {
    feature: Feature,
    id: String,
    technique: String,
    classes: Vec<Cls>,
    entry: Option<String>,
    targets: Vec<ConstructRef>,
}

impl Case {
    pub fn new(feature: Feature, id: &str, technique: &str) -> Self {
        Case {
            feature,
            id: id.to_owned(),
            technique: technique.to_owned(),
            classes: Vec::new(),
            entry: None,
            targets: Vec::new(),
        }
    }

    fn push(&mut self, mark: Mark, simple: &str, builder: ClassBuilder) -> &mut Cls {
        self.classes.push(Cls::new(self.feature.package(), simple, mark, builder));
        self.classes.last_mut().unwrap()
    }

    fn qualify(&self, simple: &str) -> String {
        format!("{}/{}", self.feature.package(), simple)
    }

    /// A public class; `super_name` is a binary name.
    pub fn class(&mut self, mark: Mark, simple: &str, super_name: &str) -> &mut Cls {
        let b = ClassBuilder::new(&self.qualify(simple), super_name);
        self.push(mark, simple, b)
    }

    pub fn interface(&mut self, mark: Mark, simple: &str) -> &mut Cls {
        let b = ClassBuilder::interface(&self.qualify(simple));
        self.push(mark, simple, b)
    }

    /// An annotation type; `runtime` adds `@Retention(RUNTIME)`.
    pub fn annotation(&mut self, mark: Mark, simple: &str, runtime: bool) -> &mut Cls {
        let mut b = ClassBuilder::interface(&self.qualify(simple));
        b.access(access::PUBLIC | access::INTERFACE | access::ABSTRACT | access::ANNOTATION);
        b.implements("java/lang/annotation/Annotation");
        if runtime {
            b.runtime_retention();
        }
        self.push(mark, simple, b)
    }

    /// The case's entry class with a default constructor and
    /// `main(String[]) throws Exception`.
    pub fn entry(&mut self, simple: &str, body: impl FnOnce(&mut CodeBuilder)) -> &mut Cls {
        let main_mark = if self.feature.is_dynamic() { Mark::Driver } else { Req };
        self.entry = Some(self.qualify(simple));
        let c = self.class(Req, simple, OBJECT);
        c.ctor();
        let m = c.method(main_mark, access::PUBLIC | access::STATIC, "main", MAIN_DESC, body);
        c.raw().throws(m, &["java/lang/Exception"]);
        c
    }

    /// A construct reached only through a string at run time.
    pub fn target(&mut self, r: ConstructRef) -> &mut Self {
        self.targets.push(r);
        self
    }

    pub fn build(self) -> Result<TestCase, GenerationError> {
        let entry = self
            .entry
            .ok_or_else(|| GenerationError::GenerationInvariantViolation(format!("{} has no entry", self.id)))?;
        let mut truth = GroundTruth::default();
        for level in self.feature.absent_levels() {
            *truth.level_mut(*level) = LevelTruth::absent();
        }
        let mut classes = Vec::new();
        for c in self.classes {
            for (r, mark) in c.marks {
                let lt = truth.level_mut(r.level());
                if lt.absent {
                    continue;
                }
                match mark {
                    Mark::Req => lt.required.push(r),
                    Mark::Bloat => lt.bloated.push(r),
                    Mark::Driver => lt.excluded.push(r),
                }
            }
            classes.push(c.builder.build()?);
        }
        truth.check()?;
        Ok(TestCase {
            id: self.id,
            feature: self.feature,
            technique: self.technique,
            classes,
            truth,
            entry,
            reflective_targets: self.targets,
        })
    }
}

/// `new T(); dup; invokespecial T.<init>()V`.
pub(crate) fn new_default(c: &mut CodeBuilder, class: &str) {
    c.new_object(class).op(op::DUP).invokespecial(class, "<init>", "()V");
}

/// Pushes an empty array of `elem`.
pub(crate) fn empty_array(c: &mut CodeBuilder, elem: &str) {
    c.iconst(0).anewarray(elem);
}

/// Method ref in ground-truth spelling.
pub(crate) fn mref(class: &str, name: &str, desc: &str) -> ConstructRef {
    let d = parse_method_descriptor(desc).expect("fixture descriptor");
    ConstructRef::method(class, name, &d.return_source_name(), &d.param_source_names().join(","))
}

/// `System.out.println(prefix + value)` through StringBuilder, the way
/// javac 8 compiles it. `load` pushes the value of type `desc`.
pub(crate) fn print_concat(c: &mut CodeBuilder, prefix: &str, desc: &str, load: impl FnOnce(&mut CodeBuilder)) {
    const SB: &str = "java/lang/StringBuilder";
    out(c);
    new_default(c, SB);
    c.ldc_string(prefix);
    c.invokevirtual(SB, "append", "(Ljava/lang/String;)Ljava/lang/StringBuilder;");
    load(c);
    c.invokevirtual(SB, "append", &format!("({desc})Ljava/lang/StringBuilder;"));
    c.invokevirtual(SB, "toString", "()Ljava/lang/String;");
    print_top(c, "Ljava/lang/String;");
}

pub(crate) const BAOS: &str = "java/io/ByteArrayOutputStream";
pub(crate) const BAIS: &str = "java/io/ByteArrayInputStream";
pub(crate) const OOS: &str = "java/io/ObjectOutputStream";
pub(crate) const OIS: &str = "java/io/ObjectInputStream";
pub(crate) const SERIALIZABLE: &str = "java/io/Serializable";
pub(crate) const EXTERNALIZABLE: &str = "java/io/Externalizable";

/// Serializes the object pushed by `load` into a fresh
/// ByteArrayOutputStream stored in local `buffer`.
pub(crate) fn write_object(c: &mut CodeBuilder, buffer: u16, load: impl FnOnce(&mut CodeBuilder)) {
    new_default(c, BAOS);
    c.astore(buffer);
    c.new_object(OOS).op(op::DUP).aload(buffer).invokespecial(OOS, "<init>", "(Ljava/io/OutputStream;)V");
    c.op(op::DUP);
    load(c);
    c.invokevirtual(OOS, "writeObject", "(Ljava/lang/Object;)V");
    c.invokevirtual(OOS, "close", "()V");
}

/// Pushes the object read back from the buffer in local `buffer`.
pub(crate) fn read_object(c: &mut CodeBuilder, buffer: u16) {
    c.new_object(OIS).op(op::DUP);
    c.new_object(BAIS).op(op::DUP).aload(buffer).invokevirtual(BAOS, "toByteArray", "()[B");
    c.invokespecial(BAIS, "<init>", "([B)V");
    c.invokespecial(OIS, "<init>", "(Ljava/io/InputStream;)V");
    c.invokevirtual(OIS, "readObject", "()Ljava/lang/Object;");
}

/// Object stream holding one externalizable instance of `class` (dotted
/// name) whose `writeExternal` produced `block`. Bytes are mapped one to
/// one onto chars so the stream can live in a string constant and be
/// recovered with `getBytes("ISO-8859-1")`.
pub(crate) fn externalizable_stream(class: &str, uid: i64, block: &[u8]) -> String {
    const MAGIC: [u8; 4] = [0xac, 0xed, 0x00, 0x05];
    const TC_OBJECT: u8 = 0x73;
    const TC_CLASSDESC: u8 = 0x72;
    const TC_ENDBLOCKDATA: u8 = 0x78;
    const TC_NULL: u8 = 0x70;
    const TC_BLOCKDATA: u8 = 0x77;
    const SC_EXTERNALIZABLE: u8 = 0x04;
    const SC_BLOCK_DATA: u8 = 0x08;
    let mut b = MAGIC.to_vec();
    b.extend([TC_OBJECT, TC_CLASSDESC]);
    b.extend((class.len() as u16).to_be_bytes());
    b.extend(class.as_bytes());
    b.extend(uid.to_be_bytes());
    b.push(SC_EXTERNALIZABLE | SC_BLOCK_DATA);
    b.extend(0u16.to_be_bytes());
    b.extend([TC_ENDBLOCKDATA, TC_NULL]);
    b.extend([TC_BLOCKDATA, block.len() as u8]);
    b.extend(block);
    b.push(TC_ENDBLOCKDATA);
    b.into_iter().map(char::from).collect()
}
