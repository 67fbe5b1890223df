use crate::benchgen::dsl::*;
use crate::benchgen::Feature;
use crate::classmodel::access::*;
use crate::classmodel::code::op;

const F: Feature = Feature::Externalization;
const STRING: &str = "Ljava/lang/String;";
const OBJECT_OUTPUT: &str = "java/io/ObjectOutput";
const OBJECT_INPUT: &str = "java/io/ObjectInput";
const WRITE_EXTERNAL: &str = "(Ljava/io/ObjectOutput;)V";
const READ_EXTERNAL: &str = "(Ljava/io/ObjectInput;)V";

pub(crate) fn cases() -> Vec<Case> {
    vec![read_only(), write_only()]
}

fn io_throws(cls: &mut Cls, write: usize, read: usize) {
    cls.raw().throws(write, &["java/io/IOException"]);
    cls.raw().throws(read, &["java/io/IOException", "java/lang/ClassNotFoundException"]);
}

/// An externalizable class no test path touches.
fn unused_externalizable(k: &mut Case, simple: &str) {
    let owner = format!("Externalization/{simple}");
    let cls = k.class(Bloat, simple, OBJECT);
    cls.implements(EXTERNALIZABLE);
    cls.serial_version(Bloat, 3);
    cls.field(Bloat, PRIVATE, "payload", "J");
    cls.ctor();
    let (o1, o2) = (owner.clone(), owner);
    let w = cls.method(Bloat, PUBLIC, "writeExternal", WRITE_EXTERNAL, |c| {
        c.aload(1).aload(0).getfield(&o1, "payload", "J").invokeinterface(OBJECT_OUTPUT, "writeLong", "(J)V");
        c.op(op::RETURN);
    });
    let r = cls.method(Bloat, PUBLIC, "readExternal", READ_EXTERNAL, |c| {
        c.aload(0).aload(1).invokeinterface(OBJECT_INPUT, "readLong", "()J").putfield(&o2, "payload", "J");
        c.op(op::RETURN);
    });
    io_throws(cls, w, r);
}

fn read_only() -> Case {
    let mut k = Case::new(F, "read-only", "externalizable object only ever read back from a stored stream");
    let settings = k.class(Req, "Settings", OBJECT);
    settings.implements(EXTERNALIZABLE);
    settings.serial_version(Req, 1);
    settings.field(Req, PRIVATE, "volume", "I");
    settings.field(Bloat, PRIVATE, "theme", STRING);
    settings.ctor();
    let w = settings.method(Bloat, PUBLIC, "writeExternal", WRITE_EXTERNAL, |c| {
        c.aload(1).aload(0).getfield("Externalization/Settings", "volume", "I");
        c.invokeinterface(OBJECT_OUTPUT, "writeInt", "(I)V").op(op::RETURN);
    });
    let r = settings.method(Req, PUBLIC, "readExternal", READ_EXTERNAL, |c| {
        c.aload(0).aload(1).invokeinterface(OBJECT_INPUT, "readInt", "()I");
        c.putfield("Externalization/Settings", "volume", "I").op(op::RETURN);
    });
    io_throws(settings, w, r);
    settings.method(Req, PUBLIC, "getVolume", "()I", |c| {
        c.aload(0).getfield("Externalization/Settings", "volume", "I").op(op::IRETURN);
    });
    settings.method(Bloat, PUBLIC, "reset", "()V", |c| {
        c.aload(0).ldc_string("light").putfield("Externalization/Settings", "theme", STRING).op(op::RETURN);
    });
    unused_externalizable(&mut k, "Snapshot");

    let stream = externalizable_stream("Externalization.Settings", 1, &7i32.to_be_bytes());
    k.entry("ReaderMain", move |c| {
        c.ldc_string(&stream).ldc_string("ISO-8859-1");
        c.invokevirtual("java/lang/String", "getBytes", "(Ljava/lang/String;)[B").astore(1);
        c.new_object(OIS).op(op::DUP);
        c.new_object(BAIS).op(op::DUP).aload(1).invokespecial(BAIS, "<init>", "([B)V");
        c.invokespecial(OIS, "<init>", "(Ljava/io/InputStream;)V");
        c.invokevirtual(OIS, "readObject", "()Ljava/lang/Object;").checkcast("Externalization/Settings").astore(2);
        print_concat(c, "volume ", "I", |c| {
            c.aload(2).invokevirtual("Externalization/Settings", "getVolume", "()I");
        });
        c.op(op::RETURN);
    });
    k
}

fn write_only() -> Case {
    let mut k = Case::new(F, "write-only", "externalizable object only ever written out");
    let report = k.class(Req, "Report", OBJECT);
    report.implements(EXTERNALIZABLE);
    report.serial_version(Req, 2);
    report.field(Req, PRIVATE, "title", STRING);
    report.field(Req, PRIVATE, "pages", "I");
    report.field(Bloat, PRIVATE, "draft", "Z");
    report.ctor();
    report.init("(Ljava/lang/String;I)V", |c| {
        c.aload(0).invokespecial(OBJECT, "<init>", "()V");
        c.aload(0).aload(1).putfield("Externalization/Report", "title", STRING);
        c.aload(0).iload(2).putfield("Externalization/Report", "pages", "I").op(op::RETURN);
    });
    let w = report.method(Req, PUBLIC, "writeExternal", WRITE_EXTERNAL, |c| {
        c.aload(1).aload(0).getfield("Externalization/Report", "title", STRING);
        c.invokeinterface(OBJECT_OUTPUT, "writeUTF", "(Ljava/lang/String;)V");
        c.aload(1).aload(0).getfield("Externalization/Report", "pages", "I");
        c.invokeinterface(OBJECT_OUTPUT, "writeInt", "(I)V").op(op::RETURN);
    });
    let r = report.method(Bloat, PUBLIC, "readExternal", READ_EXTERNAL, |c| {
        c.aload(0).aload(1).invokeinterface(OBJECT_INPUT, "readUTF", "()Ljava/lang/String;");
        c.putfield("Externalization/Report", "title", STRING);
        c.aload(0).aload(1).invokeinterface(OBJECT_INPUT, "readInt", "()I");
        c.putfield("Externalization/Report", "pages", "I").op(op::RETURN);
    });
    io_throws(report, w, r);
    report.method(Bloat, PUBLIC, "isDraft", "()Z", |c| {
        c.aload(0).getfield("Externalization/Report", "draft", "Z").op(op::IRETURN);
    });
    unused_externalizable(&mut k, "Archive");

    k.entry("WriterMain", |c| {
        write_object(c, 1, |c| {
            c.new_object("Externalization/Report").op(op::DUP).ldc_string("Q3").iconst(12);
            c.invokespecial("Externalization/Report", "<init>", "(Ljava/lang/String;I)V");
        });
        print_concat(c, "bytes written ", "I", |c| {
            c.aload(1).invokevirtual(BAOS, "size", "()I");
        });
        c.op(op::RETURN);
    });
    k
}
