use crate::benchgen::dsl::*;
use crate::benchgen::Feature;
use crate::classmodel::access::*;
use crate::classmodel::code::op;

const F: Feature = Feature::Deserialization;
const STRING: &str = "Ljava/lang/String;";

pub(crate) fn cases() -> Vec<Case> {
    vec![standard(), custom_read_object()]
}

fn standard() -> Case {
    let mut k = Case::new(F, "standard-deserialization", "default deserialization of a serializable class");
    let profile = k.class(Req, "Profile", OBJECT);
    profile.implements(SERIALIZABLE);
    profile.serial_version(Req, 1);
    profile.field(Req, PRIVATE, "name", STRING);
    profile.field(Req, PRIVATE, "age", "I");
    profile.field(Bloat, PRIVATE | TRANSIENT, "session", STRING);
    profile.init("(Ljava/lang/String;I)V", |c| {
        c.aload(0).invokespecial(OBJECT, "<init>", "()V");
        c.aload(0).aload(1).putfield("Deserialization/Profile", "name", STRING);
        c.aload(0).iload(2).putfield("Deserialization/Profile", "age", "I");
        c.op(op::RETURN);
    });
    profile.method(Req, PUBLIC, "getName", "()Ljava/lang/String;", |c| {
        c.aload(0).getfield("Deserialization/Profile", "name", STRING).op(op::ARETURN);
    });
    profile.method(Req, PUBLIC, "getAge", "()I", |c| {
        c.aload(0).getfield("Deserialization/Profile", "age", "I").op(op::IRETURN);
    });
    profile.method(Bloat, PUBLIC, "describe", "()Ljava/lang/String;", |c| {
        c.aload(0).getfield("Deserialization/Profile", "session", STRING).op(op::ARETURN);
    });

    k.entry("ProfileMain", |c| {
        write_object(c, 1, |c| {
            c.new_object("Deserialization/Profile").op(op::DUP).ldc_string("Ada").iconst(36);
            c.invokespecial("Deserialization/Profile", "<init>", "(Ljava/lang/String;I)V");
        });
        read_object(c, 1);
        c.checkcast("Deserialization/Profile").astore(2);
        print_concat(c, "name ", STRING, |c| {
            c.aload(2).invokevirtual("Deserialization/Profile", "getName", "()Ljava/lang/String;");
        });
        print_concat(c, "age ", "I", |c| {
            c.aload(2).invokevirtual("Deserialization/Profile", "getAge", "()I");
        });
        c.op(op::RETURN);
    });
    k
}

fn custom_read_object() -> Case {
    let mut k = Case::new(F, "custom-read-object", "private readObject restoring transient state");
    let session = k.class(Req, "Session", OBJECT);
    session.implements(SERIALIZABLE);
    session.serial_version(Req, 7);
    session.field(Req, 0, "user", STRING);
    session.field(Req, TRANSIENT, "token", "I");
    session.field(Bloat, TRANSIENT, "cache", "Ljava/lang/Object;");
    session.init("(Ljava/lang/String;)V", |c| {
        c.aload(0).invokespecial(OBJECT, "<init>", "()V");
        c.aload(0).aload(1).putfield("Deserialization/Session", "user", STRING).op(op::RETURN);
    });
    let read = session.method(Req, PRIVATE, "readObject", "(Ljava/io/ObjectInputStream;)V", |c| {
        c.aload(1).invokevirtual(OIS, "defaultReadObject", "()V");
        c.aload(0).iconst(42).putfield("Deserialization/Session", "token", "I").op(op::RETURN);
    });
    session.raw().throws(read, &["java/io/IOException", "java/lang/ClassNotFoundException"]);
    session.method(Bloat, PUBLIC, "validate", "()Z", |c| {
        c.aload(0).getfield("Deserialization/Session", "cache", "Ljava/lang/Object;");
        c.instanceof("java/lang/String").op(op::IRETURN);
    });

    k.entry("SessionMain", |c| {
        write_object(c, 1, |c| {
            c.new_object("Deserialization/Session").op(op::DUP).ldc_string("root");
            c.invokespecial("Deserialization/Session", "<init>", "(Ljava/lang/String;)V");
        });
        read_object(c, 1);
        c.checkcast("Deserialization/Session").astore(2);
        print_concat(c, "user ", STRING, |c| {
            c.aload(2).getfield("Deserialization/Session", "user", STRING);
        });
        print_concat(c, "token ", "I", |c| {
            c.aload(2).getfield("Deserialization/Session", "token", "I");
        });
        c.op(op::RETURN);
    });
    k
}
