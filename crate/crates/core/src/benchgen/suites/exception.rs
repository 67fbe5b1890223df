use crate::benchgen::dsl::*;
use crate::benchgen::Feature;
use crate::classmodel::access::*;
use crate::classmodel::code::op;
use crate::classmodel::CodeBuilder;

const F: Feature = Feature::Exception;
const STRING: &str = "Ljava/lang/String;";
const MSG_CTOR: &str = "(Ljava/lang/String;)V";

pub(crate) fn cases() -> Vec<Case> {
    vec![custom_checked(), exception_fields(), hierarchy(), unchecked()]
}

/// A constructor passing its message to `sup`.
fn message_ctor(cls: &mut Cls, sup: &str) {
    let sup = sup.to_owned();
    cls.init(MSG_CTOR, move |c| {
        c.aload(0).aload(1).invokespecial(&sup, "<init>", MSG_CTOR).op(op::RETURN);
    });
}

/// `try { call } catch (caught e) { handler(e in local 1) }`.
fn try_call(c: &mut CodeBuilder, caught: &str, call: impl FnOnce(&mut CodeBuilder), handler: impl FnOnce(&mut CodeBuilder)) {
    let (start, end, catch, done) = (c.label(), c.label(), c.label(), c.label());
    c.try_catch(start, end, catch, Some(caught));
    c.place(start);
    call(c);
    c.place(end).goto(done);
    c.place(catch).astore(1);
    handler(c);
    c.place(done).op(op::RETURN);
}

/// Throws `class(message)` unless the `skip` branch on the value on top
/// of the stack is taken.
fn throw_unless(c: &mut CodeBuilder, skip: u8, class: &str, message: &str) {
    let ok = c.label();
    c.branch(skip, ok);
    c.new_object(class).op(op::DUP).ldc_string(message).invokespecial(class, "<init>", MSG_CTOR).op(op::ATHROW);
    c.place(ok).op(op::RETURN);
}

fn custom_checked() -> Case {
    let mut k = Case::new(F, "custom-checked-exception", "custom checked exception thrown and caught");
    let ex = k.class(Req, "ValidationException", "java/lang/Exception");
    message_ctor(ex, "java/lang/Exception");
    ex.method(Bloat, PUBLIC, "hint", "()Ljava/lang/String;", |c| {
        c.ldc_string("use a positive value").op(op::ARETURN);
    });

    let main = k.entry("ValidateMain", |c| {
        try_call(
            c,
            "Exception/ValidationException",
            |c| {
                c.iconst(-1).invokestatic("Exception/ValidateMain", "validate", "(I)V");
            },
            |c| {
                print_concat(c, "invalid: ", STRING, |c| {
                    c.aload(1).invokevirtual("Exception/ValidationException", "getMessage", "()Ljava/lang/String;");
                });
            },
        );
    });
    let v = main.method(Req, PUBLIC | STATIC, "validate", "(I)V", |c| {
        c.iload(0);
        throw_unless(c, op::IFGE, "Exception/ValidationException", "negative value");
    });
    main.raw().throws(v, &["Exception/ValidationException"]);
    k
}

fn exception_fields() -> Case {
    let mut k = Case::new(F, "exception-with-fields", "custom exception carrying extra state");
    let ex = k.class(Req, "InsufficientFundsException", "java/lang/Exception");
    ex.field(Req, PRIVATE, "amount", "I");
    ex.field(Bloat, PRIVATE, "account", STRING);
    ex.init("(Ljava/lang/String;I)V", |c| {
        c.aload(0).ldc_string("insufficient funds").invokespecial("java/lang/Exception", "<init>", MSG_CTOR);
        c.aload(0).aload(1).putfield("Exception/InsufficientFundsException", "account", STRING);
        c.aload(0).iload(2).putfield("Exception/InsufficientFundsException", "amount", "I").op(op::RETURN);
    });
    ex.method(Req, PUBLIC, "getAmount", "()I", |c| {
        c.aload(0).getfield("Exception/InsufficientFundsException", "amount", "I").op(op::IRETURN);
    });
    ex.method(Bloat, PUBLIC, "getAccount", "()Ljava/lang/String;", |c| {
        c.aload(0).getfield("Exception/InsufficientFundsException", "account", STRING).op(op::ARETURN);
    });

    let main = k.entry("FundsMain", |c| {
        try_call(
            c,
            "Exception/InsufficientFundsException",
            |c| {
                c.iconst(50).invokestatic("Exception/FundsMain", "withdraw", "(I)V");
            },
            |c| {
                print_concat(c, "short by ", "I", |c| {
                    c.aload(1).invokevirtual("Exception/InsufficientFundsException", "getAmount", "()I");
                });
            },
        );
    });
    let w = main.method(Req, PUBLIC | STATIC, "withdraw", "(I)V", |c| {
        c.new_object("Exception/InsufficientFundsException").op(op::DUP).ldc_string("acc-1").iload(0);
        c.invokespecial("Exception/InsufficientFundsException", "<init>", "(Ljava/lang/String;I)V").op(op::ATHROW);
    });
    main.raw().throws(w, &["Exception/InsufficientFundsException"]);
    k
}

fn hierarchy() -> Case {
    let mut k = Case::new(F, "exception-hierarchy", "subclass exception caught through its superclass");
    let app = k.class(Req, "AppException", "java/lang/Exception");
    message_ctor(app, "java/lang/Exception");
    app.method(Bloat, PUBLIC, "severity", "()I", |c| {
        c.iconst(1).op(op::IRETURN);
    });
    let data = k.class(Req, "DataException", "Exception/AppException");
    message_ctor(data, "Exception/AppException");
    data.method(Req, PUBLIC, "severity", "()I", |c| {
        c.iconst(2).op(op::IRETURN);
    });
    let net = k.class(Bloat, "NetworkException", "Exception/AppException");
    message_ctor(net, "Exception/AppException");
    net.method(Bloat, PUBLIC, "severity", "()I", |c| {
        c.iconst(3).op(op::IRETURN);
    });

    let main = k.entry("HierarchyMain", |c| {
        try_call(
            c,
            "Exception/AppException",
            |c| {
                c.invokestatic("Exception/HierarchyMain", "load", "()V");
            },
            |c| {
                print_concat(c, "severity ", "I", |c| {
                    c.aload(1).invokevirtual("Exception/AppException", "severity", "()I");
                });
            },
        );
    });
    let l = main.method(Req, PUBLIC | STATIC, "load", "()V", |c| {
        c.new_object("Exception/DataException").op(op::DUP).ldc_string("missing row");
        c.invokespecial("Exception/DataException", "<init>", MSG_CTOR).op(op::ATHROW);
    });
    main.raw().throws(l, &["Exception/AppException"]);
    k
}

fn unchecked() -> Case {
    let mut k = Case::new(F, "unchecked-exception", "custom runtime exception escaping a helper");
    let err = k.class(Req, "ConfigError", "java/lang/RuntimeException");
    err.field(Req, PRIVATE, "key", STRING);
    err.init(MSG_CTOR, |c| {
        c.aload(0).aload(1).invokespecial("java/lang/RuntimeException", "<init>", MSG_CTOR);
        c.aload(0).aload(1).putfield("Exception/ConfigError", "key", STRING).op(op::RETURN);
    });
    err.method(Req, PUBLIC, "getKey", "()Ljava/lang/String;", |c| {
        c.aload(0).getfield("Exception/ConfigError", "key", STRING).op(op::ARETURN);
    });
    let timeout = k.class(Bloat, "TimeoutError", "java/lang/RuntimeException");
    message_ctor(timeout, "java/lang/RuntimeException");
    timeout.field(Bloat, PRIVATE, "millis", "J");

    let main = k.entry("ConfigMain", |c| {
        try_call(
            c,
            "Exception/ConfigError",
            |c| {
                c.ldc_string("").invokestatic("Exception/ConfigMain", "require", "(Ljava/lang/String;)V");
            },
            |c| {
                print_concat(c, "missing key ", STRING, |c| {
                    c.aload(1).invokevirtual("Exception/ConfigError", "getKey", "()Ljava/lang/String;");
                });
            },
        );
    });
    main.method(Req, PUBLIC | STATIC, "require", "(Ljava/lang/String;)V", |c| {
        c.aload(0).invokevirtual("java/lang/String", "isEmpty", "()Z");
        throw_unless(c, op::IFEQ, "Exception/ConfigError", "port");
    });
    k
}
