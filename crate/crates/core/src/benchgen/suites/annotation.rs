use crate::benchgen::dsl::*;
use crate::benchgen::Feature;
use crate::classmodel::access::*;
use crate::classmodel::code::op;
use crate::classmodel::{AnnotationValue, CodeBuilder, Target};

const F: Feature = Feature::Annotation;
const CLASS: &str = "java/lang/Class";
const METHOD: &str = "java/lang/reflect/Method";
const FIELD: &str = "java/lang/reflect/Field";
const IS_PRESENT: &str = "(Ljava/lang/Class;)Z";
const GET_ANNOTATION: &str = "(Ljava/lang/Class;)Ljava/lang/annotation/Annotation;";

pub(crate) fn cases() -> Vec<Case> {
    vec![
        class_presence(),
        field_presence(),
        method_presence(),
        element_value(),
        element_default(),
        redundant_runtime(),
        redundant_invisible(),
    ]
}

fn declared_method(c: &mut CodeBuilder, class: &str, name: &str) {
    c.ldc_class(class).ldc_string(name);
    empty_array(c, CLASS);
    c.invokevirtual(CLASS, "getDeclaredMethod", "(Ljava/lang/String;[Ljava/lang/Class;)Ljava/lang/reflect/Method;");
}

fn counter_method(c: &mut CodeBuilder, class: &str, field: &str, prefix: &str) {
    c.aload(0).op(op::DUP).getfield(class, field, "I").iconst(1).op(op::IADD).putfield(class, field, "I");
    print_concat(c, prefix, "I", |c| {
        c.aload(0).getfield(class, field, "I");
    });
    c.op(op::RETURN);
}

fn class_presence() -> Case {
    let mut k = Case::new(F, "class-annotation-presence", "behavior depends on a runtime annotation on a class");
    k.annotation(Req, "Audited", true);
    let ledger = k.class(Req, "Ledger", OBJECT);
    ledger.field(Req, PRIVATE, "entries", "I");
    ledger.ctor();
    ledger.method(Req, PUBLIC, "record", "()V", |c| counter_method(c, "Annotation/Ledger", "entries", "entries: "));
    ledger.method(Bloat, PUBLIC, "purge", "()V", |c| {
        c.aload(0).iconst(0).putfield("Annotation/Ledger", "entries", "I").op(op::RETURN);
    });
    ledger.raw().annotate(Target::Class, "LAnnotation/Audited;", true, &[]);

    k.entry("AuditMain", |c| {
        let (plain, end) = (c.label(), c.label());
        c.ldc_class("Annotation/Ledger").ldc_class("Annotation/Audited");
        c.invokevirtual(CLASS, "isAnnotationPresent", IS_PRESENT).branch(op::IFEQ, plain);
        new_default(c, "Annotation/Ledger");
        c.invokevirtual("Annotation/Ledger", "record", "()V").goto(end);
        c.place(plain).println("plain ledger");
        c.place(end).op(op::RETURN);
    });
    k
}

fn field_presence() -> Case {
    let mut k = Case::new(F, "field-annotation-presence", "behavior depends on a runtime annotation on a field");
    k.annotation(Req, "Secret", true);
    let config = k.class(Req, "Config", OBJECT);
    let password = config.field(Req, PUBLIC, "password", "Ljava/lang/String;");
    config.field(Bloat, PUBLIC, "user", "Ljava/lang/String;");
    config.raw().annotate(Target::Field(password), "LAnnotation/Secret;", true, &[]);
    config.init("()V", |c| {
        c.aload(0).invokespecial(OBJECT, "<init>", "()V");
        c.aload(0).ldc_string("hunter2").putfield("Annotation/Config", "password", "Ljava/lang/String;");
        c.op(op::RETURN);
    });
    config.method(Bloat, PUBLIC, "reset", "()V", |c| {
        c.aload(0).op(op::ACONST_NULL).putfield("Annotation/Config", "password", "Ljava/lang/String;");
        c.op(op::RETURN);
    });

    k.entry("FieldMain", |c| {
        let (plain, end) = (c.label(), c.label());
        new_default(c, "Annotation/Config");
        c.astore(1);
        c.ldc_class("Annotation/Config").ldc_string("password");
        c.invokevirtual(CLASS, "getDeclaredField", "(Ljava/lang/String;)Ljava/lang/reflect/Field;");
        c.ldc_class("Annotation/Secret").invokevirtual(FIELD, "isAnnotationPresent", IS_PRESENT);
        c.branch(op::IFEQ, plain);
        print_concat(c, "masked length ", "I", |c| {
            c.aload(1).getfield("Annotation/Config", "password", "Ljava/lang/String;");
            c.invokevirtual("java/lang/String", "length", "()I");
        });
        c.goto(end);
        c.place(plain).println("nothing to mask");
        c.place(end).op(op::RETURN);
    });
    k
}

fn method_presence() -> Case {
    let mut k = Case::new(F, "method-annotation-presence", "behavior depends on a runtime annotation on a method");
    k.annotation(Req, "Transactional", true);
    let service = k.class(Req, "Service", OBJECT);
    service.field(Req, PRIVATE, "calls", "I");
    service.field(Bloat, PRIVATE, "timeout", "I");
    service.ctor();
    let save = service.method(Req, PUBLIC, "save", "()V", |c| counter_method(c, "Annotation/Service", "calls", "saved, calls: "));
    service.raw().annotate(Target::Method(save), "LAnnotation/Transactional;", true, &[]);
    service.method(Bloat, PUBLIC, "load", "()I", |c| {
        c.aload(0).getfield("Annotation/Service", "timeout", "I").op(op::IRETURN);
    });

    k.entry("MethodMain", |c| {
        let end = c.label();
        declared_method(c, "Annotation/Service", "save");
        c.ldc_class("Annotation/Transactional").invokevirtual(METHOD, "isAnnotationPresent", IS_PRESENT);
        c.branch(op::IFEQ, end);
        new_default(c, "Annotation/Service");
        c.invokevirtual("Annotation/Service", "save", "()V");
        c.place(end).op(op::RETURN);
    });
    k
}

fn element_value() -> Case {
    let mut k = Case::new(F, "annotation-element-value", "an annotation element value steers how often a method runs");
    let retry = k.annotation(Req, "Retry", true);
    retry.abstract_method(Req, PUBLIC, "times", "()I");
    retry.abstract_method(Bloat, PUBLIC, "reason", "()Ljava/lang/String;");

    let task = k.class(Req, "Task", OBJECT);
    task.field(Req, PRIVATE, "attempts", "I");
    task.field(Bloat, PRIVATE, "lastError", "Ljava/lang/String;");
    task.ctor();
    let exec = task.method(Req, PUBLIC, "execute", "()V", |c| counter_method(c, "Annotation/Task", "attempts", "attempt "));
    task.raw().annotate(
        Target::Method(exec),
        "LAnnotation/Retry;",
        true,
        &[("times", AnnotationValue::Int(2)), ("reason", AnnotationValue::Str("flaky".into()))],
    );

    k.entry("RetryMain", |c| {
        let end = c.label();
        new_default(c, "Annotation/Task");
        c.astore(1);
        declared_method(c, "Annotation/Task", "execute");
        c.ldc_class("Annotation/Retry").invokevirtual(METHOD, "getAnnotation", GET_ANNOTATION);
        c.checkcast("Annotation/Retry").astore(2);
        c.aload(1).invokevirtual("Annotation/Task", "execute", "()V");
        c.aload(2).invokeinterface("Annotation/Retry", "times", "()I").iconst(1).branch(op::IF_ICMPLE, end);
        c.aload(1).invokevirtual("Annotation/Task", "execute", "()V");
        c.place(end).op(op::RETURN);
    });
    k
}

fn element_default() -> Case {
    let mut k = Case::new(F, "annotation-element-default", "an element's default value selects the code path");
    let verbosity = k.annotation(Req, "Verbosity", true);
    let value = verbosity.abstract_method(Req, PUBLIC, "value", "()I");
    verbosity.raw().annotation_default(value, AnnotationValue::Int(3));

    let journal = k.class(Req, "Journal", OBJECT);
    journal.field(Req, PRIVATE, "prefix", "Ljava/lang/String;");
    journal.field(Bloat, PRIVATE, "buffer", "Ljava/lang/StringBuilder;");
    journal.raw().annotate(Target::Class, "LAnnotation/Verbosity;", true, &[]);
    journal.init("()V", |c| {
        c.aload(0).invokespecial(OBJECT, "<init>", "()V");
        c.aload(0).ldc_string("[journal] ").putfield("Annotation/Journal", "prefix", "Ljava/lang/String;");
        c.op(op::RETURN);
    });
    journal.method(Req, PUBLIC, "verbose", "()V", |c| {
        out(c);
        c.aload(0).getfield("Annotation/Journal", "prefix", "Ljava/lang/String;");
        print_top(c, "Ljava/lang/String;");
        c.op(op::RETURN);
    });
    journal.method(Bloat, PUBLIC, "quiet", "()V", |c| {
        c.aload(0).getfield("Annotation/Journal", "buffer", "Ljava/lang/StringBuilder;");
        c.ldc_string("quiet").invokevirtual(
            "java/lang/StringBuilder",
            "append",
            "(Ljava/lang/String;)Ljava/lang/StringBuilder;",
        );
        c.op(op::POP).op(op::RETURN);
    });

    k.entry("DefaultMain", |c| {
        let (quiet, end) = (c.label(), c.label());
        c.ldc_class("Annotation/Journal").ldc_class("Annotation/Verbosity");
        c.invokevirtual(CLASS, "getAnnotation", GET_ANNOTATION).checkcast("Annotation/Verbosity");
        c.invokeinterface("Annotation/Verbosity", "value", "()I").iconst(2).branch(op::IF_ICMPLE, quiet);
        new_default(c, "Annotation/Journal");
        c.invokevirtual("Annotation/Journal", "verbose", "()V").goto(end);
        c.place(quiet);
        new_default(c, "Annotation/Journal");
        c.invokevirtual("Annotation/Journal", "quiet", "()V");
        c.place(end).op(op::RETURN);
    });
    k
}

fn redundant_runtime() -> Case {
    let mut k = Case::new(F, "redundant-runtime-annotation", "runtime-visible annotation that nothing ever queries");
    let legacy = k.annotation(Bloat, "Legacy", true);
    legacy.abstract_method(Bloat, PUBLIC, "since", "()Ljava/lang/String;");

    let parser = k.class(Req, "Parser", OBJECT);
    parser.field(Req, PRIVATE, "input", "Ljava/lang/String;");
    parser.field(Bloat, PRIVATE, "cache", "Ljava/lang/Object;");
    parser.raw().annotate(
        Target::Class,
        "LAnnotation/Legacy;",
        true,
        &[("since", AnnotationValue::Str("1.0".into()))],
    );
    parser.init("()V", |c| {
        c.aload(0).invokespecial(OBJECT, "<init>", "()V");
        c.aload(0).ldc_string("a=1").putfield("Annotation/Parser", "input", "Ljava/lang/String;");
        c.op(op::RETURN);
    });
    parser.method(Req, PUBLIC, "parse", "()V", |c| {
        print_concat(c, "parsing ", "Ljava/lang/String;", |c| {
            c.aload(0).getfield("Annotation/Parser", "input", "Ljava/lang/String;");
        });
        c.op(op::RETURN);
    });

    k.entry("ParserMain", |c| {
        new_default(c, "Annotation/Parser");
        c.invokevirtual("Annotation/Parser", "parse", "()V").op(op::RETURN);
    });
    k
}

fn redundant_invisible() -> Case {
    let mut k = Case::new(F, "redundant-class-retention", "class-retention annotation on members, invisible at run time");
    let note = k.annotation(Bloat, "Note", false);
    note.abstract_method(Bloat, PUBLIC, "value", "()Ljava/lang/String;");

    let fmt = k.class(Req, "Formatter", OBJECT);
    let width = fmt.field(Req, PRIVATE, "width", "I");
    fmt.raw().annotate(Target::Field(width), "LAnnotation/Note;", false, &[("value", AnnotationValue::Str("columns".into()))]);
    fmt.init("()V", |c| {
        c.aload(0).invokespecial(OBJECT, "<init>", "()V");
        c.aload(0).iconst(8).putfield("Annotation/Formatter", "width", "I").op(op::RETURN);
    });
    let format = fmt.method(Req, PUBLIC, "format", "()V", |c| {
        print_concat(c, "width ", "I", |c| {
            c.aload(0).getfield("Annotation/Formatter", "width", "I");
        });
        c.op(op::RETURN);
    });
    fmt.raw().annotate(Target::Method(format), "LAnnotation/Note;", false, &[("value", AnnotationValue::Str("entry".into()))]);
    fmt.method(Bloat, PUBLIC, "pad", "()V", |c| {
        c.println("    ").op(op::RETURN);
    });

    k.entry("FormatterMain", |c| {
        new_default(c, "Annotation/Formatter");
        c.invokevirtual("Annotation/Formatter", "format", "()V").op(op::RETURN);
    });
    k
}
