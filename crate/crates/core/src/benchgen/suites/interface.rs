use crate::benchgen::dsl::*;
use crate::benchgen::Feature;
use crate::classmodel::access::*;
use crate::classmodel::code::op;
use crate::classmodel::{BootstrapArg, Target, REF_INVOKE_STATIC};

const F: Feature = Feature::Interface;
const STRING: &str = "Ljava/lang/String;";
const LOOKUP: &str = "java/lang/invoke/MethodHandles$Lookup";

pub(crate) fn cases() -> Vec<Case> {
    vec![single_implementation(), anonymous_implementation(), multiple_interfaces(), functional_interface()]
}

fn single_implementation() -> Case {
    let mut k = Case::new(F, "single-implementation", "interface call dispatched to the only instantiated implementor");
    let greeter = k.interface(Req, "Greeter");
    greeter.abstract_method(Bloat, PUBLIC, "greet", "(Ljava/lang/String;)Ljava/lang/String;");

    let english = k.class(Req, "EnglishGreeter", OBJECT);
    english.implements("Interface/Greeter");
    english.field(Req, PRIVATE, "salutation", STRING);
    english.field(Bloat, PRIVATE, "locale", STRING);
    english.init("()V", |c| {
        c.aload(0).invokespecial(OBJECT, "<init>", "()V");
        c.aload(0).ldc_string("Hello, ").putfield("Interface/EnglishGreeter", "salutation", STRING);
        c.aload(0).ldc_string("en").putfield("Interface/EnglishGreeter", "locale", STRING).op(op::RETURN);
    });
    english.method(Req, PUBLIC, "greet", "(Ljava/lang/String;)Ljava/lang/String;", |c| {
        c.aload(0).getfield("Interface/EnglishGreeter", "salutation", STRING).aload(1);
        c.invokevirtual("java/lang/String", "concat", "(Ljava/lang/String;)Ljava/lang/String;").op(op::ARETURN);
    });

    let french = k.class(Bloat, "FrenchGreeter", OBJECT);
    french.implements("Interface/Greeter");
    french.ctor();
    french.method(Bloat, PUBLIC, "greet", "(Ljava/lang/String;)Ljava/lang/String;", |c| {
        c.ldc_string("Bonjour, ").aload(1);
        c.invokevirtual("java/lang/String", "concat", "(Ljava/lang/String;)Ljava/lang/String;").op(op::ARETURN);
    });

    k.entry("GreeterMain", |c| {
        out(c);
        new_default(c, "Interface/EnglishGreeter");
        c.ldc_string("world").invokeinterface("Interface/Greeter", "greet", "(Ljava/lang/String;)Ljava/lang/String;");
        print_top(c, STRING);
        c.op(op::RETURN);
    });
    k
}

fn anonymous_implementation() -> Case {
    let mut k = Case::new(F, "anonymous-implementation", "anonymous class implementing an interface");
    let job = k.interface(Req, "Job");
    job.abstract_method(Bloat, PUBLIC, "perform", "()V");
    job.abstract_method(Bloat, PUBLIC, "cancel", "()V");

    let main = k.entry("AnonMain", |c| {
        new_default(c, "Interface/AnonMain$1");
        c.invokeinterface("Interface/Job", "perform", "()V").op(op::RETURN);
    });
    main.source_file("AnonMain.java");
    main.raw().inner_class("Interface/AnonMain$1", None, None, STATIC);

    let anon = k.class(Req, "AnonMain$1", OBJECT);
    anon.raw().access(SUPER);
    anon.implements("Interface/Job");
    anon.source_file("AnonMain.java");
    anon.field(Req, 0, "tag", STRING);
    anon.init("()V", |c| {
        c.aload(0).invokespecial(OBJECT, "<init>", "()V");
        c.aload(0).ldc_string("nightly").putfield("Interface/AnonMain$1", "tag", STRING).op(op::RETURN);
    });
    anon.method(Req, PUBLIC, "perform", "()V", |c| {
        print_concat(c, "running ", STRING, |c| {
            c.aload(0).getfield("Interface/AnonMain$1", "tag", STRING);
        });
        c.op(op::RETURN);
    });
    anon.method(Bloat, PUBLIC, "cancel", "()V", |c| {
        c.println("cancelled").op(op::RETURN);
    });
    anon.raw().enclosing_method("Interface/AnonMain", Some(("main", MAIN_DESC)));
    anon.raw().inner_class("Interface/AnonMain$1", None, None, STATIC);
    k
}

fn multiple_interfaces() -> Case {
    let mut k = Case::new(F, "multiple-interfaces", "class implementing several interfaces used through one of them");
    let flyer = k.interface(Req, "Flyer");
    flyer.abstract_method(Bloat, PUBLIC, "fly", "()I");
    let swimmer = k.interface(Req, "Swimmer");
    swimmer.abstract_method(Bloat, PUBLIC, "swim", "()I");
    k.interface(Req, "Amphibian").implements("Interface/Flyer").implements("Interface/Swimmer");

    let duck = k.class(Req, "Duck", OBJECT);
    duck.implements("Interface/Amphibian");
    duck.field(Req, PRIVATE, "altitude", "I");
    duck.field(Bloat, PRIVATE, "depth", "I");
    duck.init("()V", |c| {
        c.aload(0).invokespecial(OBJECT, "<init>", "()V");
        c.aload(0).iconst(30).putfield("Interface/Duck", "altitude", "I");
        c.aload(0).iconst(2).putfield("Interface/Duck", "depth", "I").op(op::RETURN);
    });
    duck.method(Req, PUBLIC, "fly", "()I", |c| {
        c.aload(0).getfield("Interface/Duck", "altitude", "I").op(op::IRETURN);
    });
    duck.method(Bloat, PUBLIC, "swim", "()I", |c| {
        c.aload(0).getfield("Interface/Duck", "depth", "I").op(op::IRETURN);
    });
    duck.method(Bloat, PUBLIC, "quack", "()V", |c| {
        c.println("quack").op(op::RETURN);
    });

    k.entry("DuckMain", |c| {
        out(c);
        new_default(c, "Interface/Duck");
        c.invokeinterface("Interface/Flyer", "fly", "()I");
        print_top(c, "I");
        c.op(op::RETURN);
    });
    k
}

fn functional_interface() -> Case {
    let mut k = Case::new(F, "functional-interface", "custom functional interface implemented by a lambda");
    let calc = k.interface(Req, "Calculator");
    calc.abstract_method(Req, PUBLIC, "apply", "(II)I");
    calc.method(Bloat, PUBLIC, "describe", "()Ljava/lang/String;", |c| {
        c.ldc_string("calculator").op(op::ARETURN);
    });
    calc.raw().annotate(Target::Class, "Ljava/lang/FunctionalInterface;", true, &[]);

    let main = k.entry("LambdaCalcMain", |c| {
        c.lambda(
            ("Interface/Calculator", "apply", "(II)I"),
            BootstrapArg::MethodHandle {
                kind: REF_INVOKE_STATIC,
                owner: "Interface/LambdaCalcMain".into(),
                name: "lambda$main$0".into(),
                desc: "(II)I".into(),
                interface: false,
            },
            "(II)I",
            "()",
        );
        c.iconst(6).iconst(7).invokeinterface("Interface/Calculator", "apply", "(II)I");
        c.putstatic("Interface/LambdaCalcMain", "last", "I");
        out(c);
        c.getstatic("Interface/LambdaCalcMain", "last", "I");
        print_top(c, "I");
        c.op(op::RETURN);
    });
    main.field(Req, STATIC, "last", "I");
    main.method(Req, PRIVATE | STATIC | SYNTHETIC, "lambda$main$0", "(II)I", |c| {
        c.iload(0).iload(1).op(op::IMUL).op(op::IRETURN);
    });
    main.raw().inner_class(LOOKUP, Some("java/lang/invoke/MethodHandles"), Some("Lookup"), PUBLIC | STATIC | FINAL);
    k
}
