use crate::benchgen::dsl::*;
use crate::benchgen::Feature;
use crate::classmodel::access::*;
use crate::classmodel::code::op;
use crate::classmodel::{BootstrapArg, CodeBuilder, Target, REF_INVOKE_SPECIAL, REF_INVOKE_STATIC};

const F: Feature = Feature::Lambda;
const STRING: &str = "Ljava/lang/String;";
const INTEGER: &str = "java/lang/Integer";

pub(crate) fn cases() -> Vec<Case> {
    vec![capturing_consumer(), instance_capture(), static_function(), custom_functional()]
}

fn handle(kind: u8, owner: &str, name: &str, desc: &str) -> BootstrapArg {
    BootstrapArg::MethodHandle { kind, owner: owner.into(), name: name.into(), desc: desc.into(), interface: false }
}

fn lookup_inner(b: &mut Cls) {
    b.raw().inner_class(
        "java/lang/invoke/MethodHandles$Lookup",
        Some("java/lang/invoke/MethodHandles"),
        Some("Lookup"),
        PUBLIC | STATIC | FINAL,
    );
}

fn box_int(c: &mut CodeBuilder, v: i32) {
    c.iconst(v).invokestatic(INTEGER, "valueOf", "(I)Ljava/lang/Integer;");
}

fn capturing_consumer() -> Case {
    let mut k = Case::new(F, "capturing-consumer", "lambda capturing a local and calling a method on it");
    let wallet = k.class(Req, "Wallet", OBJECT);
    wallet.field(Req, PRIVATE, "balance", "I");
    wallet.field(Bloat, PRIVATE, "owner", STRING);
    wallet.ctor();
    wallet.method(Req, PUBLIC, "credit", "(I)V", |c| {
        c.aload(0).op(op::DUP).getfield("Lambda/Wallet", "balance", "I").iload(1).op(op::IADD);
        c.putfield("Lambda/Wallet", "balance", "I").op(op::RETURN);
    });
    wallet.method(Bloat, PUBLIC, "debit", "(I)V", |c| {
        c.aload(0).op(op::DUP).getfield("Lambda/Wallet", "balance", "I").iload(1).op(op::ISUB);
        c.putfield("Lambda/Wallet", "balance", "I").op(op::RETURN);
    });
    wallet.method(Req, PUBLIC, "balance", "()I", |c| {
        c.aload(0).getfield("Lambda/Wallet", "balance", "I").op(op::IRETURN);
    });
    wallet.method(Bloat, PUBLIC, "rename", "(Ljava/lang/String;)V", |c| {
        c.aload(0).aload(1).putfield("Lambda/Wallet", "owner", STRING).op(op::RETURN);
    });

    let main = k.entry("WalletMain", |c| {
        new_default(c, "Lambda/Wallet");
        c.astore(1).aload(1);
        c.lambda(
            ("java/util/function/Consumer", "accept", "(Ljava/lang/Object;)V"),
            handle(REF_INVOKE_STATIC, "Lambda/WalletMain", "lambda$main$0", "(LLambda/Wallet;Ljava/lang/Integer;)V"),
            "(Ljava/lang/Integer;)V",
            "(LLambda/Wallet;)",
        );
        box_int(c, 25);
        c.invokeinterface("java/util/function/Consumer", "accept", "(Ljava/lang/Object;)V");
        out(c);
        c.aload(1).invokevirtual("Lambda/Wallet", "balance", "()I");
        print_top(c, "I");
        c.op(op::RETURN);
    });
    main.method(Req, PRIVATE | STATIC | SYNTHETIC, "lambda$main$0", "(LLambda/Wallet;Ljava/lang/Integer;)V", |c| {
        c.aload(0).aload(1).invokevirtual(INTEGER, "intValue", "()I");
        c.invokevirtual("Lambda/Wallet", "credit", "(I)V").op(op::RETURN);
    });
    lookup_inner(main);
    k
}

fn instance_capture() -> Case {
    let mut k = Case::new(F, "instance-capture", "lambda capturing this and updating an instance field");
    let tally = k.class(Req, "Tally", OBJECT);
    tally.field(Req, PRIVATE, "total", "I");
    tally.field(Bloat, PRIVATE, "history", "[I");
    tally.ctor();
    tally.method(Req, PUBLIC, "run", "()V", |c| {
        c.aload(0);
        c.lambda(
            ("java/lang/Runnable", "run", "()V"),
            handle(REF_INVOKE_SPECIAL, "Lambda/Tally", "lambda$run$0", "()V"),
            "()V",
            "(LLambda/Tally;)",
        );
        c.op(op::DUP).invokeinterface("java/lang/Runnable", "run", "()V");
        c.invokeinterface("java/lang/Runnable", "run", "()V");
        print_concat(c, "total ", "I", |c| {
            c.aload(0).getfield("Lambda/Tally", "total", "I");
        });
        c.op(op::RETURN);
    });
    tally.method(Req, PRIVATE | SYNTHETIC, "lambda$run$0", "()V", |c| {
        c.aload(0).op(op::DUP).getfield("Lambda/Tally", "total", "I").iconst(1).op(op::IADD);
        c.putfield("Lambda/Tally", "total", "I").op(op::RETURN);
    });
    tally.method(Bloat, PUBLIC, "reset", "()V", |c| {
        c.aload(0).iconst(0).putfield("Lambda/Tally", "total", "I");
        c.aload(0).iconst(8).newarray(10);
        c.putfield("Lambda/Tally", "history", "[I").op(op::RETURN);
    });
    lookup_inner(tally);

    k.entry("TallyMain", |c| {
        new_default(c, "Lambda/Tally");
        c.invokevirtual("Lambda/Tally", "run", "()V").op(op::RETURN);
    });
    k
}

fn static_function() -> Case {
    let mut k = Case::new(F, "static-function", "non-capturing lambda reading a static field");
    let main = k.entry("LogicMain", |c| {
        c.lambda(
            ("java/util/function/Function", "apply", "(Ljava/lang/Object;)Ljava/lang/Object;"),
            handle(REF_INVOKE_STATIC, "Lambda/LogicMain", "lambda$main$0", "(Ljava/lang/Integer;)Ljava/lang/Integer;"),
            "(Ljava/lang/Integer;)Ljava/lang/Integer;",
            "()",
        );
        c.astore(1);
        out(c);
        c.aload(1);
        box_int(c, 4);
        c.invokeinterface("java/util/function/Function", "apply", "(Ljava/lang/Object;)Ljava/lang/Object;");
        print_top(c, "Ljava/lang/Object;");
        c.op(op::RETURN);
    });
    main.field(Req, PRIVATE | STATIC, "factor", "I");
    main.field(Bloat, PRIVATE | STATIC, "offset", "I");
    main.clinit(|c| {
        c.iconst(3).putstatic("Lambda/LogicMain", "factor", "I");
        c.iconst(1).putstatic("Lambda/LogicMain", "offset", "I").op(op::RETURN);
    });
    main.method(
        Req,
        PRIVATE | STATIC | SYNTHETIC,
        "lambda$main$0",
        "(Ljava/lang/Integer;)Ljava/lang/Integer;",
        |c| {
            c.aload(0).invokevirtual(INTEGER, "intValue", "()I");
            c.aload(0).invokevirtual(INTEGER, "intValue", "()I").op(op::IMUL);
            c.getstatic("Lambda/LogicMain", "factor", "I").op(op::IMUL);
            c.invokestatic(INTEGER, "valueOf", "(I)Ljava/lang/Integer;").op(op::ARETURN);
        },
    );
    main.method(Bloat, PUBLIC | STATIC, "cube", "(I)I", |c| {
        c.iload(0).iload(0).op(op::IMUL).iload(0).op(op::IMUL).op(op::IRETURN);
    });
    lookup_inner(main);
    k
}

fn custom_functional() -> Case {
    let mut k = Case::new(F, "custom-functional-interface", "lambda implementing an in-jar functional interface");
    let validator = k.interface(Req, "Validator");
    validator.abstract_method(Req, PUBLIC, "test", "(Ljava/lang/String;)Z");
    validator.raw().annotate(Target::Class, "Ljava/lang/FunctionalInterface;", true, &[]);
    let transformer = k.interface(Bloat, "Transformer");
    transformer.abstract_method(Bloat, PUBLIC, "transform", "(Ljava/lang/String;)Ljava/lang/String;");
    transformer.raw().annotate(Target::Class, "Ljava/lang/FunctionalInterface;", true, &[]);

    let main = k.entry("ValidatorMain", |c| {
        c.lambda(
            ("Lambda/Validator", "test", "(Ljava/lang/String;)Z"),
            handle(REF_INVOKE_STATIC, "Lambda/ValidatorMain", "lambda$main$0", "(Ljava/lang/String;)Z"),
            "(Ljava/lang/String;)Z",
            "()",
        );
        c.astore(1);
        out(c);
        c.aload(1).getstatic("Lambda/ValidatorMain", "input", STRING);
        c.invokeinterface("Lambda/Validator", "test", "(Ljava/lang/String;)Z");
        print_top(c, "Z");
        c.op(op::RETURN);
    });
    main.field(Req, PRIVATE | STATIC, "input", STRING);
    main.clinit(|c| {
        c.ldc_string("payload").putstatic("Lambda/ValidatorMain", "input", STRING).op(op::RETURN);
    });
    main.method(Req, PRIVATE | STATIC | SYNTHETIC, "lambda$main$0", "(Ljava/lang/String;)Z", |c| {
        c.aload(0).invokevirtual("java/lang/String", "isEmpty", "()Z").iconst(1).op(op::IXOR).op(op::IRETURN);
    });
    lookup_inner(main);
    k
}
