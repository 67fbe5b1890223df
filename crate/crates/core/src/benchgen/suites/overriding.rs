use crate::benchgen::dsl::*;
use crate::benchgen::Feature;
use crate::classmodel::access::*;
use crate::classmodel::code::op;

const F: Feature = Feature::Overriding;
const STRING: &str = "Ljava/lang/String;";

pub(crate) fn cases() -> Vec<Case> {
    vec![simple_override(), sibling_overrides(), static_hiding(), super_call()]
}

fn simple_override() -> Case {
    let mut k = Case::new(F, "simple-override", "call through the parent type reaches the child override");
    let parent = k.class(Req, "Parent", OBJECT);
    parent.ctor();
    parent.method(Bloat, PUBLIC, "show", "()V", |c| {
        c.println("parent").op(op::RETURN);
    });
    let child = k.class(Req, "Child", "Overriding/Parent");
    child.ctor();
    child.method(Req, PUBLIC, "show", "()V", |c| {
        c.println("child").op(op::RETURN);
    });
    k.entry("ParentMain", |c| {
        new_default(c, "Overriding/Child");
        c.invokevirtual("Overriding/Parent", "show", "()V").op(op::RETURN);
    });
    k
}

fn sibling_overrides() -> Case {
    let mut k = Case::new(F, "sibling-overrides", "only one of two sibling overrides is instantiated");
    let inst = k.class(Req, "Instrument", OBJECT);
    inst.ctor();
    inst.method(Bloat, PUBLIC, "play", "()Ljava/lang/String;", |c| {
        c.ldc_string("...").op(op::ARETURN);
    });
    let guitar = k.class(Req, "Guitar", "Overriding/Instrument");
    guitar.ctor();
    guitar.method(Req, PUBLIC, "play", "()Ljava/lang/String;", |c| {
        c.ldc_string("strum").op(op::ARETURN);
    });
    let drum = k.class(Bloat, "Drum", "Overriding/Instrument");
    drum.ctor();
    drum.method(Bloat, PUBLIC, "play", "()Ljava/lang/String;", |c| {
        c.ldc_string("boom").op(op::ARETURN);
    });
    k.entry("BandMain", |c| {
        out(c);
        new_default(c, "Overriding/Guitar");
        c.invokevirtual("Overriding/Instrument", "play", "()Ljava/lang/String;");
        print_top(c, STRING);
        c.op(op::RETURN);
    });
    k
}

fn static_hiding() -> Case {
    let mut k = Case::new(F, "static-hiding", "static method hidden in a subclass, called through the parent type");
    let base = k.class(Req, "BaseGreeting", OBJECT);
    base.ctor();
    base.method(Req, PUBLIC | STATIC, "text", "()Ljava/lang/String;", |c| {
        c.ldc_string("hello").op(op::ARETURN);
    });
    let loud = k.class(Req, "LoudGreeting", "Overriding/BaseGreeting");
    loud.ctor();
    loud.method(Bloat, PUBLIC | STATIC, "text", "()Ljava/lang/String;", |c| {
        c.ldc_string("HELLO").op(op::ARETURN);
    });
    k.entry("GreetingMain", |c| {
        new_default(c, "Overriding/LoudGreeting");
        c.astore(1);
        out(c);
        c.aload(1).op(op::POP);
        c.invokestatic("Overriding/BaseGreeting", "text", "()Ljava/lang/String;");
        print_top(c, STRING);
        c.op(op::RETURN);
    });
    k
}

fn super_call() -> Case {
    let mut k = Case::new(F, "super-call", "override that delegates to the overridden method");
    let engine = k.class(Req, "Engine", OBJECT);
    engine.ctor();
    engine.method(Req, PUBLIC, "start", "()V", |c| {
        c.println("engine on").op(op::RETURN);
    });
    engine.method(Bloat, PUBLIC, "stop", "()V", |c| {
        c.println("engine off").op(op::RETURN);
    });
    let turbo = k.class(Req, "TurboEngine", "Overriding/Engine");
    turbo.ctor();
    turbo.method(Req, PUBLIC, "start", "()V", |c| {
        c.aload(0).invokespecial("Overriding/Engine", "start", "()V");
        c.println("turbo spooled").op(op::RETURN);
    });
    k.entry("EngineMain", |c| {
        new_default(c, "Overriding/TurboEngine");
        c.invokevirtual("Overriding/Engine", "start", "()V").op(op::RETURN);
    });
    k
}
