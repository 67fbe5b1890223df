use crate::benchgen::dsl::*;
use crate::benchgen::Feature;
use crate::classmodel::access::*;
use crate::classmodel::code::op;
use crate::classmodel::{CodeBuilder, ConstructRef, Target, VerificationType};

const F: Feature = Feature::Reflection;
const CLASS: &str = "java/lang/Class";
const METHOD: &str = "java/lang/reflect/Method";
const FIELD: &str = "java/lang/reflect/Field";
const STRING: &str = "Ljava/lang/String;";
const INVOKE: &str = "(Ljava/lang/Object;[Ljava/lang/Object;)Ljava/lang/Object;";
const LOOKUP: &str = "(Ljava/lang/String;[Ljava/lang/Class;)Ljava/lang/reflect/Method;";

pub(crate) fn cases() -> Vec<Case> {
    vec![private_method(), enum_constant(), inherited_method(), public_members(), enum_method(), member_scan()]
}

/// Pushes `Method` for `name()` on the class object already on the stack.
fn method_named(c: &mut CodeBuilder, lookup: &str, name: &str) {
    c.ldc_string(name);
    empty_array(c, CLASS);
    c.invokevirtual(CLASS, lookup, LOOKUP);
}

/// Invokes the `Method` on the stack (below the receiver) with no arguments.
fn invoke_no_args(c: &mut CodeBuilder) {
    empty_array(c, OBJECT);
    c.invokevirtual(METHOD, "invoke", INVOKE);
}

/// A javac-shaped enum with one `value` field set from the constructor.
/// `push` loads the field value for the constant with the given ordinal.
fn enum_type<'a>(
    k: &'a mut Case,
    simple: &str,
    constants: &[&str],
    value: (&str, &str),
    push: impl Fn(&mut CodeBuilder, usize),
) -> &'a mut Cls {
    let name = format!("Reflection/{simple}");
    let array = format!("[L{name};");
    let ctor = format!("(Ljava/lang/String;I{})V", value.1);
    let e = k.class(Req, simple, "java/lang/Enum");
    e.raw().access(PUBLIC | FINAL | SUPER | ENUM);
    e.raw().signature(Target::Class, &format!("Ljava/lang/Enum<L{name};>;"));
    for constant in constants {
        e.field(Req, PUBLIC | STATIC | FINAL | ENUM, constant, &format!("L{name};"));
    }
    e.field(Req, PRIVATE | FINAL, value.0, value.1);
    e.field(Bloat, PRIVATE | STATIC | FINAL | SYNTHETIC, "$VALUES", &array);
    e.method(Bloat, PUBLIC | STATIC, "values", &format!("(){array}"), |c| {
        c.getstatic(&name, "$VALUES", &array).invokevirtual(&array, "clone", "()Ljava/lang/Object;");
        c.checkcast(&array).op(op::ARETURN);
    });
    e.method(Bloat, PUBLIC | STATIC, "valueOf", &format!("(Ljava/lang/String;)L{name};"), |c| {
        c.ldc_class(&name).aload(0);
        c.invokestatic("java/lang/Enum", "valueOf", "(Ljava/lang/Class;Ljava/lang/String;)Ljava/lang/Enum;");
        c.checkcast(&name).op(op::ARETURN);
    });
    e.raw().method(PRIVATE, "<init>", &ctor, |c| {
        c.aload(0).aload(1).iload(2).invokespecial("java/lang/Enum", "<init>", "(Ljava/lang/String;I)V");
        c.aload(0);
        match value.1 {
            "D" => c.dload(3),
            _ => c.iload(3),
        };
        c.putfield(&name, value.0, value.1).op(op::RETURN);
    });
    e.clinit(|c| {
        for (i, constant) in constants.iter().enumerate() {
            c.new_object(&name).op(op::DUP).ldc_string(constant).iconst(i as i32);
            push(c, i);
            c.invokespecial(&name, "<init>", &ctor).putstatic(&name, constant, &format!("L{name};"));
        }
        c.iconst(constants.len() as i32).anewarray(&name);
        for (i, constant) in constants.iter().enumerate() {
            c.op(op::DUP).iconst(i as i32).getstatic(&name, constant, &format!("L{name};")).op(op::AASTORE);
        }
        c.putstatic(&name, "$VALUES", &array).op(op::RETURN);
    });
    e
}

fn private_method() -> Case {
    let mut k = Case::new(F, "private-method", "private method invoked through getDeclaredMethod");
    let vault = k.class(Req, "Vault", OBJECT);
    vault.field(Req, PRIVATE, "secret", STRING);
    vault.field(Bloat, PRIVATE, "owner", STRING);
    vault.init("()V", |c| {
        c.aload(0).invokespecial(OBJECT, "<init>", "()V");
        c.aload(0).ldc_string("gold").putfield("Reflection/Vault", "secret", STRING);
        c.aload(0).ldc_string("bank").putfield("Reflection/Vault", "owner", STRING).op(op::RETURN);
    });
    vault.method(Req, PRIVATE, "open", "()Ljava/lang/String;", |c| {
        c.aload(0).getfield("Reflection/Vault", "secret", STRING).op(op::ARETURN);
    });
    vault.method(Bloat, PUBLIC, "close", "()V", |c| {
        c.aload(0).op(op::ACONST_NULL).putfield("Reflection/Vault", "secret", STRING).op(op::RETURN);
    });

    k.entry("VaultMain", |c| {
        c.ldc_class("Reflection/Vault");
        method_named(c, "getDeclaredMethod", "open");
        c.astore(1).aload(1).iconst(1).invokevirtual(METHOD, "setAccessible", "(Z)V");
        out(c);
        c.aload(1);
        new_default(c, "Reflection/Vault");
        invoke_no_args(c);
        print_top(c, "Ljava/lang/Object;");
        c.op(op::RETURN);
    });
    k.target(mref("Vault", "open", "()Ljava/lang/String;"));
    k
}

fn enum_constant() -> Case {
    let mut k = Case::new(F, "enum-constant-lookup", "enum constant read through getField and its method invoked");
    let planet = enum_type(&mut k, "Planet", &["MERCURY", "VENUS"], ("weight", "D"), |c, i| {
        c.dconst([0.33, 4.87][i]);
    });
    planet.method(Req, PUBLIC, "mass", "()D", |c| {
        c.aload(0).getfield("Reflection/Planet", "weight", "D").dconst(1e24).op(op::DMUL).op(op::DRETURN);
    });

    k.entry("PlanetMain", |c| {
        c.ldc_class("Reflection/Planet").ldc_string("VENUS");
        c.invokevirtual(CLASS, "getField", "(Ljava/lang/String;)Ljava/lang/reflect/Field;");
        c.op(op::ACONST_NULL).invokevirtual(FIELD, "get", "(Ljava/lang/Object;)Ljava/lang/Object;").astore(1);
        out(c);
        c.ldc_class("Reflection/Planet");
        method_named(c, "getMethod", "mass");
        c.aload(1);
        invoke_no_args(c);
        print_top(c, "Ljava/lang/Object;");
        c.op(op::RETURN);
    });
    k.target(ConstructRef::field("Planet", "VENUS")).target(mref("Planet", "mass", "()D"));
    k
}

fn inherited_method() -> Case {
    let mut k = Case::new(F, "inherited-method", "method looked up on the superclass object of a subclass");
    let base = k.class(Req, "Base", OBJECT);
    base.field(Req, PROTECTED, "code", "I");
    base.init("()V", |c| {
        c.aload(0).invokespecial(OBJECT, "<init>", "()V");
        c.aload(0).iconst(42).putfield("Reflection/Base", "code", "I").op(op::RETURN);
    });
    base.method(Req, PUBLIC, "id", "()I", |c| {
        c.aload(0).getfield("Reflection/Base", "code", "I").op(op::IRETURN);
    });
    let derived = k.class(Req, "Derived", "Reflection/Base");
    derived.field(Bloat, PRIVATE, "tag", STRING);
    derived.init("()V", |c| {
        c.aload(0).invokespecial("Reflection/Base", "<init>", "()V");
        c.aload(0).ldc_string("derived").putfield("Reflection/Derived", "tag", STRING).op(op::RETURN);
    });
    derived.method(Bloat, PUBLIC, "extra", "()Ljava/lang/String;", |c| {
        c.aload(0).getfield("Reflection/Derived", "tag", STRING).op(op::ARETURN);
    });

    k.entry("HierarchyMain", |c| {
        new_default(c, "Reflection/Derived");
        c.astore(1);
        c.ldc_class("Reflection/Derived").invokevirtual(CLASS, "getSuperclass", "()Ljava/lang/Class;");
        method_named(c, "getMethod", "id");
        c.astore(2);
        out(c);
        c.aload(2).aload(1);
        invoke_no_args(c);
        print_top(c, "Ljava/lang/Object;");
        c.op(op::RETURN);
    });
    k.target(mref("Base", "id", "()I"));
    k
}

fn public_members() -> Case {
    let mut k = Case::new(F, "public-members", "public field and method accessed by name");
    let record = k.class(Req, "Record", OBJECT);
    record.field(Req, PUBLIC, "count", "I");
    record.field(Bloat, PUBLIC, "label", STRING);
    record.init("()V", |c| {
        c.aload(0).invokespecial(OBJECT, "<init>", "()V");
        c.aload(0).iconst(3).putfield("Reflection/Record", "count", "I");
        c.aload(0).ldc_string("rec").putfield("Reflection/Record", "label", STRING).op(op::RETURN);
    });
    record.method(Req, PUBLIC, "summary", "()Ljava/lang/String;", |c| {
        c.aload(0).getfield("Reflection/Record", "count", "I");
        c.invokestatic("java/lang/String", "valueOf", "(I)Ljava/lang/String;").op(op::ARETURN);
    });
    record.method(Bloat, PUBLIC, "debug", "()V", |c| {
        out(c);
        c.aload(0).getfield("Reflection/Record", "label", STRING);
        print_top(c, STRING);
        c.op(op::RETURN);
    });

    k.entry("RecordMain", |c| {
        new_default(c, "Reflection/Record");
        c.astore(1);
        out(c);
        c.ldc_class("Reflection/Record").ldc_string("count");
        c.invokevirtual(CLASS, "getField", "(Ljava/lang/String;)Ljava/lang/reflect/Field;");
        c.aload(1).invokevirtual(FIELD, "getInt", "(Ljava/lang/Object;)I");
        print_top(c, "I");
        out(c);
        c.ldc_class("Reflection/Record");
        method_named(c, "getMethod", "summary");
        c.aload(1);
        invoke_no_args(c);
        print_top(c, "Ljava/lang/Object;");
        c.op(op::RETURN);
    });
    k.target(ConstructRef::field("Record", "count")).target(mref("Record", "summary", "()Ljava/lang/String;"));
    k
}

fn enum_method() -> Case {
    let mut k = Case::new(F, "enum-method", "enum method inspected and invoked through its Method object");
    let mode = enum_type(&mut k, "Mode", &["FAST", "SAFE"], ("code", "I"), |c, i| {
        c.iconst(i as i32 + 1);
    });
    mode.method(Req, PUBLIC, "label", "()Ljava/lang/String;", |c| {
        c.aload(0).invokevirtual("Reflection/Mode", "name", "()Ljava/lang/String;");
        c.aload(0).getfield("Reflection/Mode", "code", "I");
        c.invokestatic("java/lang/String", "valueOf", "(I)Ljava/lang/String;");
        c.invokevirtual("java/lang/String", "concat", "(Ljava/lang/String;)Ljava/lang/String;").op(op::ARETURN);
    });
    mode.method(Bloat, PUBLIC, "isSafe", "()Z", |c| {
        c.aload(0).getstatic("Reflection/Mode", "SAFE", "LReflection/Mode;");
        let no = c.label();
        c.branch(op::IF_ACMPNE, no).iconst(1).op(op::IRETURN);
        c.place(no).iconst(0).op(op::IRETURN);
    });

    k.entry("ModeMain", |c| {
        c.ldc_class("Reflection/Mode");
        method_named(c, "getMethod", "label");
        c.astore(1);
        out(c);
        c.aload(1).invokevirtual(METHOD, "getReturnType", "()Ljava/lang/Class;");
        print_top(c, "Ljava/lang/Object;");
        out(c);
        c.aload(1).getstatic("Reflection/Mode", "SAFE", "LReflection/Mode;");
        invoke_no_args(c);
        print_top(c, "Ljava/lang/Object;");
        c.op(op::RETURN);
    });
    k.target(mref("Mode", "label", "()Ljava/lang/String;"));
    k
}

fn member_scan() -> Case {
    let mut k = Case::new(F, "member-scan", "members selected by name prefix while iterating declared members");
    let ins = k.class(Req, "Inspectable", OBJECT);
    ins.field(Req, PUBLIC, "visibleName", STRING);
    ins.field(Req, PUBLIC, "visibleSize", "I");
    ins.field(Bloat, PRIVATE, "secret", STRING);
    ins.init("()V", |c| {
        c.aload(0).invokespecial(OBJECT, "<init>", "()V");
        c.aload(0).ldc_string("widget").putfield("Reflection/Inspectable", "visibleName", STRING);
        c.aload(0).iconst(12).putfield("Reflection/Inspectable", "visibleSize", "I");
        c.aload(0).ldc_string("hidden").putfield("Reflection/Inspectable", "secret", STRING).op(op::RETURN);
    });
    ins.method(Req, PUBLIC, "showName", "()V", |c| {
        c.println("name shown").op(op::RETURN);
    });
    ins.method(Req, PUBLIC, "showSize", "()V", |c| {
        c.println("size shown").op(op::RETURN);
    });
    ins.method(Bloat, PUBLIC, "hide", "()V", |c| {
        c.println("hidden").op(op::RETURN);
    });

    k.entry("ScanMain", |c| {
        let args = c.object_type("[Ljava/lang/String;");
        let obj = c.object_type("Reflection/Inspectable");
        let methods = c.object_type("[Ljava/lang/reflect/Method;");
        let fields = c.object_type("[Ljava/lang/reflect/Field;");
        let first = vec![args.clone(), obj.clone(), methods.clone(), VerificationType::Integer];
        let mut second = first.clone();
        second.extend([fields, VerificationType::Integer]);

        new_default(c, "Reflection/Inspectable");
        c.astore(1);
        c.ldc_class("Reflection/Inspectable");
        c.invokevirtual(CLASS, "getDeclaredMethods", "()[Ljava/lang/reflect/Method;").astore(2);
        c.iconst(0).istore(3);
        let (head, skip, done) = (c.label(), c.label(), c.label());
        c.frame_locals(head, first.clone()).frame_locals(skip, first.clone()).frame_locals(done, first);
        c.place(head).iload(3).aload(2).op(op::ARRAYLENGTH).branch(op::IF_ICMPGE, done);
        c.aload(2).iload(3).op(op::AALOAD).invokevirtual(METHOD, "getName", "()Ljava/lang/String;");
        c.ldc_string("show").invokevirtual("java/lang/String", "startsWith", "(Ljava/lang/String;)Z");
        c.branch(op::IFEQ, skip);
        c.aload(2).iload(3).op(op::AALOAD).aload(1);
        invoke_no_args(c);
        c.op(op::POP);
        c.place(skip).iinc(3, 1).goto(head);

        c.place(done).ldc_class("Reflection/Inspectable");
        c.invokevirtual(CLASS, "getDeclaredFields", "()[Ljava/lang/reflect/Field;").astore(4);
        c.iconst(0).istore(5);
        let (head, skip, done) = (c.label(), c.label(), c.label());
        c.frame_locals(head, second.clone()).frame_locals(skip, second.clone()).frame_locals(done, second);
        c.place(head).iload(5).aload(4).op(op::ARRAYLENGTH).branch(op::IF_ICMPGE, done);
        c.aload(4).iload(5).op(op::AALOAD).invokevirtual(FIELD, "getName", "()Ljava/lang/String;");
        c.ldc_string("visible").invokevirtual("java/lang/String", "startsWith", "(Ljava/lang/String;)Z");
        c.branch(op::IFEQ, skip);
        out(c);
        c.aload(4).iload(5).op(op::AALOAD).aload(1);
        c.invokevirtual(FIELD, "get", "(Ljava/lang/Object;)Ljava/lang/Object;");
        print_top(c, "Ljava/lang/Object;");
        c.place(skip).iinc(5, 1).goto(head);
        c.place(done).op(op::RETURN);
    });
    k.target(mref("Inspectable", "showName", "()V"))
        .target(mref("Inspectable", "showSize", "()V"))
        .target(ConstructRef::field("Inspectable", "visibleName"))
        .target(ConstructRef::field("Inspectable", "visibleSize"));
    k
}
