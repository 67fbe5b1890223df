use crate::benchgen::dsl::*;
use crate::benchgen::Feature;
use crate::classmodel::access::*;
use crate::classmodel::code::op;
use crate::classmodel::ConstructRef;

const F: Feature = Feature::DynamicClassLoading;
const CLASS: &str = "java/lang/Class";
const METHOD: &str = "java/lang/reflect/Method";
const STRING: &str = "Ljava/lang/String;";
const GET_METHOD: &str = "(Ljava/lang/String;[Ljava/lang/Class;)Ljava/lang/reflect/Method;";
const INVOKE: &str = "(Ljava/lang/Object;[Ljava/lang/Object;)Ljava/lang/Object;";

pub(crate) fn cases() -> Vec<Case> {
    vec![class_loader(), reflective_instantiation()]
}

fn class_loader() -> Case {
    let mut k = Case::new(F, "class-loader-instantiation", "class loaded by name through a class loader");
    let plugin = k.class(Req, "Plugin", OBJECT);
    plugin.field(Req, PRIVATE, "version", STRING);
    plugin.field(Bloat, PRIVATE, "priority", "I");
    plugin.init("()V", |c| {
        c.aload(0).invokespecial(OBJECT, "<init>", "()V");
        c.aload(0).ldc_string("1.2").putfield("DynamicClassLoading/Plugin", "version", STRING).op(op::RETURN);
    });
    plugin.method(Req, PUBLIC, "activate", "()V", |c| {
        print_concat(c, "plugin ", STRING, |c| {
            c.aload(0).getfield("DynamicClassLoading/Plugin", "version", STRING);
        });
        c.op(op::RETURN);
    });
    plugin.method(Bloat, PUBLIC, "deactivate", "()V", |c| {
        c.aload(0).iconst(0).putfield("DynamicClassLoading/Plugin", "priority", "I").op(op::RETURN);
    });

    let v2 = k.class(Bloat, "PluginV2", OBJECT);
    v2.field(Bloat, PRIVATE, "codename", STRING);
    v2.ctor();
    v2.method(Bloat, PUBLIC, "activate", "()V", |c| {
        out(c);
        c.aload(0).getfield("DynamicClassLoading/PluginV2", "codename", STRING);
        print_top(c, STRING);
        c.op(op::RETURN);
    });

    k.entry("LoaderMain", |c| {
        c.ldc_class("DynamicClassLoading/LoaderMain").invokevirtual(CLASS, "getClassLoader", "()Ljava/lang/ClassLoader;");
        c.ldc_string("DynamicClassLoading.Plugin");
        c.invokevirtual("java/lang/ClassLoader", "loadClass", "(Ljava/lang/String;)Ljava/lang/Class;").astore(1);
        c.aload(1).invokevirtual(CLASS, "newInstance", "()Ljava/lang/Object;").astore(2);
        c.aload(1).ldc_string("activate");
        empty_array(c, CLASS);
        c.invokevirtual(CLASS, "getMethod", GET_METHOD);
        c.aload(2);
        empty_array(c, OBJECT);
        c.invokevirtual(METHOD, "invoke", INVOKE).op(op::POP).op(op::RETURN);
    });
    k.target(ConstructRef::class("DynamicClassLoading", "Plugin"));
    k.target(ConstructRef::method("Plugin", "<init>", "void", ""));
    k.target(ConstructRef::method("Plugin", "activate", "void", ""));
    k.target(ConstructRef::field("Plugin", "version"));
    k
}

fn reflective_instantiation() -> Case {
    let mut k = Case::new(F, "reflective-instantiation", "instance created from a class name held in a string");
    let greeter = k.class(Req, "Greeter", OBJECT);
    greeter.field(Req, PRIVATE, "greeting", STRING);
    greeter.field(Bloat, PRIVATE, "count", "I");
    greeter.init("()V", |c| {
        c.aload(0).invokespecial(OBJECT, "<init>", "()V");
        c.aload(0).ldc_string("hello, ").putfield("DynamicClassLoading/Greeter", "greeting", STRING).op(op::RETURN);
    });
    greeter.method(Req, PUBLIC, "greet", "(Ljava/lang/String;)V", |c| {
        out(c);
        c.aload(0).getfield("DynamicClassLoading/Greeter", "greeting", STRING);
        c.aload(1).invokevirtual("java/lang/String", "concat", "(Ljava/lang/String;)Ljava/lang/String;");
        print_top(c, STRING);
        c.op(op::RETURN);
    });
    greeter.method(Bloat, PUBLIC, "wave", "()I", |c| {
        c.aload(0).getfield("DynamicClassLoading/Greeter", "count", "I").op(op::IRETURN);
    });

    let farewell = k.class(Bloat, "Farewell", OBJECT);
    farewell.field(Bloat, PRIVATE, "message", STRING);
    farewell.ctor();
    farewell.method(Bloat, PUBLIC, "say", "()V", |c| {
        out(c);
        c.aload(0).getfield("DynamicClassLoading/Farewell", "message", STRING);
        print_top(c, STRING);
        c.op(op::RETURN);
    });

    k.entry("ForNameMain", |c| {
        c.ldc_string("DynamicClassLoading.Greeter");
        c.invokestatic(CLASS, "forName", "(Ljava/lang/String;)Ljava/lang/Class;").astore(1);
        c.aload(1).invokevirtual(CLASS, "newInstance", "()Ljava/lang/Object;").astore(2);
        c.aload(1).ldc_string("greet");
        c.iconst(1).anewarray(CLASS).op(op::DUP).iconst(0).ldc_class("java/lang/String").op(op::AASTORE);
        c.invokevirtual(CLASS, "getMethod", GET_METHOD);
        c.aload(2);
        c.iconst(1).anewarray(OBJECT).op(op::DUP).iconst(0).ldc_string("world").op(op::AASTORE);
        c.invokevirtual(METHOD, "invoke", INVOKE).op(op::POP).op(op::RETURN);
    });
    k.target(ConstructRef::class("DynamicClassLoading", "Greeter"));
    k.target(ConstructRef::method("Greeter", "<init>", "void", ""));
    k.target(ConstructRef::method("Greeter", "greet", "void", "String"));
    k.target(ConstructRef::field("Greeter", "greeting"));
    k
}
