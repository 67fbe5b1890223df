use crate::benchgen::dsl::*;
use crate::benchgen::Feature;
use crate::classmodel::access::*;
use crate::classmodel::code::op;
use crate::classmodel::Target;

const F: Feature = Feature::Generics;
const STRING: &str = "Ljava/lang/String;";
const OBJ: &str = "Ljava/lang/Object;";
const TYPE_T: &str = "<T:Ljava/lang/Object;>Ljava/lang/Object;";

pub(crate) fn cases() -> Vec<Case> {
    vec![
        generic_class(),
        generic_inheritance(),
        generic_interface(),
        multiple_interfaces(),
        generic_overloads(),
        generic_array(),
        wildcard_bounds(),
    ]
}

fn generic_class() -> Case {
    let mut k = Case::new(F, "generic-class", "class parameterized by a type variable");
    let bx = k.class(Req, "Box", OBJECT);
    bx.raw().signature(Target::Class, TYPE_T);
    let value = bx.field(Req, PRIVATE, "value", OBJ);
    bx.raw().signature(Target::Field(value), "TT;");
    bx.init("(Ljava/lang/Object;)V", |c| {
        c.aload(0).invokespecial(OBJECT, "<init>", "()V");
        c.aload(0).aload(1).putfield("Generics/Box", "value", OBJ).op(op::RETURN);
    });
    let get = bx.method(Req, PUBLIC, "get", "()Ljava/lang/Object;", |c| {
        c.aload(0).getfield("Generics/Box", "value", OBJ).op(op::ARETURN);
    });
    bx.raw().signature(Target::Method(get), "()TT;");
    let set = bx.method(Bloat, PUBLIC, "set", "(Ljava/lang/Object;)V", |c| {
        c.aload(0).aload(1).putfield("Generics/Box", "value", OBJ).op(op::RETURN);
    });
    bx.raw().signature(Target::Method(set), "(TT;)V");
    bx.method(Bloat, PUBLIC, "isEmpty", "()Z", |c| {
        let empty = c.label();
        c.aload(0).getfield("Generics/Box", "value", OBJ).branch(op::IFNULL, empty);
        c.iconst(0).op(op::IRETURN);
        c.place(empty).iconst(1).op(op::IRETURN);
    });

    k.entry("BoxMain", |c| {
        c.new_object("Generics/Box").op(op::DUP).ldc_string("hello");
        c.invokespecial("Generics/Box", "<init>", "(Ljava/lang/Object;)V").astore(1);
        out(c);
        c.aload(1).invokevirtual("Generics/Box", "get", "()Ljava/lang/Object;").checkcast("java/lang/String");
        print_top(c, STRING);
        c.op(op::RETURN);
    });
    k
}

fn generic_inheritance() -> Case {
    let mut k = Case::new(F, "generic-inheritance", "subclass fixing the type arguments of a generic superclass");
    let pair = k.class(Req, "Pair", OBJECT);
    pair.raw().signature(Target::Class, "<A:Ljava/lang/Object;B:Ljava/lang/Object;>Ljava/lang/Object;");
    let first = pair.field(Req, PRIVATE, "first", OBJ);
    let second = pair.field(Bloat, PRIVATE, "second", OBJ);
    pair.raw().signature(Target::Field(first), "TA;").signature(Target::Field(second), "TB;");
    pair.init("(Ljava/lang/Object;Ljava/lang/Object;)V", |c| {
        c.aload(0).invokespecial(OBJECT, "<init>", "()V");
        c.aload(0).aload(1).putfield("Generics/Pair", "first", OBJ);
        c.aload(0).aload(2).putfield("Generics/Pair", "second", OBJ).op(op::RETURN);
    });
    let gf = pair.method(Req, PUBLIC, "getFirst", "()Ljava/lang/Object;", |c| {
        c.aload(0).getfield("Generics/Pair", "first", OBJ).op(op::ARETURN);
    });
    let gs = pair.method(Bloat, PUBLIC, "getSecond", "()Ljava/lang/Object;", |c| {
        c.aload(0).getfield("Generics/Pair", "second", OBJ).op(op::ARETURN);
    });
    pair.raw().signature(Target::Method(gf), "()TA;").signature(Target::Method(gs), "()TB;");

    let named = k.class(Req, "NamedPair", "Generics/Pair");
    named.raw().signature(Target::Class, "LGenerics/Pair<Ljava/lang/String;Ljava/lang/Integer;>;");
    named.init("(Ljava/lang/String;Ljava/lang/Integer;)V", |c| {
        c.aload(0).aload(1).aload(2);
        c.invokespecial("Generics/Pair", "<init>", "(Ljava/lang/Object;Ljava/lang/Object;)V").op(op::RETURN);
    });
    named.method(Bloat, PUBLIC, "label", "()Ljava/lang/String;", |c| {
        c.ldc_string("named").op(op::ARETURN);
    });

    k.entry("PairMain", |c| {
        out(c);
        c.new_object("Generics/NamedPair").op(op::DUP).ldc_string("x").iconst(1);
        c.invokestatic("java/lang/Integer", "valueOf", "(I)Ljava/lang/Integer;");
        c.invokespecial("Generics/NamedPair", "<init>", "(Ljava/lang/String;Ljava/lang/Integer;)V");
        c.invokevirtual("Generics/NamedPair", "getFirst", "()Ljava/lang/Object;").checkcast("java/lang/String");
        print_top(c, STRING);
        c.op(op::RETURN);
    });
    k
}

fn generic_interface() -> Case {
    let mut k = Case::new(F, "generic-interface", "generic interface implemented through a bridge method");
    let source = k.interface(Req, "Source");
    source.raw().signature(Target::Class, TYPE_T);
    let next = source.abstract_method(Bloat, PUBLIC, "next", "()Ljava/lang/Object;");
    source.raw().signature(Target::Method(next), "()TT;");

    let counter = k.class(Req, "Counter", OBJECT);
    counter.implements("Generics/Source");
    counter.raw().signature(Target::Class, "Ljava/lang/Object;LGenerics/Source<Ljava/lang/Integer;>;");
    counter.field(Req, PRIVATE, "n", "I");
    counter.ctor();
    counter.method(Req, PUBLIC, "next", "()Ljava/lang/Integer;", |c| {
        c.aload(0).op(op::DUP).getfield("Generics/Counter", "n", "I").iconst(1).op(op::IADD);
        c.putfield("Generics/Counter", "n", "I");
        c.aload(0).getfield("Generics/Counter", "n", "I");
        c.invokestatic("java/lang/Integer", "valueOf", "(I)Ljava/lang/Integer;").op(op::ARETURN);
    });
    counter.method(Req, PUBLIC | BRIDGE | SYNTHETIC, "next", "()Ljava/lang/Object;", |c| {
        c.aload(0).invokevirtual("Generics/Counter", "next", "()Ljava/lang/Integer;").op(op::ARETURN);
    });
    counter.method(Bloat, PUBLIC, "reset", "()V", |c| {
        c.aload(0).iconst(0).putfield("Generics/Counter", "n", "I").op(op::RETURN);
    });

    k.entry("SourceMain", |c| {
        out(c);
        new_default(c, "Generics/Counter");
        c.invokeinterface("Generics/Source", "next", "()Ljava/lang/Object;");
        print_top(c, OBJ);
        c.op(op::RETURN);
    });
    k
}

fn multiple_interfaces() -> Case {
    let mut k = Case::new(F, "multiple-generic-interfaces", "one class implementing two generic interfaces");
    let reader = k.interface(Req, "Reader");
    reader.raw().signature(Target::Class, TYPE_T);
    let read = reader.abstract_method(Bloat, PUBLIC, "read", "()Ljava/lang/Object;");
    reader.raw().signature(Target::Method(read), "()TT;");
    let writer = k.interface(Req, "Writer");
    writer.raw().signature(Target::Class, TYPE_T);
    let write = writer.abstract_method(Bloat, PUBLIC, "write", "(Ljava/lang/Object;)V");
    writer.raw().signature(Target::Method(write), "(TT;)V");
    let closer = k.interface(Bloat, "Closer");
    closer.raw().signature(Target::Class, TYPE_T);
    let close = closer.abstract_method(Bloat, PUBLIC, "close", "(Ljava/lang/Object;)V");
    closer.raw().signature(Target::Method(close), "(TT;)V");

    let channel = k.class(Req, "Channel", OBJECT);
    channel.implements("Generics/Reader").implements("Generics/Writer");
    channel.raw().signature(
        Target::Class,
        "Ljava/lang/Object;LGenerics/Reader<Ljava/lang/String;>;LGenerics/Writer<Ljava/lang/String;>;",
    );
    channel.field(Req, PRIVATE, "buffer", STRING);
    channel.ctor();
    channel.method(Req, PUBLIC, "read", "()Ljava/lang/String;", |c| {
        c.aload(0).getfield("Generics/Channel", "buffer", STRING).op(op::ARETURN);
    });
    channel.method(Req, PUBLIC, "write", "(Ljava/lang/String;)V", |c| {
        c.aload(0).aload(1).putfield("Generics/Channel", "buffer", STRING).op(op::RETURN);
    });
    channel.method(Req, PUBLIC | BRIDGE | SYNTHETIC, "read", "()Ljava/lang/Object;", |c| {
        c.aload(0).invokevirtual("Generics/Channel", "read", "()Ljava/lang/String;").op(op::ARETURN);
    });
    channel.method(Req, PUBLIC | BRIDGE | SYNTHETIC, "write", "(Ljava/lang/Object;)V", |c| {
        c.aload(0).aload(1).checkcast("java/lang/String");
        c.invokevirtual("Generics/Channel", "write", "(Ljava/lang/String;)V").op(op::RETURN);
    });
    channel.method(Bloat, PUBLIC, "clear", "()V", |c| {
        c.aload(0).op(op::ACONST_NULL).putfield("Generics/Channel", "buffer", STRING).op(op::RETURN);
    });

    k.entry("ChannelMain", |c| {
        new_default(c, "Generics/Channel");
        c.astore(1);
        c.aload(1).ldc_string("ping").invokeinterface("Generics/Writer", "write", "(Ljava/lang/Object;)V");
        out(c);
        c.aload(1).invokeinterface("Generics/Reader", "read", "()Ljava/lang/Object;");
        print_top(c, OBJ);
        c.op(op::RETURN);
    });
    k
}

fn generic_overloads() -> Case {
    let mut k = Case::new(F, "generic-method-overloading", "overloads differing only in generic bounds after erasure");
    let printer = k.class(Req, "Printer", OBJECT);
    printer.field(Req, PRIVATE, "count", "I");
    printer.field(Bloat, PRIVATE, "prefix", STRING);
    printer.ctor();
    let any = printer.method(Bloat, PUBLIC, "show", "(Ljava/lang/Object;)V", |c| {
        out(c);
        c.aload(0).getfield("Generics/Printer", "prefix", STRING);
        print_top(c, STRING);
        c.op(op::RETURN);
    });
    printer.raw().signature(Target::Method(any), "<T:Ljava/lang/Object;>(TT;)V");
    printer.method(Req, PUBLIC, "show", "(Ljava/lang/String;)V", |c| {
        c.aload(0).op(op::DUP).getfield("Generics/Printer", "count", "I").iconst(1).op(op::IADD);
        c.putfield("Generics/Printer", "count", "I");
        print_concat(c, "text #", "I", |c| {
            c.aload(0).getfield("Generics/Printer", "count", "I");
        });
        c.op(op::RETURN);
    });
    let num = printer.method(Req, PUBLIC, "show", "(Ljava/lang/Number;)V", |c| {
        print_concat(c, "number ", OBJ, |c| {
            c.aload(1);
        });
        c.op(op::RETURN);
    });
    printer.raw().signature(Target::Method(num), "<T:Ljava/lang/Number;>(TT;)V");

    k.entry("PrinterMain", |c| {
        new_default(c, "Generics/Printer");
        c.astore(1);
        c.aload(1).ldc_string("text").invokevirtual("Generics/Printer", "show", "(Ljava/lang/String;)V");
        c.aload(1).iconst(5).invokestatic("java/lang/Integer", "valueOf", "(I)Ljava/lang/Integer;");
        c.invokevirtual("Generics/Printer", "show", "(Ljava/lang/Number;)V").op(op::RETURN);
    });
    k
}

fn generic_array() -> Case {
    let mut k = Case::new(F, "generic-array", "generic container backed by an erased array");
    let reg = k.class(Req, "Registry", OBJECT);
    reg.raw().signature(Target::Class, TYPE_T);
    let items = reg.field(Req, PRIVATE, "items", "[Ljava/lang/Object;");
    reg.raw().signature(Target::Field(items), "[TT;");
    reg.field(Bloat, PRIVATE, "capacity", "I");
    reg.init("(I)V", |c| {
        c.aload(0).invokespecial(OBJECT, "<init>", "()V");
        c.aload(0).iload(1).anewarray(OBJECT).putfield("Generics/Registry", "items", "[Ljava/lang/Object;");
        c.aload(0).iload(1).putfield("Generics/Registry", "capacity", "I").op(op::RETURN);
    });
    let add = reg.method(Req, PUBLIC, "add", "(ILjava/lang/Object;)V", |c| {
        c.aload(0).getfield("Generics/Registry", "items", "[Ljava/lang/Object;").iload(1).aload(2);
        c.op(op::AASTORE).op(op::RETURN);
    });
    reg.raw().signature(Target::Method(add), "(ITT;)V");
    let get = reg.method(Req, PUBLIC, "get", "(I)Ljava/lang/Object;", |c| {
        c.aload(0).getfield("Generics/Registry", "items", "[Ljava/lang/Object;").iload(1);
        c.op(op::AALOAD).op(op::ARETURN);
    });
    reg.raw().signature(Target::Method(get), "(I)TT;");
    reg.method(Bloat, PUBLIC, "size", "()I", |c| {
        c.aload(0).getfield("Generics/Registry", "capacity", "I").op(op::IRETURN);
    });

    k.entry("RegistryMain", |c| {
        c.new_object("Generics/Registry").op(op::DUP).iconst(4);
        c.invokespecial("Generics/Registry", "<init>", "(I)V").astore(1);
        c.aload(1).iconst(0).ldc_string("a").invokevirtual("Generics/Registry", "add", "(ILjava/lang/Object;)V");
        out(c);
        c.aload(1).iconst(0).invokevirtual("Generics/Registry", "get", "(I)Ljava/lang/Object;");
        c.checkcast("java/lang/String");
        print_top(c, STRING);
        c.op(op::RETURN);
    });
    k
}

fn wildcard_bounds() -> Case {
    let mut k = Case::new(F, "wildcard-bounds", "upper- and lower-bounded wildcard parameters");
    let stats = k.class(Req, "Stats", OBJECT);
    stats.field(Req, PRIVATE | STATIC, "calls", "I");
    stats.field(Bloat, PRIVATE | STATIC, "cache", "Ljava/util/List;");
    stats.ctor();
    let sum = stats.method(Req, PUBLIC | STATIC, "sum", "(Ljava/util/List;)D", |c| {
        c.getstatic("Generics/Stats", "calls", "I").iconst(1).op(op::IADD).putstatic("Generics/Stats", "calls", "I");
        for i in 0..2 {
            c.aload(0).iconst(i).invokeinterface("java/util/List", "get", "(I)Ljava/lang/Object;");
            c.checkcast("java/lang/Number").invokevirtual("java/lang/Number", "doubleValue", "()D");
        }
        c.op(op::DADD);
        c.getstatic("Generics/Stats", "calls", "I").op(op::I2D).op(op::DDIV).op(op::DRETURN);
    });
    stats.raw().signature(Target::Method(sum), "(Ljava/util/List<+Ljava/lang/Number;>;)D");
    let fill = stats.method(Bloat, PUBLIC | STATIC, "fill", "(Ljava/util/List;)V", |c| {
        c.aload(0).putstatic("Generics/Stats", "cache", "Ljava/util/List;");
        c.aload(0).iconst(1).invokestatic("java/lang/Integer", "valueOf", "(I)Ljava/lang/Integer;");
        c.invokeinterface("java/util/List", "add", "(Ljava/lang/Object;)Z").op(op::POP).op(op::RETURN);
    });
    stats.raw().signature(Target::Method(fill), "(Ljava/util/List<-Ljava/lang/Integer;>;)V");

    let range = k.class(Bloat, "Range", OBJECT);
    range.raw().signature(Target::Class, "<T::Ljava/lang/Comparable<TT;>;>Ljava/lang/Object;");
    let low = range.field(Bloat, PRIVATE, "low", "Ljava/lang/Comparable;");
    range.raw().signature(Target::Field(low), "TT;");
    range.ctor();
    let lowest = range.method(Bloat, PUBLIC, "lowest", "()Ljava/lang/Comparable;", |c| {
        c.aload(0).getfield("Generics/Range", "low", "Ljava/lang/Comparable;").op(op::ARETURN);
    });
    range.raw().signature(Target::Method(lowest), "()TT;");

    k.entry("StatsMain", |c| {
        new_default(c, "java/util/ArrayList");
        c.astore(1);
        for v in [3, 4] {
            c.aload(1).iconst(v).invokestatic("java/lang/Integer", "valueOf", "(I)Ljava/lang/Integer;");
            c.invokeinterface("java/util/List", "add", "(Ljava/lang/Object;)Z").op(op::POP);
        }
        out(c);
        c.aload(1).invokestatic("Generics/Stats", "sum", "(Ljava/util/List;)D");
        print_top(c, "D");
        c.op(op::RETURN);
    });
    k
}
