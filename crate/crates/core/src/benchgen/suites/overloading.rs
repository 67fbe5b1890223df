use crate::benchgen::dsl::*;
use crate::benchgen::Feature;
use crate::classmodel::access::*;
use crate::classmodel::code::op;

const F: Feature = Feature::Overloading;
const STRING: &str = "Ljava/lang/String;";

pub(crate) fn cases() -> Vec<Case> {
    vec![arity(), static_type(), widening(), parameter_order(), widening_over_boxing(), float_promotion()]
}

fn arity() -> Case {
    let mut k = Case::new(F, "arity", "overloads that differ in parameter count");
    let adder = k.class(Req, "Adder", OBJECT);
    adder.ctor();
    adder.method(Req, PUBLIC, "add", "(II)I", |c| {
        c.iload(1).iload(2).op(op::IADD).op(op::IRETURN);
    });
    adder.method(Bloat, PUBLIC, "add", "(III)I", |c| {
        c.iload(1).iload(2).op(op::IADD).iload(3).op(op::IADD).op(op::IRETURN);
    });
    k.entry("AdderMain", |c| {
        out(c);
        new_default(c, "Overloading/Adder");
        c.iconst(2).iconst(3).invokevirtual("Overloading/Adder", "add", "(II)I");
        print_top(c, "I");
        c.op(op::RETURN);
    });
    k
}

fn static_type() -> Case {
    let mut k = Case::new(F, "static-type-selection", "overload chosen by the declared type, not the runtime type");
    let d = k.class(Req, "Describer", OBJECT);
    d.ctor();
    d.method(Req, PUBLIC | STATIC, "describe", "(Ljava/lang/Object;)Ljava/lang/String;", |c| {
        c.ldc_string("object").op(op::ARETURN);
    });
    d.method(Bloat, PUBLIC | STATIC, "describe", "(Ljava/lang/String;)Ljava/lang/String;", |c| {
        c.ldc_string("string").op(op::ARETURN);
    });
    k.entry("DescriberMain", |c| {
        c.ldc_string("text").astore(1);
        out(c);
        c.aload(1).invokestatic("Overloading/Describer", "describe", "(Ljava/lang/Object;)Ljava/lang/String;");
        print_top(c, STRING);
        c.op(op::RETURN);
    });
    k
}

fn widening() -> Case {
    let mut k = Case::new(F, "primitive-widening", "int argument widened to the double overload");
    let conv = k.class(Req, "Converter", OBJECT);
    conv.ctor();
    conv.method(Req, PUBLIC, "convert", "(D)Ljava/lang/String;", |c| {
        c.dload(1).invokestatic("java/lang/Double", "toString", "(D)Ljava/lang/String;").op(op::ARETURN);
    });
    conv.method(Bloat, PUBLIC, "convert", "(Ljava/lang/Integer;)Ljava/lang/String;", |c| {
        c.aload(1).invokevirtual("java/lang/Integer", "toString", "()Ljava/lang/String;").op(op::ARETURN);
    });
    k.entry("ConverterMain", |c| {
        out(c);
        new_default(c, "Overloading/Converter");
        c.iconst(7).op(op::I2D).invokevirtual("Overloading/Converter", "convert", "(D)Ljava/lang/String;");
        print_top(c, STRING);
        c.op(op::RETURN);
    });
    k
}

fn parameter_order() -> Case {
    let mut k = Case::new(F, "parameter-order", "overloads with the same types in a different order");
    let joiner = k.class(Req, "Joiner", OBJECT);
    joiner.ctor();
    joiner.method(Req, PUBLIC, "join", "(ILjava/lang/String;)Ljava/lang/String;", |c| {
        c.iload(1).invokestatic("java/lang/String", "valueOf", "(I)Ljava/lang/String;").aload(2);
        c.invokevirtual("java/lang/String", "concat", "(Ljava/lang/String;)Ljava/lang/String;").op(op::ARETURN);
    });
    joiner.method(Bloat, PUBLIC, "join", "(Ljava/lang/String;I)Ljava/lang/String;", |c| {
        c.aload(1).iload(2).invokestatic("java/lang/String", "valueOf", "(I)Ljava/lang/String;");
        c.invokevirtual("java/lang/String", "concat", "(Ljava/lang/String;)Ljava/lang/String;").op(op::ARETURN);
    });
    k.entry("JoinerMain", |c| {
        out(c);
        new_default(c, "Overloading/Joiner");
        c.iconst(3).ldc_string(" items");
        c.invokevirtual("Overloading/Joiner", "join", "(ILjava/lang/String;)Ljava/lang/String;");
        print_top(c, STRING);
        c.op(op::RETURN);
    });
    k
}

fn widening_over_boxing() -> Case {
    let mut k = Case::new(F, "widening-over-boxing", "widening preferred to boxing and varargs");
    let sel = k.class(Req, "Selector", OBJECT);
    sel.ctor();
    sel.method(Req, PUBLIC, "pick", "(J)Ljava/lang/String;", |c| {
        c.ldc_string("long").op(op::ARETURN);
    });
    sel.method(Bloat, PUBLIC, "pick", "(Ljava/lang/Integer;)Ljava/lang/String;", |c| {
        c.ldc_string("Integer").op(op::ARETURN);
    });
    sel.method(Bloat, PUBLIC, "pick", "(Ljava/lang/Object;)Ljava/lang/String;", |c| {
        c.ldc_string("Object").op(op::ARETURN);
    });
    sel.method(Bloat, PUBLIC | VARARGS, "pick", "([I)Ljava/lang/String;", |c| {
        c.ldc_string("int...").op(op::ARETURN);
    });
    k.entry("SelectorMain", |c| {
        out(c);
        new_default(c, "Overloading/Selector");
        c.iconst(5).op(op::I2L).invokevirtual("Overloading/Selector", "pick", "(J)Ljava/lang/String;");
        print_top(c, STRING);
        c.op(op::RETURN);
    });
    k
}

fn float_promotion() -> Case {
    let mut k = Case::new(F, "float-promotion", "float argument promoted to the double overload");
    let p = k.class(Req, "Promoter", OBJECT);
    p.ctor();
    p.method(Req, PUBLIC | STATIC, "show", "(D)V", |c| {
        out(c);
        c.dload(0);
        print_top(c, "D");
        c.op(op::RETURN);
    });
    p.method(Bloat, PUBLIC | STATIC, "show", "(J)V", |c| {
        out(c);
        c.lload(0);
        print_top(c, "J");
        c.op(op::RETURN);
    });
    p.method(Bloat, PUBLIC | STATIC, "show", "(Ljava/lang/Object;)V", |c| {
        out(c);
        c.aload(0);
        print_top(c, "Ljava/lang/Object;");
        c.op(op::RETURN);
    });
    k.entry("PromoterMain", |c| {
        c.op(op::FCONST_2).op(op::F2D).invokestatic("Overloading/Promoter", "show", "(D)V").op(op::RETURN);
    });
    k
}
