use crate::benchgen::dsl::*;
use crate::benchgen::Feature;
use crate::classmodel::access::*;
use crate::classmodel::code::op;

const F: Feature = Feature::Abstract;

pub(crate) fn cases() -> Vec<Case> {
    vec![anonymous_class(), concrete_subclass(), explicit_implementation(), unused_abstract_class(), partial_implementation(), unrelated_invocation()]
}

/// The Car/Main anonymous-class program.
fn anonymous_class() -> Case {
    let mut k = Case::new(F, "anonymous-class", "anonymous subclass of an abstract class");

    let car = k.class(Req, "Car", OBJECT);
    car.raw().access(SUPER | ABSTRACT);
    car.source_file("Main.java");
    car.field(Req, 0, "piston", "I");
    car.field(Bloat, 0, "material", "Ljava/lang/String;");
    car.init("()V", |c| {
        c.aload(0).invokespecial(OBJECT, "<init>", "()V");
        c.aload(0).iconst(4).putfield("Abstract/Car", "piston", "I");
        c.aload(0).ldc_string("aluminium").putfield("Abstract/Car", "material", "Ljava/lang/String;");
        c.op(op::RETURN);
    });
    car.abstract_method(Bloat, PUBLIC, "engine", "()V");
    car.abstract_method(Bloat, PUBLIC, "material", "()V");

    let main = k.entry("Main", |c| {
        new_default(c, "Abstract/Main$1");
        c.astore(1).aload(1).invokevirtual("Abstract/Car", "engine", "()V");
        c.op(op::RETURN);
    });
    main.source_file("Main.java");
    main.raw().inner_class("Abstract/Main$1", None, None, STATIC);

    let anon = k.class(Req, "Main$1", "Abstract/Car");
    anon.raw().access(SUPER);
    anon.source_file("Main.java");
    anon.init("()V", |c| {
        c.aload(0).invokespecial("Abstract/Car", "<init>", "()V").op(op::RETURN);
    });
    anon.method(Req, PUBLIC, "engine", "()V", |c| {
        print_concat(c, "No. of pistons in engine ", "I", |c| {
            c.aload(0).getfield("Abstract/Main$1", "piston", "I");
        });
        c.op(op::RETURN);
    });
    anon.method(Bloat, PUBLIC, "material", "()V", |c| {
        print_concat(c, "Engine's material ", "Ljava/lang/String;", |c| {
            c.aload(0).getfield("Abstract/Main$1", "material", "Ljava/lang/String;");
        });
        c.op(op::RETURN);
    });
    anon.raw().enclosing_method("Abstract/Main", Some(("main", MAIN_DESC)));
    anon.raw().inner_class("Abstract/Main$1", None, None, STATIC);
    k
}

fn concrete_subclass() -> Case {
    let mut k = Case::new(F, "concrete-subclass", "non-abstract subclass instantiated through the abstract type");
    let shape = k.class(Req, "Shape", OBJECT);
    shape.raw().access(PUBLIC | SUPER | ABSTRACT);
    shape.ctor();
    shape.abstract_method(Bloat, PUBLIC, "area", "()D");
    shape.abstract_method(Bloat, PUBLIC, "name", "()Ljava/lang/String;");

    let circle = k.class(Req, "Circle", "Abstract/Shape");
    circle.field(Req, PRIVATE, "radius", "D");
    circle.init("(D)V", |c| {
        c.aload(0).invokespecial("Abstract/Shape", "<init>", "()V");
        c.aload(0).dload(1).putfield("Abstract/Circle", "radius", "D").op(op::RETURN);
    });
    circle.method(Req, PUBLIC, "area", "()D", |c| {
        c.dconst(3.14159).aload(0).getfield("Abstract/Circle", "radius", "D").op(op::DMUL);
        c.aload(0).getfield("Abstract/Circle", "radius", "D").op(op::DMUL).op(op::DRETURN);
    });
    circle.method(Bloat, PUBLIC, "name", "()Ljava/lang/String;", |c| {
        c.ldc_string("circle").op(op::ARETURN);
    });

    let square = k.class(Bloat, "Square", "Abstract/Shape");
    square.field(Bloat, PRIVATE, "side", "D");
    square.init("(D)V", |c| {
        c.aload(0).invokespecial("Abstract/Shape", "<init>", "()V");
        c.aload(0).dload(1).putfield("Abstract/Square", "side", "D").op(op::RETURN);
    });
    square.method(Bloat, PUBLIC, "area", "()D", |c| {
        c.aload(0).getfield("Abstract/Square", "side", "D");
        c.aload(0).getfield("Abstract/Square", "side", "D").op(op::DMUL).op(op::DRETURN);
    });
    square.method(Bloat, PUBLIC, "name", "()Ljava/lang/String;", |c| {
        c.ldc_string("square").op(op::ARETURN);
    });

    k.entry("ShapeMain", |c| {
        c.new_object("Abstract/Circle").op(op::DUP).dconst(2.0);
        c.invokespecial("Abstract/Circle", "<init>", "(D)V").astore(1);
        out(c);
        c.aload(1).invokevirtual("Abstract/Shape", "area", "()D");
        print_top(c, "D");
        c.op(op::RETURN);
    });
    k
}

fn explicit_implementation() -> Case {
    let mut k = Case::new(F, "explicit-implementation", "subclass implementing every abstract method explicitly");
    let account = k.class(Req, "Account", OBJECT);
    account.raw().access(PUBLIC | SUPER | ABSTRACT);
    account.ctor();
    account.abstract_method(Bloat, PUBLIC, "deposit", "(I)V");
    account.abstract_method(Bloat, PUBLIC, "balance", "()I");

    let savings = k.class(Req, "Savings", "Abstract/Account");
    savings.field(Req, PRIVATE, "total", "I");
    savings.field(Bloat, PRIVATE, "interestRate", "D");
    savings.ctor();
    savings.method(Req, PUBLIC, "deposit", "(I)V", |c| {
        c.aload(0).op(op::DUP).getfield("Abstract/Savings", "total", "I").iload(1).op(op::IADD);
        c.putfield("Abstract/Savings", "total", "I").op(op::RETURN);
    });
    savings.method(Req, PUBLIC, "balance", "()I", |c| {
        c.aload(0).getfield("Abstract/Savings", "total", "I").op(op::IRETURN);
    });
    savings.method(Bloat, PUBLIC, "applyInterest", "()V", |c| {
        c.aload(0).aload(0).getfield("Abstract/Savings", "total", "I").op(op::I2D);
        c.aload(0).getfield("Abstract/Savings", "interestRate", "D").op(op::DMUL).op(op::D2I);
        c.putfield("Abstract/Savings", "total", "I").op(op::RETURN);
    });

    k.entry("AccountMain", |c| {
        new_default(c, "Abstract/Savings");
        c.astore(1);
        c.aload(1).iconst(100).invokevirtual("Abstract/Account", "deposit", "(I)V");
        out(c);
        c.aload(1).invokevirtual("Abstract/Account", "balance", "()I");
        print_top(c, "I");
        c.op(op::RETURN);
    });
    k
}

fn unused_abstract_class() -> Case {
    let mut k = Case::new(F, "unused-abstract-class", "abstract class and subclass never used by the program");
    let vehicle = k.class(Bloat, "Vehicle", OBJECT);
    vehicle.raw().access(PUBLIC | SUPER | ABSTRACT);
    vehicle.field(Bloat, PROTECTED, "wheels", "I");
    vehicle.ctor();
    vehicle.abstract_method(Bloat, PUBLIC, "drive", "()V");
    vehicle.method(Bloat, PUBLIC, "honk", "()V", |c| {
        c.println("honk").op(op::RETURN);
    });

    let bike = k.class(Bloat, "Bike", "Abstract/Vehicle");
    bike.ctor();
    bike.method(Bloat, PUBLIC, "drive", "()V", |c| {
        print_concat(c, "pedalling on ", "I", |c| {
            c.aload(0).getfield("Abstract/Bike", "wheels", "I");
        });
        c.op(op::RETURN);
    });

    k.entry("UnusedMain", |c| {
        c.println("no vehicles today").op(op::RETURN);
    });
    k
}

fn partial_implementation() -> Case {
    let mut k = Case::new(F, "partial-implementation", "abstract class mixing a template method with an abstract step");
    let template = k.class(Req, "Template", OBJECT);
    template.raw().access(PUBLIC | SUPER | ABSTRACT);
    template.field(Req, PROTECTED, "steps", "I");
    template.ctor();
    template.method(Req, PUBLIC | FINAL, "run", "()V", |c| {
        c.aload(0).invokevirtual("Abstract/Template", "step", "()V");
        c.aload(0).invokevirtual("Abstract/Template", "log", "()V");
        c.op(op::RETURN);
    });
    template.abstract_method(Bloat, PROTECTED, "step", "()V");
    template.method(Req, PROTECTED, "log", "()V", |c| {
        print_concat(c, "steps done: ", "I", |c| {
            c.aload(0).getfield("Abstract/Template", "steps", "I");
        });
        c.op(op::RETURN);
    });
    template.method(Bloat, PROTECTED, "unusedHook", "()V", |c| {
        c.println("hook").op(op::RETURN);
    });

    let worker = k.class(Req, "Worker", "Abstract/Template");
    worker.field(Bloat, PRIVATE, "label", "Ljava/lang/String;");
    worker.ctor();
    worker.method(Req, PROTECTED, "step", "()V", |c| {
        c.aload(0).op(op::DUP).getfield("Abstract/Worker", "steps", "I").iconst(1).op(op::IADD);
        c.putfield("Abstract/Worker", "steps", "I").op(op::RETURN);
    });

    k.entry("TemplateMain", |c| {
        new_default(c, "Abstract/Worker");
        c.invokevirtual("Abstract/Template", "run", "()V").op(op::RETURN);
    });
    k
}

fn unrelated_invocation() -> Case {
    let mut k = Case::new(F, "unrelated-invocation", "call to a subclass method the abstract class does not declare");
    let animal = k.class(Req, "Animal", OBJECT);
    animal.raw().access(PUBLIC | SUPER | ABSTRACT);
    animal.field(Bloat, PROTECTED, "legs", "I");
    animal.ctor();
    animal.abstract_method(Bloat, PUBLIC, "sound", "()Ljava/lang/String;");

    let dog = k.class(Req, "Dog", "Abstract/Animal");
    dog.field(Req, PRIVATE, "toy", "Ljava/lang/String;");
    dog.init("()V", |c| {
        c.aload(0).invokespecial("Abstract/Animal", "<init>", "()V");
        c.aload(0).ldc_string("ball").putfield("Abstract/Dog", "toy", "Ljava/lang/String;").op(op::RETURN);
    });
    dog.method(Bloat, PUBLIC, "sound", "()Ljava/lang/String;", |c| {
        c.ldc_string("woof").op(op::ARETURN);
    });
    dog.method(Req, PUBLIC, "fetch", "()V", |c| {
        print_concat(c, "fetching the ", "Ljava/lang/String;", |c| {
            c.aload(0).getfield("Abstract/Dog", "toy", "Ljava/lang/String;");
        });
        c.op(op::RETURN);
    });

    k.entry("AnimalMain", |c| {
        new_default(c, "Abstract/Dog");
        c.invokevirtual("Abstract/Dog", "fetch", "()V").op(op::RETURN);
    });
    k
}
