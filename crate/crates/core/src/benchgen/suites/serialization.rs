use crate::benchgen::dsl::*;
use crate::benchgen::Feature;
use crate::classmodel::access::*;
use crate::classmodel::code::op;
use crate::classmodel::CodeBuilder;

const F: Feature = Feature::Serialization;
const STRING: &str = "Ljava/lang/String;";

pub(crate) fn cases() -> Vec<Case> {
    vec![object_graph(), inherited_state(), non_serializable_parent(), static_state(), transient_state()]
}

/// Serializes the object pushed by `load`, reads it back and prints it.
fn round_trip(c: &mut CodeBuilder, class: &str, load: impl FnOnce(&mut CodeBuilder)) {
    write_object(c, 1, load);
    out(c);
    read_object(c, 1);
    c.checkcast(class);
    print_top(c, "Ljava/lang/Object;");
    c.op(op::RETURN);
}

fn object_graph() -> Case {
    let mut k = Case::new(F, "object-graph", "serializable object holding another serializable object");
    let customer = k.class(Req, "Customer", OBJECT);
    customer.implements(SERIALIZABLE).serial_version(Req, 1);
    customer.field(Req, PRIVATE, "name", STRING);
    customer.init("(Ljava/lang/String;)V", |c| {
        c.aload(0).invokespecial(OBJECT, "<init>", "()V");
        c.aload(0).aload(1).putfield("Serialization/Customer", "name", STRING).op(op::RETURN);
    });

    let order = k.class(Req, "Order", OBJECT);
    order.implements(SERIALIZABLE).serial_version(Req, 1);
    order.field(Req, PRIVATE, "id", "I");
    order.field(Req, PRIVATE, "customer", "LSerialization/Customer;");
    order.init("(ILSerialization/Customer;)V", |c| {
        c.aload(0).invokespecial(OBJECT, "<init>", "()V");
        c.aload(0).iload(1).putfield("Serialization/Order", "id", "I");
        c.aload(0).aload(2).putfield("Serialization/Order", "customer", "LSerialization/Customer;");
        c.op(op::RETURN);
    });

    let invoice = k.class(Bloat, "Invoice", OBJECT);
    invoice.implements(SERIALIZABLE).serial_version(Bloat, 1);
    invoice.field(Bloat, PRIVATE, "amount", "D");
    invoice.ctor();

    k.entry("OrderMain", |c| {
        round_trip(c, "Serialization/Order", |c| {
            c.new_object("Serialization/Order").op(op::DUP).iconst(7);
            c.new_object("Serialization/Customer").op(op::DUP).ldc_string("Ann");
            c.invokespecial("Serialization/Customer", "<init>", "(Ljava/lang/String;)V");
            c.invokespecial("Serialization/Order", "<init>", "(ILSerialization/Customer;)V");
        });
    });
    k
}

fn inherited_state() -> Case {
    let mut k = Case::new(F, "inherited-state", "serializable subclass of a serializable class");
    let person = k.class(Req, "Person", OBJECT);
    person.implements(SERIALIZABLE).serial_version(Req, 1);
    person.field(Req, PROTECTED, "name", STRING);
    person.field(Bloat, PROTECTED | STATIC, "count", "I");
    person.init("(Ljava/lang/String;)V", |c| {
        c.aload(0).invokespecial(OBJECT, "<init>", "()V");
        c.aload(0).aload(1).putfield("Serialization/Person", "name", STRING).op(op::RETURN);
    });
    person.clinit(|c| {
        c.iconst(0).putstatic("Serialization/Person", "count", "I").op(op::RETURN);
    });

    let employee = k.class(Req, "Employee", "Serialization/Person");
    employee.serial_version(Req, 2);
    employee.field(Req, PRIVATE, "salary", "I");
    employee.init("(Ljava/lang/String;I)V", |c| {
        c.aload(0).aload(1).invokespecial("Serialization/Person", "<init>", "(Ljava/lang/String;)V");
        c.aload(0).iload(2).putfield("Serialization/Employee", "salary", "I").op(op::RETURN);
    });

    k.entry("EmployeeMain", |c| {
        round_trip(c, "Serialization/Employee", |c| {
            c.new_object("Serialization/Employee").op(op::DUP).ldc_string("Bo").iconst(100);
            c.invokespecial("Serialization/Employee", "<init>", "(Ljava/lang/String;I)V");
        });
    });
    k
}

fn non_serializable_parent() -> Case {
    let mut k = Case::new(F, "non-serializable-parent", "superclass state skipped by the stream");
    let component = k.class(Req, "Component", OBJECT);
    component.field(Bloat, PROTECTED, "baseValue", "I");
    component.init("()V", |c| {
        c.aload(0).invokespecial(OBJECT, "<init>", "()V");
        c.aload(0).iconst(9).putfield("Serialization/Component", "baseValue", "I").op(op::RETURN);
    });

    let item = k.class(Req, "Item", "Serialization/Component");
    item.implements(SERIALIZABLE).serial_version(Req, 1);
    item.field(Req, PRIVATE, "sku", STRING);
    item.init("(Ljava/lang/String;)V", |c| {
        c.aload(0).invokespecial("Serialization/Component", "<init>", "()V");
        c.aload(0).aload(1).putfield("Serialization/Item", "sku", STRING).op(op::RETURN);
    });

    k.entry("ItemMain", |c| {
        round_trip(c, "Serialization/Item", |c| {
            c.new_object("Serialization/Item").op(op::DUP).ldc_string("A-100");
            c.invokespecial("Serialization/Item", "<init>", "(Ljava/lang/String;)V");
        });
    });
    k
}

fn static_state() -> Case {
    let mut k = Case::new(F, "static-state", "static field left out of the serialized form");
    let token = k.class(Req, "Token", OBJECT);
    token.implements(SERIALIZABLE).serial_version(Req, 1);
    token.field(Req, PRIVATE, "value", STRING);
    token.field(Bloat, PRIVATE | STATIC, "DEFAULT_PREFIX", STRING);
    token.init("(Ljava/lang/String;)V", |c| {
        c.aload(0).invokespecial(OBJECT, "<init>", "()V");
        c.aload(0).aload(1).putfield("Serialization/Token", "value", STRING).op(op::RETURN);
    });
    token.clinit(|c| {
        c.ldc_string("tk-").putstatic("Serialization/Token", "DEFAULT_PREFIX", STRING).op(op::RETURN);
    });

    k.entry("TokenMain", |c| {
        round_trip(c, "Serialization/Token", |c| {
            c.new_object("Serialization/Token").op(op::DUP).ldc_string("abc123");
            c.invokespecial("Serialization/Token", "<init>", "(Ljava/lang/String;)V");
        });
    });
    k
}

fn transient_state() -> Case {
    let mut k = Case::new(F, "transient-state", "transient field skipped by the stream");
    let point = k.class(Req, "Point", OBJECT);
    point.implements(SERIALIZABLE).serial_version(Req, 1);
    point.field(Req, PRIVATE, "x", "I");
    point.field(Req, PRIVATE, "y", "I");
    point.field(Bloat, PRIVATE | TRANSIENT, "hash", "I");
    point.init("(II)V", |c| {
        c.aload(0).invokespecial(OBJECT, "<init>", "()V");
        c.aload(0).iload(1).putfield("Serialization/Point", "x", "I");
        c.aload(0).iload(2).putfield("Serialization/Point", "y", "I");
        c.aload(0).iload(1).iconst(31).op(op::IMUL).iload(2).op(op::IADD);
        c.putfield("Serialization/Point", "hash", "I").op(op::RETURN);
    });

    let legacy = k.class(Bloat, "PointV1", OBJECT);
    legacy.implements(SERIALIZABLE).serial_version(Bloat, 1);
    legacy.field(Bloat, PRIVATE, "coords", "[I");
    legacy.ctor();

    k.entry("PointMain", |c| {
        round_trip(c, "Serialization/Point", |c| {
            c.new_object("Serialization/Point").op(op::DUP).iconst(3).iconst(4);
            c.invokespecial("Serialization/Point", "<init>", "(II)V");
        });
    });
    k
}
