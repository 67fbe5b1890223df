//! Field and method descriptors, and their source-like spelling
//! (`[Ljava/lang/String;` becomes `String[]`).

use std::fmt;

use super::ClassError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseType {
    Byte,
    Char,
    Double,
    Float,
    Int,
    Long,
    Short,
    Boolean,
}

impl BaseType {
    fn from_char(c: u8) -> Option<BaseType> {
        Some(match c {
            b'B' => BaseType::Byte,
            b'C' => BaseType::Char,
            b'D' => BaseType::Double,
            b'F' => BaseType::Float,
            b'I' => BaseType::Int,
            b'J' => BaseType::Long,
            b'S' => BaseType::Short,
            b'Z' => BaseType::Boolean,
            _ => return None,
        })
    }

    pub fn source_name(self) -> &'static str {
        match self {
            BaseType::Byte => "byte",
            BaseType::Char => "char",
            BaseType::Double => "double",
            BaseType::Float => "float",
            BaseType::Int => "int",
            BaseType::Long => "long",
            BaseType::Short => "short",
            BaseType::Boolean => "boolean",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FieldType {
    Base(BaseType),
    /// Binary class name, e.g. `java/lang/String`.
    Object(String),
    Array(Box<FieldType>),
}

impl FieldType {
    /// Local-variable / operand-stack slots occupied by a value of this type.
    pub fn slots(&self) -> u16 {
        match self {
            FieldType::Base(BaseType::Long | BaseType::Double) => 2,
            _ => 1,
        }
    }

    /// Source-like name with the package erased: `int`, `String`, `Main$1[]`.
    pub fn source_name(&self) -> String {
        match self {
            FieldType::Base(b) => b.source_name().to_owned(),
            FieldType::Object(name) => simple_name(name).to_owned(),
            FieldType::Array(elem) => format!("{}[]", elem.source_name()),
        }
    }

    /// Innermost class name of an object or array-of-object type.
    pub fn class_name(&self) -> Option<&str> {
        match self {
            FieldType::Base(_) => None,
            FieldType::Object(name) => Some(name),
            FieldType::Array(elem) => elem.class_name(),
        }
    }
}

impl fmt::Display for FieldType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldType::Base(b) => {
                let c = match b {
                    BaseType::Byte => 'B',
                    BaseType::Char => 'C',
                    BaseType::Double => 'D',
                    BaseType::Float => 'F',
                    BaseType::Int => 'I',
                    BaseType::Long => 'J',
                    BaseType::Short => 'S',
                    BaseType::Boolean => 'Z',
                };
                write!(f, "{c}")
            }
            FieldType::Object(name) => write!(f, "L{name};"),
            FieldType::Array(elem) => write!(f, "[{elem}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MethodDescriptor {
    pub params: Vec<FieldType>,
    /// `None` for `void`.
    pub ret: Option<FieldType>,
}

impl MethodDescriptor {
    pub fn arg_slots(&self) -> u16 {
        self.params.iter().map(FieldType::slots).sum()
    }

    pub fn return_slots(&self) -> u16 {
        self.ret.as_ref().map_or(0, FieldType::slots)
    }

    pub fn return_source_name(&self) -> String {
        self.ret.as_ref().map_or_else(|| "void".to_owned(), FieldType::source_name)
    }

    pub fn param_source_names(&self) -> Vec<String> {
        self.params.iter().map(FieldType::source_name).collect()
    }
}

impl fmt::Display for MethodDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for p in &self.params {
            write!(f, "{p}")?;
        }
        f.write_str(")")?;
        match &self.ret {
            Some(t) => write!(f, "{t}"),
            None => f.write_str("V"),
        }
    }
}

/// The part of a binary name after the last `/`; nesting `$` is kept.
pub fn simple_name(binary_name: &str) -> &str {
    binary_name.rsplit('/').next().unwrap_or(binary_name)
}

/// Dotted package of a binary name; empty for the default package.
pub fn package_of(binary_name: &str) -> String {
    match binary_name.rfind('/') {
        Some(i) => binary_name[..i].replace('/', "."),
        None => String::new(),
    }
}

fn parse_field_type(bytes: &[u8], pos: &mut usize, whole: &str) -> Result<FieldType, ClassError> {
    let bad = || ClassError::MalformedDescriptor(whole.to_owned());
    let c = *bytes.get(*pos).ok_or_else(bad)?;
    *pos += 1;
    if let Some(b) = BaseType::from_char(c) {
        return Ok(FieldType::Base(b));
    }
    match c {
        b'L' => {
            let start = *pos;
            let len = bytes[start..].iter().position(|&b| b == b';').ok_or_else(bad)?;
            let name = &whole[start..start + len];
            if name.is_empty() || name.contains(['.', '[']) || name.starts_with('/') || name.ends_with('/') {
                return Err(bad());
            }
            *pos = start + len + 1;
            Ok(FieldType::Object(name.to_owned()))
        }
        b'[' => {
            let elem = parse_field_type(bytes, pos, whole)?;
            Ok(FieldType::Array(Box::new(elem)))
        }
        _ => Err(bad()),
    }
}

pub fn parse_field_descriptor(desc: &str) -> Result<FieldType, ClassError> {
    let mut pos = 0;
    let t = parse_field_type(desc.as_bytes(), &mut pos, desc)?;
    if pos != desc.len() {
        return Err(ClassError::MalformedDescriptor(desc.to_owned()));
    }
    Ok(t)
}

pub fn parse_method_descriptor(desc: &str) -> Result<MethodDescriptor, ClassError> {
    let bad = || ClassError::MalformedDescriptor(desc.to_owned());
    let bytes = desc.as_bytes();
    if bytes.first() != Some(&b'(') {
        return Err(bad());
    }
    let mut pos = 1;
    let mut params = Vec::new();
    loop {
        match bytes.get(pos) {
            Some(b')') => {
                pos += 1;
                break;
            }
            Some(_) => params.push(parse_field_type(bytes, &mut pos, desc)?),
            None => return Err(bad()),
        }
    }
    let ret = if bytes.get(pos) == Some(&b'V') {
        pos += 1;
        None
    } else {
        Some(parse_field_type(bytes, &mut pos, desc)?)
    };
    if pos != bytes.len() {
        return Err(bad());
    }
    Ok(MethodDescriptor { params, ret })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn main_descriptor_source_names() {
        let d = parse_method_descriptor("([Ljava/lang/String;)V").unwrap();
        assert_eq!(d.return_source_name(), "void");
        assert_eq!(d.param_source_names(), vec!["String[]"]);
    }

    #[test]
    fn primitive_params_in_declaration_order() {
        let d = parse_method_descriptor("(IJ)I").unwrap();
        assert_eq!(d.param_source_names().join(","), "int,long");
        assert_eq!(d.return_source_name(), "int");
        assert_eq!(d.arg_slots(), 3);
    }

    #[test]
    fn nested_class_keeps_dollar() {
        let t = parse_field_descriptor("[[LAbstract/Main$1;").unwrap();
        assert_eq!(t.source_name(), "Main$1[][]");
        assert_eq!(t.class_name(), Some("Abstract/Main$1"));
    }

    #[test]
    fn rejects_malformed() {
        for d in ["", "(", "()", "(I", "()VV", "(L;)V", "(Q)V", "()[", "(Ljava/lang/String)V"] {
            assert!(parse_method_descriptor(d).is_err(), "{d}");
        }
        for d in ["", "V", "II", "Ljava/lang/String", "[", "La.b;"] {
            assert!(parse_field_descriptor(d).is_err(), "{d}");
        }
    }

    #[test]
    fn packages_are_dotted() {
        assert_eq!(package_of("Abstract/Main$1"), "Abstract");
        assert_eq!(package_of("a/b/C"), "a.b");
        assert_eq!(package_of("X"), "");
        assert_eq!(simple_name("a/b/C$D"), "C$D");
    }

    #[test]
    fn display_round_trips() {
        for d in ["([Ljava/lang/String;)V", "(IJDLa/B;)[[Z", "()Ljava/lang/Object;"] {
            assert_eq!(parse_method_descriptor(d).unwrap().to_string(), d);
        }
    }
}
