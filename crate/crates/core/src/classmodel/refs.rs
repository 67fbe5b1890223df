//! Source-like construct identities, the unit of ground-truth accounting.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::descriptor::{package_of, parse_field_descriptor, parse_method_descriptor, simple_name};
use super::{ClassError, ClassUnit, FieldMember, Member, MethodMember};

/// The three debloating levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Level {
    Class,
    Method,
    Field,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::Class, Level::Method, Level::Field];

    pub fn as_str(self) -> &'static str {
        match self {
            Level::Class => "CLASS",
            Level::Method => "METHOD",
            Level::Field => "FIELD",
        }
    }

    /// Title-case name as used in report tables.
    pub fn title(self) -> &'static str {
        match self {
            Level::Class => "Class",
            Level::Method => "Method",
            Level::Field => "Field",
        }
    }

    pub fn parse(s: &str) -> Option<Level> {
        match s.to_ascii_uppercase().as_str() {
            "CLASS" => Some(Level::Class),
            "METHOD" => Some(Level::Method),
            "FIELD" => Some(Level::Field),
            _ => None,
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Identity of one class, method, or field. Member refs carry only the
/// simple name of the declaring class; packages are erased.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstructRef {
    Class { package: String, name: String },
    Method { class: String, name: String, ret: String, params: Vec<String> },
    Field { class: String, name: String },
}

impl ConstructRef {
    pub fn class(package: &str, name: &str) -> Self {
        ConstructRef::Class { package: package.to_owned(), name: name.to_owned() }
    }

    /// `params` is the comma-joined list as written in ground truths.
    pub fn method(class: &str, name: &str, ret: &str, params: &str) -> Self {
        ConstructRef::Method {
            class: class.to_owned(),
            name: name.to_owned(),
            ret: ret.to_owned(),
            params: split_params(params),
        }
    }

    pub fn field(class: &str, name: &str) -> Self {
        ConstructRef::Field { class: class.to_owned(), name: name.to_owned() }
    }

    pub fn level(&self) -> Level {
        match self {
            ConstructRef::Class { .. } => Level::Class,
            ConstructRef::Method { .. } => Level::Method,
            ConstructRef::Field { .. } => Level::Field,
        }
    }

    /// Simple name of the class itself (CLASS) or of the declaring class.
    pub fn class_name(&self) -> &str {
        match self {
            ConstructRef::Class { name, .. } => name,
            ConstructRef::Method { class, .. } | ConstructRef::Field { class, .. } => class,
        }
    }

    pub fn member_name(&self) -> Option<&str> {
        match self {
            ConstructRef::Class { .. } => None,
            ConstructRef::Method { name, .. } | ConstructRef::Field { name, .. } => Some(name),
        }
    }

    pub fn joined_params(&self) -> Option<String> {
        match self {
            ConstructRef::Method { params, .. } => Some(params.join(",")),
            _ => None,
        }
    }

    /// Constructors and static initializers.
    pub fn is_initializer(&self) -> bool {
        matches!(self, ConstructRef::Method { name, .. } if name == "<init>" || name == "<clinit>")
    }
}

pub(crate) fn split_params(joined: &str) -> Vec<String> {
    if joined.is_empty() {
        Vec::new()
    } else {
        joined.split(',').map(|p| p.trim().to_owned()).collect()
    }
}

impl fmt::Display for ConstructRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstructRef::Class { package, name } if package.is_empty() => write!(f, "{name}"),
            ConstructRef::Class { package, name } => write!(f, "{package}.{name}"),
            ConstructRef::Method { class, name, ret, params } => {
                write!(f, "{ret} {class}.{name}({})", params.join(","))
            }
            ConstructRef::Field { class, name } => write!(f, "{class}.{name}"),
        }
    }
}

pub fn class_ref_of(class: &ClassUnit) -> ConstructRef {
    let bin = class.binary_name();
    ConstructRef::Class { package: package_of(bin), name: simple_name(bin).to_owned() }
}

pub fn method_ref_of(class: &ClassUnit, m: &MethodMember) -> Result<ConstructRef, ClassError> {
    let pool = &class.constant_pool;
    let d = parse_method_descriptor(m.descriptor(pool))?;
    Ok(ConstructRef::Method {
        class: simple_name(class.binary_name()).to_owned(),
        name: m.name(pool).to_owned(),
        ret: d.return_source_name(),
        params: d.param_source_names(),
    })
}

pub fn field_ref_of(class: &ClassUnit, f: &FieldMember) -> Result<ConstructRef, ClassError> {
    let pool = &class.constant_pool;
    parse_field_descriptor(f.descriptor(pool))?;
    Ok(ConstructRef::Field { class: simple_name(class.binary_name()).to_owned(), name: f.name(pool).to_owned() })
}
