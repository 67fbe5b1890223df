//! Deterministic JAR reading and writing.

use std::collections::{BTreeMap, HashSet};
use std::io::{Cursor, Read, Write};

use thiserror::Error;
use zip::write::SimpleFileOptions;
use zip::{CompressionMethod, DateTime, ZipArchive, ZipWriter};

pub const MANIFEST_PATH: &str = "META-INF/MANIFEST.MF";
const LINE_LIMIT: usize = 72;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JarError {
    #[error("corrupt archive: {0}")]
    CorruptArchive(String),
    #[error("duplicate archive entry {0:?}")]
    DuplicateEntry(String),
    #[error("invalid archive: {0}")]
    InvariantViolation(String),
}

/// Main-section manifest attributes in file order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Manifest {
    attrs: Vec<(String, String)>,
}

impl Manifest {
    pub fn new() -> Self {
        Manifest::default()
    }

    /// A manifest with `Manifest-Version` and `Main-Class`.
    pub fn with_main_class(binary_name: &str) -> Self {
        let mut m = Manifest::new();
        m.set("Manifest-Version", "1.0");
        m.set("Main-Class", &binary_name.replace('/', "."));
        m
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.attrs.iter().find(|(k, _)| k.eq_ignore_ascii_case(key)).map(|(_, v)| v.as_str())
    }

    pub fn set(&mut self, key: &str, value: &str) {
        match self.attrs.iter_mut().find(|(k, _)| k.eq_ignore_ascii_case(key)) {
            Some(slot) => slot.1 = value.to_owned(),
            None => self.attrs.push((key.to_owned(), value.to_owned())),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.attrs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.attrs.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Main class as a binary name (`pkg/Main`).
    pub fn main_class(&self) -> Option<String> {
        self.get("Main-Class").map(|c| c.replace('.', "/"))
    }

    pub fn parse(text: &str) -> Manifest {
        let mut lines: Vec<String> = Vec::new();
        for raw in text.split('\n') {
            let line = raw.strip_suffix('\r').unwrap_or(raw);
            if line.is_empty() {
                // only the main section is kept
                if !lines.is_empty() {
                    break;
                }
                continue;
            }
            match (line.strip_prefix(' '), lines.last_mut()) {
                (Some(cont), Some(last)) => last.push_str(cont),
                _ => lines.push(line.to_owned()),
            }
        }
        let attrs = lines
            .into_iter()
            .filter_map(|l| l.split_once(": ").map(|(k, v)| (k.to_owned(), v.to_owned())))
            .collect();
        Manifest { attrs }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.attrs {
            fold_line(&format!("{k}: {v}"), &mut out);
        }
        out.push_str("\r\n");
        out
    }
}

fn fold_line(line: &str, out: &mut String) {
    let mut rest = line;
    let mut limit = LINE_LIMIT;
    loop {
        if rest.len() <= limit {
            out.push_str(rest);
            out.push_str("\r\n");
            return;
        }
        let mut cut = limit;
        while !rest.is_char_boundary(cut) {
            cut -= 1;
        }
        out.push_str(&rest[..cut]);
        out.push_str("\r\n ");
        rest = &rest[cut..];
        limit = LINE_LIMIT - 1;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct JarArchive {
    /// Every entry except the manifest, keyed by path.
    pub entries: BTreeMap<String, Vec<u8>>,
    pub manifest: Manifest,
}

impl JarArchive {
    pub fn new() -> Self {
        JarArchive::default()
    }

    pub fn insert(&mut self, path: impl Into<String>, bytes: Vec<u8>) {
        self.entries.insert(path.into(), bytes);
    }

    /// Adds `<binary_name>.class`.
    pub fn insert_class(&mut self, binary_name: &str, bytes: Vec<u8>) {
        self.insert(format!("{binary_name}.class"), bytes);
    }

    pub fn class_entries(&self) -> impl Iterator<Item = (&str, &[u8])> {
        self.entries
            .iter()
            .filter(|(p, _)| p.ends_with(".class"))
            .map(|(p, b)| (p.as_str(), b.as_slice()))
    }

    pub fn class_bytes(&self, binary_name: &str) -> Option<&[u8]> {
        self.entries.get(&format!("{binary_name}.class")).map(Vec::as_slice)
    }
}

pub fn read_jar(bytes: &[u8]) -> Result<JarArchive, JarError> {
    let corrupt = |e: zip::result::ZipError| JarError::CorruptArchive(e.to_string());
    let mut zip = ZipArchive::new(Cursor::new(bytes)).map_err(corrupt)?;
    let declared = central_directory_count(bytes);
    let mut jar = JarArchive::new();
    let mut seen = HashSet::new();
    for i in 0..zip.len() {
        let mut f = zip.by_index(i).map_err(corrupt)?;
        let name = f.name().map_err(corrupt)?.into_owned();
        if !seen.insert(name.clone()) {
            return Err(JarError::DuplicateEntry(name));
        }
        if f.is_dir() {
            continue;
        }
        let mut data = Vec::with_capacity(f.size() as usize);
        f.read_to_end(&mut data).map_err(|e| JarError::CorruptArchive(format!("{name}: {e}")))?;
        if name == MANIFEST_PATH {
            jar.manifest = Manifest::parse(&String::from_utf8_lossy(&data));
        } else {
            jar.entries.insert(name, data);
        }
    }
    if let Some(n) = declared {
        if n > zip.len() {
            let dup = first_duplicate_name(bytes).unwrap_or_default();
            return Err(JarError::DuplicateEntry(dup));
        }
    }
    Ok(jar)
}

const EOCD_SIG: [u8; 4] = [0x50, 0x4b, 0x05, 0x06];
const CDH_SIG: [u8; 4] = [0x50, 0x4b, 0x01, 0x02];

fn eocd_offset(bytes: &[u8]) -> Option<usize> {
    let lo = bytes.len().saturating_sub(22 + 0xffff);
    (lo..=bytes.len().checked_sub(22)?).rev().find(|&i| bytes[i..i + 4] == EOCD_SIG)
}

/// Entry count recorded in the end-of-central-directory record. The zip
/// reader indexes entries by name, which hides duplicates.
fn central_directory_count(bytes: &[u8]) -> Option<usize> {
    let e = eocd_offset(bytes)?;
    Some(u16::from_le_bytes([bytes[e + 10], bytes[e + 11]]) as usize)
}

fn first_duplicate_name(bytes: &[u8]) -> Option<String> {
    let e = eocd_offset(bytes)?;
    let le32 = |i: usize| u32::from_le_bytes([bytes[i], bytes[i + 1], bytes[i + 2], bytes[i + 3]]) as usize;
    let le16 = |i: usize| u16::from_le_bytes([bytes[i], bytes[i + 1]]) as usize;
    let mut p = le32(e + 16);
    let mut seen = HashSet::new();
    while p + 46 <= bytes.len() && bytes[p..p + 4] == CDH_SIG {
        let (n, x, c) = (le16(p + 28), le16(p + 30), le16(p + 32));
        let name = String::from_utf8_lossy(bytes.get(p + 46..p + 46 + n)?).into_owned();
        if !seen.insert(name.clone()) {
            return Some(name);
        }
        p += 46 + n + x + c;
    }
    None
}

/// Stored (uncompressed) deterministic output.
pub fn write_jar(jar: &JarArchive) -> Result<Vec<u8>, JarError> {
    write_jar_with(jar, false)
}

/// Deterministic output: manifest first, then entries in path order, all
/// stamped 1980-01-01 00:00 with fixed permissions.
pub fn write_jar_with(jar: &JarArchive, deflate: bool) -> Result<Vec<u8>, JarError> {
    for path in jar.entries.keys() {
        check_path(path)?;
    }
    let method = if deflate { CompressionMethod::Deflated } else { CompressionMethod::Stored };
    let options = SimpleFileOptions::default()
        .compression_method(method)
        .last_modified_time(DateTime::default())
        .unix_permissions(0o644);
    let fail = |e: zip::result::ZipError| JarError::InvariantViolation(e.to_string());
    let mut w = ZipWriter::new(Cursor::new(Vec::new()));
    if !jar.manifest.is_empty() {
        w.start_file(MANIFEST_PATH, options).map_err(fail)?;
        w.write_all(jar.manifest.render().as_bytes()).map_err(|e| JarError::InvariantViolation(e.to_string()))?;
    }
    for (path, data) in &jar.entries {
        w.start_file(path.as_str(), options).map_err(fail)?;
        w.write_all(data).map_err(|e| JarError::InvariantViolation(e.to_string()))?;
    }
    Ok(w.finish().map_err(fail)?.into_inner())
}

fn check_path(path: &str) -> Result<(), JarError> {
    let bad = path.is_empty()
        || path.starts_with('/')
        || path.contains('\\')
        || path.ends_with('/')
        || path.split('/').any(|s| s.is_empty() || s == "..")
        || path == MANIFEST_PATH;
    if bad {
        Err(JarError::InvariantViolation(format!("bad entry path {path:?}")))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> JarArchive {
        let mut j = JarArchive::new();
        j.manifest = Manifest::with_main_class("Abstract/Main");
        j.insert_class("Abstract/Main", vec![0xca, 0xfe, 0xba, 0xbe]);
        j.insert("a/readme.txt", b"hi".to_vec());
        j
    }

    #[test]
    fn one_class_entry() {
        let mut j = JarArchive::new();
        j.insert_class("X", vec![1, 2, 3]);
        let back = read_jar(&write_jar(&j).unwrap()).unwrap();
        assert_eq!(back.entries.len(), 1);
        assert_eq!(back.class_bytes("X"), Some(&[1u8, 2, 3][..]));
        assert!(back.manifest.is_empty());
    }

    #[test]
    fn round_trip_and_determinism() {
        let j = sample();
        let a = write_jar(&j).unwrap();
        let b = write_jar(&j.clone()).unwrap();
        assert_eq!(a, b);
        assert_eq!(read_jar(&a).unwrap(), j);
        let d = write_jar_with(&j, true).unwrap();
        assert_eq!(read_jar(&d).unwrap(), j);
    }

    #[test]
    fn insertion_order_does_not_matter() {
        let mut x = JarArchive::new();
        x.insert("b", vec![2]);
        x.insert("a", vec![1]);
        let mut y = JarArchive::new();
        y.insert("a", vec![1]);
        y.insert("b", vec![2]);
        assert_eq!(write_jar(&x).unwrap(), write_jar(&y).unwrap());
    }

    #[test]
    fn empty_archive_is_valid() {
        let bytes = write_jar(&JarArchive::new()).unwrap();
        let back = read_jar(&bytes).unwrap();
        assert!(back.entries.is_empty());
    }

    #[test]
    fn garbage_is_corrupt() {
        assert!(matches!(read_jar(b"not a zip"), Err(JarError::CorruptArchive(_))));
    }

    #[test]
    fn duplicate_entries_are_reported() {
        let mut j = JarArchive::new();
        j.insert("a.class", vec![1]);
        j.insert("b.class", vec![2]);
        let mut bytes = write_jar(&j).unwrap();
        for i in 0..bytes.len() - 7 {
            if &bytes[i..i + 7] == b"b.class" {
                bytes[i] = b'a';
            }
        }
        assert_eq!(read_jar(&bytes), Err(JarError::DuplicateEntry("a.class".into())));
    }

    #[test]
    fn manifest_lines_fold_at_72_bytes() {
        let mut m = Manifest::new();
        let long = "x".repeat(200);
        m.set("Class-Path", &long);
        let text = m.render();
        for line in text.split("\r\n") {
            assert!(line.len() <= 72, "{line}");
        }
        assert_eq!(Manifest::parse(&text).get("Class-Path"), Some(long.as_str()));
    }

    #[test]
    fn bad_paths_are_rejected() {
        for p in ["", "/abs", "a\\b", "a//b", "../x", "dir/"] {
            let mut j = JarArchive::new();
            j.insert(p, vec![]);
            assert!(matches!(write_jar(&j), Err(JarError::InvariantViolation(_))), "{p}");
        }
    }
}
