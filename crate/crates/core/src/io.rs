//! Matrix and family files.
//!
//! A matrix file is a JSON object `{"n": N, "entries": rows}` where `rows`
//! holds `N` rows of `N` entries, each entry a `[re, im]` pair. A family
//! template adds a second matrix: `{"n": N, "base": rows, "slope": rows}`
//! describes `H(t) = base + t·slope`.

use std::fmt;
use std::path::Path;

use serde::de::{self, DeserializeSeed, Deserializer, MapAccess, SeqAccess, Visitor};

use crate::error::{Error, Result};
use crate::numfield::{ComplexMatrix, MAX_DIM, C64};

type Rows = Vec<Vec<C64>>;

/// Row-list deserializer that rejects ragged rows where they occur.
struct RowsSeed {
    expected: Option<usize>,
}

impl<'de> DeserializeSeed<'de> for RowsSeed {
    type Value = Rows;

    fn deserialize<D: Deserializer<'de>>(self, d: D) -> std::result::Result<Rows, D::Error> {
        d.deserialize_seq(self)
    }
}

impl<'de> Visitor<'de> for RowsSeed {
    type Value = Rows;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a list of rows of [re, im] pairs")
    }

    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<Rows, A::Error> {
        let mut rows: Rows = Vec::new();
        let mut width = self.expected;
        while let Some(row) = seq.next_element_seed(RowSeed { index: rows.len(), width })? {
            width.get_or_insert(row.len());
            rows.push(row);
        }
        Ok(rows)
    }
}

/// One row; a wrong entry count is reported inside the row.
struct RowSeed {
    index: usize,
    width: Option<usize>,
}

impl<'de> DeserializeSeed<'de> for RowSeed {
    type Value = Vec<C64>;

    fn deserialize<D: Deserializer<'de>>(self, d: D) -> std::result::Result<Vec<C64>, D::Error> {
        d.deserialize_seq(self)
    }
}

impl<'de> Visitor<'de> for RowSeed {
    type Value = Vec<C64>;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a row of [re, im] pairs")
    }

    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<Vec<C64>, A::Error> {
        let mut row = Vec::new();
        while let Some([re, im]) = seq.next_element::<[f64; 2]>()? {
            row.push(C64::new(re, im));
            if self.width.is_some_and(|w| row.len() > w) {
                return Err(de::Error::custom(format!(
                    "row {} has more than {} entries",
                    self.index,
                    row.len() - 1
                )));
            }
        }
        if let Some(w) = self.width.filter(|&w| w != row.len()) {
            return Err(de::Error::custom(format!(
                "row {} has {} entries, expected {w}",
                self.index,
                row.len()
            )));
        }
        Ok(row)
    }
}

#[derive(Default)]
struct RawDocument {
    n: Option<usize>,
    matrices: Vec<(&'static str, Rows)>,
}

/// Top-level object visitor; `fields` names the row lists it accepts.
struct DocumentVisitor {
    fields: &'static [&'static str],
}

impl<'de> Visitor<'de> for DocumentVisitor {
    type Value = RawDocument;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "an object with fields \"n\" and {:?}", self.fields)
    }

    fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> std::result::Result<RawDocument, A::Error> {
        let mut doc = RawDocument::default();
        while let Some(key) = map.next_key::<String>()? {
            if key == "n" {
                if doc.n.is_some() {
                    return Err(de::Error::duplicate_field("n"));
                }
                let n: usize = map.next_value()?;
                for (name, rows) in &doc.matrices {
                    check_shape(name, rows, n).map_err(de::Error::custom)?;
                }
                doc.n = Some(n);
            } else if let Some(&name) = self.fields.iter().find(|f| **f == key) {
                if doc.matrices.iter().any(|(m, _)| *m == name) {
                    return Err(de::Error::duplicate_field(name));
                }
                let rows = map.next_value_seed(RowsSeed { expected: doc.n })?;
                if let Some(n) = doc.n {
                    check_shape(name, &rows, n).map_err(de::Error::custom)?;
                }
                doc.matrices.push((name, rows));
            } else {
                return Err(de::Error::unknown_field(&key, self.fields));
            }
        }
        if doc.n.is_none() {
            return Err(de::Error::missing_field("n"));
        }
        if let Some(missing) = self.fields.iter().find(|f| !doc.matrices.iter().any(|(m, _)| m == *f)) {
            return Err(de::Error::missing_field(missing));
        }
        Ok(doc)
    }
}

/// Row count must agree with `n`; a consistent but non-square grid is
/// reported separately by [`to_matrix`].
fn check_shape(name: &str, rows: &Rows, n: usize) -> std::result::Result<(), String> {
    let width = rows.first().map_or(0, Vec::len);
    if rows.len() == width && width != n {
        return Err(format!("\"{name}\" is {width}x{width} but n = {n}"));
    }
    if width != n && !rows.is_empty() {
        return Err(format!("\"{name}\" rows have {width} entries but n = {n}"));
    }
    Ok(())
}

fn parse_document(text: &str, fields: &'static [&'static str]) -> Result<RawDocument> {
    let mut de = serde_json::Deserializer::from_str(text);
    let doc = de
        .deserialize_map(DocumentVisitor { fields })
        .and_then(|doc| de.end().map(|_| doc))
        .map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: strip_position(&e.to_string()),
        })?;
    Ok(doc)
}

/// serde_json appends " at line L column C", which the error already carries.
fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

fn to_matrix(n: usize, rows: Rows) -> Result<ComplexMatrix> {
    if n > MAX_DIM {
        return Err(Error::TooLarge(n));
    }
    if n == 0 {
        return Err(Error::DimensionMismatch("matrix must have n >= 1".into()));
    }
    if rows.len() != n {
        let cols = rows.first().map_or(0, Vec::len);
        return Err(Error::NotSquare { rows: rows.len(), cols });
    }
    let m = ComplexMatrix::from_rows(&rows)?;
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(m)
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Parses the matrix file format from a string.
pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    let mut doc = parse_document(text, &["entries"])?;
    let (_, rows) = doc.matrices.pop().expect("entries present");
    to_matrix(doc.n.expect("n present"), rows)
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<ComplexMatrix> {
    parse_matrix(&read_text(path.as_ref())?)
}

fn rows_json(m: &ComplexMatrix) -> serde_json::Value {
    serde_json::Value::Array(
        m.to_rows()
            .into_iter()
            .map(|row| row.into_iter().map(|z| serde_json::json!([z.re, z.im])).collect())
            .collect(),
    )
}

/// Serializes a square matrix in the matrix file format. Entries are written
/// with shortest round-trip precision.
pub fn format_matrix(m: &ComplexMatrix) -> String {
    let doc = serde_json::json!({ "n": m.rows(), "entries": rows_json(m) });
    let mut s = serde_json::to_string(&doc).expect("matrix serializes");
    s.push('\n');
    s
}

pub fn write_matrix(path: impl AsRef<Path>, m: &ComplexMatrix) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_matrix(m)).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// `H(t) = base + t·slope`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineFamily {
    pub base: ComplexMatrix,
    pub slope: ComplexMatrix,
}

impl AffineFamily {
    pub fn new(base: ComplexMatrix, slope: ComplexMatrix) -> Result<Self> {
        if !base.is_square() || base.rows() != slope.rows() || base.cols() != slope.cols() {
            return Err(Error::FamilyParse(format!(
                "base is {}x{} but slope is {}x{}",
                base.rows(),
                base.cols(),
                slope.rows(),
                slope.cols()
            )));
        }
        Ok(AffineFamily { base, slope })
    }

    pub fn at(&self, t: f64) -> ComplexMatrix {
        &self.base + &self.slope.scale(C64::new(t, 0.0))
    }
}

/// Parses a family template. Every failure is reported as `FamilyParse`,
/// keeping the position of syntax errors in the message.
pub fn parse_family(text: &str) -> Result<AffineFamily> {
    let wrap = |e: Error| Error::FamilyParse(e.to_string());
    let doc = parse_document(text, &["base", "slope"]).map_err(wrap)?;
    let n = doc.n.expect("n present");
    let mut base = None;
    let mut slope = None;
    for (name, rows) in doc.matrices {
        let m = to_matrix(n, rows).map_err(wrap)?;
        if name == "base" {
            base = Some(m);
        } else {
            slope = Some(m);
        }
    }
    AffineFamily::new(base.expect("base present"), slope.expect("slope present"))
}

pub fn read_family(path: impl AsRef<Path>) -> Result<AffineFamily> {
    let path = path.as_ref();
    let text = read_text(path).map_err(|e| Error::FamilyParse(e.to_string()))?;
    parse_family(&text)
}

pub fn format_family(family: &AffineFamily) -> String {
    let doc = serde_json::json!({
        "n": family.base.rows(),
        "base": rows_json(&family.base),
        "slope": rows_json(&family.slope),
    });
    let mut s = serde_json::to_string(&doc).expect("family serializes");
    s.push('\n');
    s
}
