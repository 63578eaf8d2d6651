//! Flat report records and their CSV / JSON-lines encodings.

use std::io::Write;

use serde::ser::{Serialize, SerializeMap, Serializer};
use serde_json::Value;

use crate::config::Format;

/// Bumped whenever a column is added, removed or renamed.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    /// Nested data, written as compact JSON text in CSV.
    Json(Value),
    Null,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v.into())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<Value> for Cell {
    fn from(v: Value) -> Self {
        Cell::Json(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Null, Into::into)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Float(v) => {
                let s = format!("{v:.6}");
                if s == "-0.000000" {
                    "0.000000".into()
                } else {
                    s
                }
            }
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Json(v) => v.to_string(),
            Cell::Null => String::new(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Float(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            _ => None,
        }
    }
}

/// One output row; columns keep their insertion order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Record {
    cells: Vec<(&'static str, Cell)>,
}

impl Record {
    /// A record stamped with the schema version.
    pub fn new() -> Self {
        Record { cells: vec![("schema_version", SCHEMA_VERSION.into())] }
    }

    pub fn with(mut self, column: &'static str, value: impl Into<Cell>) -> Self {
        self.cells.push((column, value.into()));
        self
    }

    pub fn get(&self, column: &str) -> Option<&Cell> {
        self.cells.iter().find(|(k, _)| *k == column).map(|(_, v)| v)
    }

    pub fn columns(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.cells.iter().map(|(k, _)| *k)
    }
}

impl Serialize for Record {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.cells.len()))?;
        for (k, v) in &self.cells {
            match v {
                Cell::Float(x) => m.serialize_entry(k, x)?,
                Cell::Int(x) => m.serialize_entry(k, x)?,
                Cell::Bool(x) => m.serialize_entry(k, x)?,
                Cell::Text(x) => m.serialize_entry(k, x)?,
                Cell::Json(x) => m.serialize_entry(k, x)?,
                Cell::Null => m.serialize_entry(k, &())?,
            }
        }
        m.end()
    }
}

/// Writes records; in CSV every record must have the first record's columns.
pub fn write_records<W: Write>(records: &[Record], format: Format, out: W) -> std::io::Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            if let Some(first) = records.first() {
                let header: Vec<&str> = first.columns().collect();
                w.write_record(&header)?;
                for r in records {
                    let cols: Vec<&str> = r.columns().collect();
                    if cols != header {
                        return Err(std::io::Error::other("records with differing columns in one CSV table"));
                    }
                    w.write_record(r.cells.iter().map(|(_, c)| c.csv()))?;
                }
            }
            w.flush()
        }
        Format::Jsonl => {
            let mut out = std::io::BufWriter::new(out);
            for r in records {
                serde_json::to_writer(&mut out, r)?;
                out.write_all(b"\n")?;
            }
            out.flush()
        }
    }
}
