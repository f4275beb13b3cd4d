//! Tabular output as CSV or JSON.
//!
//! Floats are written to CSV with 17 significant digits, which round-trips
//! every `f64`; JSON uses the shortest representation that round-trips. Both
//! therefore parse back to identical values. Infinite values become `inf` in
//! CSV and `null` in JSON; missing values are empty in CSV and `null` in JSON.

use std::io::Write;

use serde_json::{Map, Number, Value};

/// Output encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A single table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Text(String),
    Point(Vec<f64>),
    Bool(bool),
    Missing,
}

/// Column names plus rows of cells.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:.16e}")
    }
}

fn csv_text(c: &Cell) -> String {
    match c {
        Cell::Float(v) => fmt_float(*v),
        Cell::Int(v) => v.to_string(),
        Cell::Text(s) => s.clone(),
        Cell::Point(p) => p.iter().map(|v| fmt_float(*v)).collect::<Vec<_>>().join(","),
        Cell::Bool(b) => b.to_string(),
        Cell::Missing => String::new(),
    }
}

fn json_float(v: f64) -> Value {
    Number::from_f64(v).map(Value::Number).unwrap_or(Value::Null)
}

fn json_value(c: &Cell) -> Value {
    match c {
        Cell::Float(v) => json_float(*v),
        Cell::Int(v) => Value::from(*v),
        Cell::Text(s) => Value::String(s.clone()),
        Cell::Point(p) => Value::Array(p.iter().map(|v| json_float(*v)).collect()),
        Cell::Bool(b) => Value::Bool(*b),
        Cell::Missing => Value::Null,
    }
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(csv_text)).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }

    pub fn to_json(&self) -> Vec<u8> {
        let arr: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut m = Map::new();
                for (k, c) in self.columns.iter().zip(row) {
                    m.insert((*k).to_string(), json_value(c));
                }
                Value::Object(m)
            })
            .collect();
        let mut out = serde_json::to_vec_pretty(&Value::Array(arr)).expect("serializable");
        out.push(b'\n');
        out
    }

    pub fn encode(&self, format: Format) -> Vec<u8> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    /// Fixed-width rendering for terminals.
    pub fn to_pretty(&self) -> String {
        let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(csv_text).collect()).collect();
        let mut widths: Vec<usize> = self.columns.iter().map(|c| c.len()).collect();
        for r in &cells {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.len());
            }
        }
        let mut out = String::new();
        let line = |out: &mut String, items: Vec<&str>| {
            let parts: Vec<String> = items
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:<w$}", w = *w))
                .collect();
            out.push_str(parts.join("  ").trim_end());
            out.push('\n');
        };
        line(&mut out, self.columns.clone());
        for r in &cells {
            line(&mut out, r.iter().map(|s| s.as_str()).collect());
        }
        out
    }
}

/// Write `bytes` to `path`, or to standard output when no path is given.
pub fn emit(bytes: &[u8], path: Option<&std::path::Path>) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()
        }
    }
}
