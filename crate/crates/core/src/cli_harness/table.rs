//! Fixed-column tables and their CSV / JSON encodings.
//!
//! Floats are rounded to 15 significant digits before encoding and printed
//! in shortest round-trip form, so reading a CSV back gives the rounded
//! values exactly.

use std::io::{self, Write};
use std::path::Path;

use clap::ValueEnum;
use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i128),
    Float(f64),
    Text(String),
    /// Rendered as `NA` in CSV and `null` in JSON.
    Missing,
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i128)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v as i128)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// `x` rounded to 15 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().expect("formatted float parses")
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(x) if x.is_finite() => format!("{:?}", round_sig(*x)),
            Cell::Float(_) | Cell::Missing => "NA".to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => match i64::try_from(*v) {
                Ok(i) => Value::from(i),
                Err(_) => Value::String(v.to_string()),
            },
            Cell::Float(x) => Number::from_f64(round_sig(*x))
                .map(Value::Number)
                .unwrap_or(Value::Null),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Missing => Value::Null,
        }
    }

    fn parse(field: &str) -> Cell {
        if field == "NA" {
            return Cell::Missing;
        }
        if let Ok(v) = field.parse::<i128>() {
            return Cell::Int(v);
        }
        match field.parse::<f64>() {
            Ok(x) => Cell::Float(x),
            Err(_) => Cell::Text(field.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Encode a one-row table as a bare JSON object instead of an array.
    pub single_object: bool,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            single_object: false,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width differs from header"
        );
        self.rows.push(row);
    }

    pub fn encode(&self, format: Format) -> Vec<u8> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))
                .expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }

    fn to_json(&self) -> Vec<u8> {
        let objects: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let m: Map<String, Value> = self
                    .columns
                    .iter()
                    .cloned()
                    .zip(row.iter().map(Cell::to_json))
                    .collect();
                Value::Object(m)
            })
            .collect();
        let doc = if self.single_object && objects.len() == 1 {
            objects.into_iter().next().expect("one row")
        } else {
            Value::Array(objects)
        };
        let mut out = serde_json::to_vec_pretty(&doc).expect("json encodes");
        out.push(b'\n');
        out
    }

    /// Parses CSV produced by [`Table::encode`].
    pub fn from_csv(bytes: &[u8]) -> io::Result<Table> {
        let mut r = csv::Reader::from_reader(bytes);
        let columns = r
            .headers()
            .map_err(io::Error::other)?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(io::Error::other)?;
            rows.push(rec.iter().map(Cell::parse).collect());
        }
        Ok(Table {
            columns,
            rows,
            single_object: false,
        })
    }
}

/// Writes the encoded table to `path`, or to stdout when `path` is `None`.
pub fn emit_table(table: &Table, format: Format, path: Option<&Path>) -> io::Result<()> {
    let bytes = table.encode(format);
    match path {
        Some(p) => std::fs::write(p, bytes),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(&bytes)?;
            out.flush()
        }
    }
}

pub fn read_csv(path: &Path) -> io::Result<Table> {
    Table::from_csv(&std::fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(&["N", "x", "s", "e"]);
        t.push(vec![
            10u64.into(),
            0.1f64.into(),
            "sqrt:2".into(),
            Cell::Missing,
        ]);
        t.push(vec![
            (-3i64).into(),
            (1.0 / 3.0).into(),
            "a,b".into(),
            1e-20.into(),
        ]);
        t.push(vec![0u64.into(), 12345678.9.into(), "".into(), 2.0.into()]);
        t
    }

    #[test]
    fn empty_table_is_header_only() {
        let t = Table::new(&["N", "count"]);
        assert_eq!(t.encode(Format::Csv), b"N,count\n");
        assert_eq!(t.encode(Format::Json), b"[]\n");
    }

    #[test]
    fn csv_round_trip_is_exact_after_rounding() {
        let t = sample();
        let back = Table::from_csv(&t.encode(Format::Csv)).unwrap();
        assert_eq!(back.columns, t.columns);
        assert_eq!(back.rows[0][1], Cell::Float(0.1));
        assert_eq!(back.rows[1][1], Cell::Float(round_sig(1.0 / 3.0)));
        assert_eq!(back.rows[1][2], Cell::Text("a,b".into()));
        assert_eq!(back.rows[1][3], Cell::Float(1e-20));
        assert_eq!(back.rows[0][3], Cell::Missing);
        assert_eq!(back.rows[2][3], Cell::Float(2.0));
        assert_eq!(back.encode(Format::Csv), t.encode(Format::Csv));
    }

    #[test]
    fn fifteen_digits() {
        assert_eq!(round_sig(2.0 / 3.0), 0.666666666666667);
        assert_eq!(round_sig(0.0), 0.0);
    }

    #[test]
    fn json_shapes() {
        let mut t = Table::new(&["lo", "hi"]);
        t.push(vec![1.0.into(), 2.0.into()]);
        t.single_object = true;
        let v: Value = serde_json::from_slice(&t.encode(Format::Json)).unwrap();
        assert!(v.is_object());
        assert_eq!(v["hi"], 2.0);
        let v: Value = serde_json::from_slice(&sample().encode(Format::Json)).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 3);
        assert!(v[0]["e"].is_null());
    }

    #[test]
    fn unwritable_path_errors() {
        let dir = tempfile::tempdir().unwrap();
        let bad = dir.path().join("missing").join("out.csv");
        assert!(emit_table(&sample(), Format::Csv, Some(&bad)).is_err());
        let good = dir.path().join("out.csv");
        emit_table(&sample(), Format::Csv, Some(&good)).unwrap();
        assert_eq!(read_csv(&good).unwrap().rows.len(), 3);
    }
}
