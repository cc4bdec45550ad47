//! Column-ordered result tables written as CSV or JSON.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ConfigError;

/// Significant digits kept for every float written.
pub const SIGNIFICANT_DIGITS: usize = 9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(*i as f64),
            Value::Float(x) => Some(*x),
            Value::Text(_) => None,
        }
    }

    fn rounded(&self) -> Value {
        match self {
            Value::Float(x) => Value::Float(round_significant(*x)),
            other => other.clone(),
        }
    }

    fn render(&self) -> String {
        match self {
            Value::Int(i) => i.to_string(),
            Value::Float(x) => format_float(*x),
            Value::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Float(x)
    }
}

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Int(x as i64)
    }
}

impl From<u64> for Value {
    fn from(x: u64) -> Self {
        Value::Int(x as i64)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_string())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

pub fn round_significant(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

/// Shortest decimal that round-trips the 9-significant-digit value.
pub fn format_float(x: f64) -> String {
    let r = round_significant(x);
    if r == 0.0 {
        return "0".into();
    }
    r.to_string()
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    columns: Vec<String>,
    rows: Vec<Vec<Value>>,
}

impl ResultTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Value>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[k]).collect())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), ConfigError> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| ConfigError::Write(e.to_string());
        w.write_record(&self.columns).map_err(err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Value::render)).map_err(err)?;
        }
        w.flush().map_err(|e| ConfigError::Write(e.to_string()))
    }

    /// `{"config": …, "columns": […], "rows": [{column: value}]}`.
    pub fn to_json<C: Serialize + ?Sized>(&self, config: &C) -> Result<serde_json::Value, ConfigError> {
        let rows: Vec<serde_json::Map<String, serde_json::Value>> = self
            .rows
            .iter()
            .map(|r| {
                self.columns
                    .iter()
                    .cloned()
                    .zip(
                        r.iter()
                            .map(|v| serde_json::to_value(v.rounded()).expect("plain values serialize")),
                    )
                    .collect()
            })
            .collect();
        Ok(serde_json::json!({
            "config": serde_json::to_value(config).map_err(|e| ConfigError::Write(e.to_string()))?,
            "columns": self.columns,
            "rows": rows,
        }))
    }

    /// Write CSV or, for a `.json` extension, JSON with the config embedded.
    pub fn write<C: Serialize + ?Sized>(&self, path: &Path, config: &C) -> Result<(), ConfigError> {
        let file = std::fs::File::create(path).map_err(|e| ConfigError::Write(format!("{}: {e}", path.display())))?;
        let mut out = std::io::BufWriter::new(file);
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            let v = self.to_json(config)?;
            serde_json::to_writer_pretty(&mut out, &v).map_err(|e| ConfigError::Write(e.to_string()))?;
            out.write_all(b"\n").map_err(|e| ConfigError::Write(e.to_string()))?;
            Ok(())
        } else {
            self.write_csv(out)
        }
    }

    /// Parse CSV written by [`ResultTable::write_csv`]. Cells that parse as
    /// integers or floats come back as numbers.
    pub fn read_csv<R: std::io::Read>(input: R) -> Result<Self, ConfigError> {
        let mut r = csv::Reader::from_reader(input);
        let err = |e: csv::Error| ConfigError::Parse(e.to_string());
        let columns = r.headers().map_err(err)?.iter().map(String::from).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(err)?;
            rows.push(
                rec.iter()
                    .map(|cell| {
                        if let Ok(i) = cell.parse::<i64>() {
                            Value::Int(i)
                        } else if let Ok(x) = cell.parse::<f64>() {
                            Value::Float(x)
                        } else {
                            Value::Text(cell.to_string())
                        }
                    })
                    .collect(),
            );
        }
        Ok(Self { columns, rows })
    }
}
