//! Tabular output shared by every command, with a CSV reader for the files
//! the tool writes itself.
//!
//! CSV layout: `#`-prefixed metadata lines (`# key=value`), one header row,
//! then data rows. Floats carry 12 significant digits.

use std::io::{BufRead, Write};

use serde_json::{json, Map, Value};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            Cell::Text(_) => None,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(v) => json!(round_sig(*v)),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    /// Inverse of `render`: integers without a decimal point stay integers.
    fn parse(field: &str) -> Cell {
        if let Ok(i) = field.parse::<i64>() {
            return Cell::Int(i);
        }
        match field.parse::<f64>() {
            Ok(v) => Cell::Num(v),
            Err(_) => Cell::Text(field.to_string()),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(i64::from(v))
    }
}

/// Seeds can exceed `i64`; those are kept as text.
impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        i64::try_from(v).map_or_else(|_| Cell::Text(v.to_string()), Cell::Int)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(if v { "true" } else { "false" }.to_string())
    }
}

/// Rounds to 12 significant digits.
pub fn round_sig(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v).parse().expect("formatted float parses")
}

/// Plain decimal text of the 12-digit rounding. Always contains a `.` or an
/// exponent so the reader keeps it a float.
pub fn format_float(v: f64) -> String {
    let r = round_sig(v);
    let s = if r != 0.0 && (r.abs() < 1e-6 || r.abs() >= 1e15) {
        format!("{r:e}")
    } else {
        format!("{r}")
    };
    if s.contains(['.', 'e', 'N', 'i']) {
        s
    } else {
        format!("{s}.0")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub command: String,
    pub params: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// JSON-only payload (for example a histogram), omitted from CSV.
    pub extra: Map<String, Value>,
}

impl Table {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        Table {
            command: command.to_string(),
            params: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            extra: Map::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric column by name.
    pub fn values(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column(name)?;
        self.rows.iter().map(|r| r[i].as_f64()).collect()
    }

    pub fn get_param(&self, key: &str) -> Option<&str> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Fails on any non-finite float.
    pub fn check_finite(&self) -> Result<(), CliError> {
        for row in &self.rows {
            for (cell, col) in row.iter().zip(&self.columns) {
                if let Cell::Num(v) = cell {
                    if !v.is_finite() {
                        return Err(CliError::Internal(format!("non-finite value in column {col}")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<(), CliError> {
        writeln!(out, "# schema={SCHEMA_VERSION}")?;
        writeln!(out, "# command={}", self.command)?;
        for (k, v) in &self.params {
            writeln!(out, "# {k}={v}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let params: Map<String, Value> = self.params.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj: Map<String, Value> =
                    self.columns.iter().zip(r).map(|(c, cell)| (c.clone(), cell.to_json())).collect();
                Value::Object(obj)
            })
            .collect();
        let mut v = json!({
            "schema": SCHEMA_VERSION,
            "command": self.command,
            "parameters": params,
            "columns": self.columns,
            "rows": rows,
        });
        if !self.extra.is_empty() {
            v["extra"] = Value::Object(self.extra.clone());
        }
        v
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<(), CliError> {
        serde_json::to_writer_pretty(&mut out, &self.to_json())?;
        writeln!(out)?;
        Ok(())
    }

    /// Reads a CSV produced by [`Table::write_csv`].
    pub fn read_csv<R: BufRead>(input: R) -> Result<Table, CliError> {
        let mut command = String::new();
        let mut params = Vec::new();
        let mut body = String::new();
        for line in input.lines() {
            let line = line?;
            if let Some(meta) = line.strip_prefix("# ") {
                let (k, v) = meta
                    .split_once('=')
                    .ok_or_else(|| CliError::Internal(format!("malformed metadata line: {line}")))?;
                match k {
                    "schema" => {}
                    "command" => command = v.to_string(),
                    _ => params.push((k.to_string(), v.to_string())),
                }
            } else {
                body.push_str(&line);
                body.push('\n');
            }
        }
        let mut r = csv::Reader::from_reader(body.as_bytes());
        let columns = r.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            rows.push(rec?.iter().map(Cell::parse).collect());
        }
        Ok(Table { command, params, columns, rows, extra: Map::new() })
    }
}
