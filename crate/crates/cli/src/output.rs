//! Tables and how they leave the process: CSV (LF, header row) or a JSON
//! document, plus an optional JSON sidecar with the run parameters.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            // Debug prints the shortest string that parses back exactly
            Cell::Num(x) => format!("{x:?}"),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => Value::from(*x),
            Cell::Int(i) => Value::from(*i),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }
}

/// Everything a subcommand produces.
pub struct Report {
    pub command: &'static str,
    pub config: Value,
    pub table: Table,
    /// Summary values (defects, distances, …) beyond the table.
    pub extra: Map<String, Value>,
    /// Whether a sidecar is written next to `--out` by default.
    pub sidecar_by_default: bool,
}

impl Report {
    pub fn new(command: &'static str, config: Value, table: Table) -> Self {
        Report {
            command,
            config,
            table,
            extra: Map::new(),
            sidecar_by_default: false,
        }
    }

    pub fn with(mut self, key: &str, value: Value) -> Self {
        self.extra.insert(key.to_string(), value);
        self
    }

    pub fn with_sidecar(mut self) -> Self {
        self.sidecar_by_default = true;
        self
    }

    fn header(&self) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("schema_version".into(), json!(SCHEMA_VERSION));
        m.insert("command".into(), json!(self.command));
        m.insert("config".into(), self.config.clone());
        m.extend(self.extra.clone());
        m
    }

    fn full_json(&self) -> Value {
        let mut m = self.header();
        m.insert("columns".into(), json!(self.table.columns));
        let rows: Vec<Value> = self
            .table
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
            .collect();
        m.insert("rows".into(), Value::Array(rows));
        Value::Object(m)
    }

    /// Writes the table (CSV or JSON) to `out` or stdout, and the sidecar
    /// when asked for or implied by `--out`.
    pub fn emit(&self, json: bool, out: Option<&Path>, sidecar: Option<&Path>) -> io::Result<()> {
        let body = if json {
            let mut s = serde_json::to_string_pretty(&self.full_json())?;
            s.push('\n');
            s
        } else {
            self.table.to_csv()
        };
        match out {
            Some(p) => fs::write(p, body)?,
            None => io::stdout().lock().write_all(body.as_bytes())?,
        }
        let sidecar_path: Option<PathBuf> = match (sidecar, out) {
            (Some(p), _) => Some(p.to_path_buf()),
            (None, Some(o)) if self.sidecar_by_default && !json => Some(o.with_extension("json")),
            _ => None,
        };
        if let Some(p) = sidecar_path {
            let mut s = serde_json::to_string_pretty(&Value::Object(self.header()))?;
            s.push('\n');
            fs::write(p, s)?;
        }
        Ok(())
    }
}
