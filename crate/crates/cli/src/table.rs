//! Tabular sweep output: CSV with `# key = value` metadata lines and
//! `name (unit)` headers, or JSON with metadata, columns and records.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde_json::{json, Map, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed table: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

impl Format {
    pub fn label(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    pub fn num(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            _ => None,
        }
    }

    pub fn text(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn flag(&self) -> Option<bool> {
        match self {
            Cell::Bool(b) => Some(*b),
            _ => None,
        }
    }

    /// Bit-level equality (NaN equals NaN).
    fn same(&self, other: &Cell) -> bool {
        match (self, other) {
            (Cell::Num(a), Cell::Num(b)) => a.to_bits() == b.to_bits(),
            _ => self == other,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
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

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

/// Shortest representation that parses back to the same bits.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else if v != 0.0 && (v.abs() < 1e-4 || v.abs() >= 1e15) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

fn parse_cell(s: &str) -> Cell {
    match s {
        "" => Cell::Empty,
        "true" => Cell::Bool(true),
        "false" => Cell::Bool(false),
        _ => s.parse::<f64>().map(Cell::Num).unwrap_or_else(|_| Cell::Text(s.to_string())),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

impl Column {
    pub fn new(name: &str, unit: &str) -> Self {
        Column { name: name.into(), unit: unit.into() }
    }

    fn header(&self) -> String {
        if self.unit.is_empty() {
            self.name.clone()
        } else {
            format!("{} ({})", self.name, self.unit)
        }
    }

    fn from_header(h: &str) -> Self {
        match h.rfind(" (") {
            Some(pos) if h.ends_with(')') => Column::new(&h[..pos], &h[pos + 2..h.len() - 1]),
            _ => Column::new(h, ""),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
    pub metadata: BTreeMap<String, String>,
}

impl PartialEq for Table {
    fn eq(&self, other: &Self) -> bool {
        self.columns == other.columns
            && self.metadata == other.metadata
            && self.rows.len() == other.rows.len()
            && self
                .rows
                .iter()
                .zip(&other.rows)
                .all(|(a, b)| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.same(y)))
    }
}

impl Table {
    pub fn new(columns: Vec<Column>) -> Self {
        Table { columns, rows: Vec::new(), metadata: BTreeMap::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.insert(key.to_string(), value.to_string());
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// All cells of column `name`.
    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    pub fn numbers(&self, name: &str) -> Option<Vec<f64>> {
        Some(self.column(name)?.into_iter().map(|c| c.num().unwrap_or(f64::NAN)).collect())
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<(), TableError> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    pub fn write_csv(&self, out: &mut dyn Write) -> Result<(), TableError> {
        for (k, v) in &self.metadata {
            writeln!(out, "# {k} = {v}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.columns.iter().map(Column::header))?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| match c {
                Cell::Num(v) => format_float(*v),
                Cell::Bool(b) => b.to_string(),
                Cell::Text(s) => s.clone(),
                Cell::Empty => String::new(),
            }))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(input: &mut dyn BufRead) -> Result<Table, TableError> {
        let mut text = String::new();
        input.read_to_string(&mut text)?;
        let mut metadata = BTreeMap::new();
        let mut body = String::new();
        for line in text.lines() {
            if let Some(rest) = line.strip_prefix("# ") {
                let (k, v) = rest.split_once(" = ").ok_or_else(|| TableError::Malformed(line.into()))?;
                metadata.insert(k.to_string(), v.to_string());
            } else {
                body.push_str(line);
                body.push('\n');
            }
        }
        let mut r = csv::Reader::from_reader(body.as_bytes());
        let columns: Vec<Column> = r.headers()?.iter().map(Column::from_header).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            rows.push(rec?.iter().map(parse_cell).collect());
        }
        Ok(Table { columns, rows, metadata })
    }

    pub fn write_json(&self, out: &mut dyn Write) -> Result<(), TableError> {
        let columns: Vec<Value> = self.columns.iter().map(|c| json!({"name": c.name, "unit": c.unit})).collect();
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut m = Map::new();
                for (c, cell) in self.columns.iter().zip(row) {
                    let v = match cell {
                        Cell::Num(x) if x.is_finite() => json!(x),
                        Cell::Num(x) => json!(format_float(*x)),
                        Cell::Bool(b) => json!(b),
                        Cell::Text(s) => json!(s),
                        Cell::Empty => Value::Null,
                    };
                    m.insert(c.name.clone(), v);
                }
                Value::Object(m)
            })
            .collect();
        let doc = json!({"metadata": self.metadata, "columns": columns, "records": records});
        serde_json::to_writer_pretty(&mut *out, &doc)?;
        writeln!(out)?;
        Ok(())
    }

    pub fn read_json(input: &mut dyn BufRead) -> Result<Table, TableError> {
        let doc: Value = serde_json::from_reader(input)?;
        let bad = |what: &str| TableError::Malformed(what.to_string());
        let metadata = doc["metadata"]
            .as_object()
            .ok_or_else(|| bad("metadata"))?
            .iter()
            .map(|(k, v)| Ok((k.clone(), v.as_str().ok_or_else(|| bad("metadata value"))?.to_string())))
            .collect::<Result<BTreeMap<_, _>, TableError>>()?;
        let columns = doc["columns"]
            .as_array()
            .ok_or_else(|| bad("columns"))?
            .iter()
            .map(|c| Ok(Column::new(c["name"].as_str().ok_or_else(|| bad("column name"))?, c["unit"].as_str().unwrap_or(""))))
            .collect::<Result<Vec<_>, TableError>>()?;
        let mut rows = Vec::new();
        for rec in doc["records"].as_array().ok_or_else(|| bad("records"))? {
            let row = columns
                .iter()
                .map(|c| match &rec[&c.name] {
                    Value::Null => Cell::Empty,
                    Value::Bool(b) => Cell::Bool(*b),
                    Value::Number(n) => Cell::Num(n.as_f64().unwrap_or(f64::NAN)),
                    Value::String(s) => match s.as_str() {
                        "NaN" | "inf" | "-inf" => Cell::Num(s.parse().unwrap()),
                        _ => Cell::Text(s.clone()),
                    },
                    other => Cell::Text(other.to_string()),
                })
                .collect();
            rows.push(row);
        }
        Ok(Table { columns, rows, metadata })
    }

    pub fn read(format: Format, input: &mut dyn BufRead) -> Result<Table, TableError> {
        match format {
            Format::Csv => Table::read_csv(input),
            Format::Json => Table::read_json(input),
        }
    }
}
