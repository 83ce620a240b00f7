//! Tabular output in CSV or JSON with bit-stable formatting: floats are
//! written with 17 significant digits so parsing them recovers the exact
//! binary value, row order is deterministic, and maps are ordered.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde_json::{Map, Number, Value};

/// 17-significant-digit scientific form; round-trips f64 exactly.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// JSON number carrying the 17-digit decimal form verbatim.
pub fn num17(x: f64) -> Value {
    Value::Number(Number::from_str(&fmt17(x)).expect("finite float"))
}

#[derive(Debug, Clone)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Float(x) => fmt17(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Float(x) => num17(*x),
            Cell::Int(n) => Value::from(*n),
            Cell::Text(s) => Value::from(s.clone()),
            Cell::Bool(b) => Value::from(*b),
            Cell::Empty => Value::Null,
        }
    }
}

/// One tabular result document. The JSON form is an object with `command`,
/// `model`, any metadata fields, and `rows` as an array of column-keyed
/// objects; the CSV form is the bare table.
#[derive(Debug, Clone)]
pub struct Document {
    pub command: &'static str,
    pub model: String,
    pub meta: BTreeMap<String, Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Document {
    pub fn new(command: &'static str, model: &str, columns: Vec<String>) -> Self {
        Document {
            command,
            model: model.to_string(),
            meta: BTreeMap::new(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::to_csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut root = Map::new();
        root.insert("command".into(), Value::from(self.command));
        root.insert("model".into(), Value::from(self.model.clone()));
        for (key, value) in &self.meta {
            root.insert(key.clone(), value.clone());
        }
        root.insert(
            "columns".into(),
            Value::from(
                self.columns
                    .iter()
                    .map(|c| Value::from(c.clone()))
                    .collect::<Vec<_>>(),
            ),
        );
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (name, cell) in self.columns.iter().zip(row) {
                    obj.insert(name.clone(), cell.to_json());
                }
                Value::Object(obj)
            })
            .collect();
        root.insert("rows".into(), Value::from(rows));
        let mut text =
            serde_json::to_string_pretty(&Value::Object(root)).expect("document serializes");
        text.push('\n');
        text
    }
}
