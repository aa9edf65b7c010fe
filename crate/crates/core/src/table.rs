//! Column-labelled numeric tables and their CSV and JSON renderings.
//!
//! Every cell is rendered in scientific notation with 12 significant digits.
//! JSON values are parsed back from those same strings, so both formats carry
//! identical numbers.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

impl Column {
    pub fn new(name: impl Into<String>, unit: impl Into<String>) -> Self {
        Column { name: name.into(), unit: unit.into() }
    }

    pub fn header(&self) -> String {
        format!("{} [{}]", self.name, self.unit)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<f64>>,
    pub metadata: BTreeMap<String, Value>,
}

/// Scientific notation with 12 significant digits; `-0` prints as `0`.
pub fn format_value(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.11e}")
}

impl Table {
    pub fn new(columns: Vec<Column>) -> Self {
        Table { columns, rows: Vec::new(), metadata: BTreeMap::new() }
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Config(format!(
                "row has {} cells, table has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        if let Some(bad) = row.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite cell {bad}")));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn with_meta(mut self, key: &str, value: impl Serialize) -> Self {
        self.metadata.insert(key.to_string(), serde_json::to_value(value).expect("serializable"));
        self
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let io = |e: csv::Error| Error::Config(format!("csv output failed: {e}"));
        w.write_record(self.columns.iter().map(Column::header)).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format_value(*v))).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Config(format!("csv output failed: {e}")))?;
        Ok(String::from_utf8(bytes).expect("ascii output"))
    }

    pub fn to_json(&self) -> Result<String> {
        let mut metadata = self.metadata.clone();
        metadata.insert("columns".into(), serde_json::to_value(&self.columns).expect("serializable"));
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                Value::Array(
                    row.iter()
                        .map(|v| json!(format_value(*v).parse::<f64>().expect("formatted float parses")))
                        .collect(),
                )
            })
            .collect();
        let doc = json!({ "metadata": metadata, "rows": rows });
        let mut s =
            serde_json::to_string_pretty(&doc).map_err(|e| Error::Config(format!("json output failed: {e}")))?;
        s.push('\n');
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(vec![Column::new("b", "nm"), Column::new("E_T", "neV")]);
        t.push_row(vec![1.0, -0.0]).unwrap();
        t.push_row(vec![123.456_789_012_345_6, -2.5e-12]).unwrap();
        t.with_meta("figure", "demo")
    }

    #[test]
    fn csv_layout() {
        let csv = sample().to_csv().unwrap();
        assert_eq!(csv, "b [nm],E_T [neV]\n1.00000000000e0,0.00000000000e0\n1.23456789012e2,-2.50000000000e-12\n");
    }

    #[test]
    fn json_matches_csv_values() {
        let t = sample();
        let doc: Value = serde_json::from_str(&t.to_json().unwrap()).unwrap();
        assert_eq!(doc["metadata"]["figure"], "demo");
        assert_eq!(doc["metadata"]["columns"][1]["unit"], "neV");
        let csv = t.to_csv().unwrap();
        let line = csv.lines().nth(2).unwrap();
        let from_csv: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        let from_json: Vec<f64> = doc["rows"][1].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
        assert_eq!(from_csv, from_json);
    }

    #[test]
    fn rejects_bad_rows() {
        let mut t = Table::new(vec![Column::new("x", "1")]);
        assert!(t.push_row(vec![f64::NAN]).is_err());
        assert!(t.push_row(vec![1.0, 2.0]).is_err());
    }
}
