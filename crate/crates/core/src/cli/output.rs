//! Rendering of command results as a JSON envelope or CSV.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;
use serde_json::{json, Value};

use crate::report::InequalityReport;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl Cell {
    fn to_json(&self) -> Value {
        match self {
            Cell::Num(v) => json!(v),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
        }
    }

    fn to_csv(&self) -> String {
        match self {
            Cell::Num(v) => sig12(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Everything a command produces.
#[derive(Debug, Clone, Default)]
pub struct Output {
    pub reports: Vec<InequalityReport>,
    pub values: BTreeMap<String, Value>,
    pub table: Option<Table>,
    /// Set when an asserted outcome did not occur; maps to exit code 1.
    pub failed: bool,
}

impl Output {
    pub fn value(&mut self, key: &str, v: impl Serialize) {
        self.values
            .insert(key.to_string(), serde_json::to_value(v).unwrap_or(Value::Null));
    }

    /// Records a named pass/fail expectation.
    pub fn check(&mut self, name: &str, ok: bool) {
        let checks = self
            .values
            .entry("checks".to_string())
            .or_insert_with(|| Value::Object(Default::default()));
        if let Value::Object(map) = checks {
            map.insert(name.to_string(), Value::Bool(ok));
        }
        if !ok {
            self.failed = true;
        }
    }

    /// Merges another output, prefixing its value keys.
    pub fn absorb(&mut self, prefix: &str, other: Output) {
        self.reports.extend(other.reports);
        for (k, v) in other.values {
            if k == "checks" {
                if let Value::Object(map) = v {
                    for (name, ok) in map {
                        self.check(&format!("{prefix}.{name}"), ok.as_bool().unwrap_or(false));
                    }
                }
            } else {
                self.values.insert(format!("{prefix}.{k}"), v);
            }
        }
        if other.table.is_some() && self.table.is_none() {
            self.table = other.table;
        }
        self.failed |= other.failed;
    }
}

/// Decimal rendering with 12 significant digits.
pub fn sig12(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{v:.11e}")
    }
}

pub fn render_json<W: Write>(
    mut w: W,
    command: &str,
    config: &impl Serialize,
    out: &Output,
) -> std::io::Result<()> {
    let mut doc = serde_json::Map::new();
    doc.insert("schema".into(), json!(SCHEMA_VERSION));
    doc.insert("command".into(), json!(command));
    doc.insert("config".into(), serde_json::to_value(config).unwrap_or(Value::Null));
    doc.insert("reports".into(), serde_json::to_value(&out.reports).unwrap_or(Value::Null));
    doc.insert("values".into(), Value::Object(out.values.clone().into_iter().collect()));
    if let Some(t) = &out.table {
        let rows: Vec<Value> = t
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::to_json).collect()))
            .collect();
        doc.insert("table".into(), json!({ "columns": t.columns, "rows": rows }));
    }
    serde_json::to_writer_pretty(&mut w, &Value::Object(doc))?;
    writeln!(w)
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, rows);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), v, rows);
            }
        }
        Value::Number(n) => rows.push((prefix.to_string(), n.as_f64().map(sig12).unwrap_or_default())),
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
        Value::Bool(b) => rows.push((prefix.to_string(), b.to_string())),
        Value::Null => rows.push((prefix.to_string(), String::new())),
    }
}

/// The table when there is one, otherwise `key,value` rows of every value
/// and report field.
pub fn render_csv<W: Write>(w: W, out: &Output) -> std::io::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let to_io = |e: csv::Error| std::io::Error::other(e.to_string());
    match &out.table {
        Some(t) => {
            wtr.write_record(&t.columns).map_err(to_io)?;
            for row in &t.rows {
                wtr.write_record(row.iter().map(Cell::to_csv)).map_err(to_io)?;
            }
        }
        None => {
            let mut rows = Vec::new();
            for (i, r) in out.reports.iter().enumerate() {
                flatten(&format!("report{i}"), &serde_json::to_value(r).unwrap_or(Value::Null), &mut rows);
            }
            for (k, v) in &out.values {
                flatten(k, v, &mut rows);
            }
            wtr.write_record(["key", "value"]).map_err(to_io)?;
            for (k, v) in rows {
                wtr.write_record([k, v]).map_err(to_io)?;
            }
        }
    }
    wtr.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(std::f64::consts::PI), "3.14159265359");
        assert_eq!(sig12(1.0), "1");
        assert_eq!(sig12(-0.075), "-0.075");
        assert_eq!(sig12(12.566370614359172), "12.5663706144");
        assert_eq!(sig12(1.5e-9), "1.50000000000e-9");
        assert_eq!(sig12(0.0), "0");
    }

    #[test]
    fn csv_falls_back_to_key_value() {
        let mut out = Output::default();
        out.reports.push(InequalityReport::new(2.0, 1.0, 0.0));
        out.value("N", 4.0);
        let mut buf = Vec::new();
        render_csv(&mut buf, &out).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("key,value\n"));
        assert!(text.contains("report0.lhs,2\n"));
        assert!(text.contains("N,4\n"));
    }

    #[test]
    fn checks_set_failure() {
        let mut out = Output::default();
        out.check("a", true);
        assert!(!out.failed);
        out.check("b", false);
        assert!(out.failed);
        assert_eq!(out.values["checks"]["b"], false);
    }
}
