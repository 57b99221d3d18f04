//! Run reports and their CSV / JSON encodings.
//!
//! A report is an ordered summary map plus an optional table. CSV carries a
//! header row and the table (or the summary as a single row when there is no
//! table); JSON is one object holding the command, mode, resolved config,
//! summary and rows. Floats are written with 17 significant digits so they
//! round-trip exactly.

use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;
use serde_json::{Map, Value};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub command: String,
    pub mode: Option<String>,
    pub config: Map<String, Value>,
    pub summary: Map<String, Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub elapsed_ms: Option<f64>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.into(),
            ..Default::default()
        }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.summary.insert(key.into(), value.into());
        self
    }

    pub fn set_f64(&mut self, key: &str, value: f64) -> &mut Self {
        self.summary.insert(key.into(), num(value));
        self
    }

    pub fn with_columns(&mut self, cols: &[&str]) -> &mut Self {
        self.columns = cols.iter().map(|c| c.to_string()).collect();
        self
    }

    pub fn push_row(&mut self, row: Vec<Value>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Dimension(format!(
                "row has {} cells for {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn to_json_value(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("command".into(), self.command.clone().into());
        obj.insert("mode".into(), self.mode.clone().map_or(Value::Null, Value::String));
        obj.insert("config".into(), Value::Object(self.config.clone()));
        obj.insert("summary".into(), Value::Object(self.summary.clone()));
        if !self.columns.is_empty() {
            let rows = self
                .rows
                .iter()
                .map(|r| {
                    Value::Object(
                        self.columns
                            .iter()
                            .cloned()
                            .zip(r.iter().cloned())
                            .collect(),
                    )
                })
                .collect();
            obj.insert("rows".into(), Value::Array(rows));
        }
        if let Some(ms) = self.elapsed_ms {
            obj.insert("elapsed_ms".into(), num(ms));
        }
        Value::Object(obj)
    }
}

/// Float to JSON value; non-finite values become `null`.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// `{:.16e}`: 17 significant digits.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

struct SigDigits;

impl Formatter for SigDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        writer.write_all(format_f64(value).as_bytes())
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) if n.is_f64() => format_f64(n.as_f64().unwrap_or(f64::NAN)),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn emit_report(report: &Report, format: Format, sink: &mut dyn Write) -> Result<()> {
    match format {
        Format::Json => {
            let mut ser = serde_json::Serializer::with_formatter(&mut *sink, SigDigits);
            report
                .to_json_value()
                .serialize(&mut ser)
                .map_err(|e| Error::Io(std::io::Error::other(e)))?;
            sink.write_all(b"\n")?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *sink);
            let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
            if has_table(report) {
                w.write_record(&report.columns).map_err(csv_err)?;
                for row in &report.rows {
                    w.write_record(row.iter().map(cell)).map_err(csv_err)?;
                }
            } else {
                w.write_record(report.summary.keys()).map_err(csv_err)?;
                w.write_record(report.summary.values().map(cell)).map_err(csv_err)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn has_table(report: &Report) -> bool {
    !report.columns.is_empty()
}
