//! Tables rendered as CSV or JSON, each preceded by run metadata.

use std::io::Write;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::Format;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub config_hash: String,
    pub command: String,
    pub range: String,
}

impl Meta {
    fn line(&self) -> String {
        format!(
            "# tool={} version={} config={} command={} range={}",
            self.tool, self.version, self.config_hash, self.command, self.range
        )
    }
}

/// Named columns and rows of JSON scalars, in emission order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

pub fn render<W: Write>(meta: &Meta, table: &Table, format: Format, delimiter: u8, out: &mut W) -> std::io::Result<()> {
    match format {
        Format::Csv => {
            writeln!(out, "{}", meta.line())?;
            let mut w = csv::WriterBuilder::new().delimiter(delimiter).from_writer(&mut *out);
            w.write_record(&table.columns)?;
            for row in &table.rows {
                w.write_record(row.iter().map(cell))?;
            }
            w.flush()?;
        }
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|r| {
                    let obj: Map<String, Value> = table.columns.iter().cloned().zip(r.iter().cloned()).collect();
                    Value::Object(obj)
                })
                .collect();
            let doc = json!({ "meta": meta, "columns": table.columns, "rows": rows });
            serde_json::to_writer_pretty(&mut *out, &doc)?;
            writeln!(out)?;
        }
    }
    Ok(())
}
