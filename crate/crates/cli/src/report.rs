use std::collections::BTreeSet;
use std::io::Write;

use serde::Serialize;
use serde_json::{Map, Value};

pub const SCHEMA_VERSION: &str = "1";

pub type Row = Map<String, Value>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Serialize)]
pub struct ReportDocument {
    pub schema_version: &'static str,
    pub config: Value,
    pub rows: Vec<Row>,
    pub notes: Vec<String>,
}

impl ReportDocument {
    pub fn new(config: Value) -> Self {
        ReportDocument {
            schema_version: SCHEMA_VERSION,
            config,
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Value) {
        match row {
            Value::Object(m) => self.rows.push(m),
            other => panic!("row must be an object, got {other}"),
        }
    }

    pub fn note(&mut self, n: impl Into<String>) {
        self.notes.push(n.into());
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>, String> {
        let mut out = Vec::new();
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut out, self).map_err(|e| e.to_string())?;
                out.push(b'\n');
            }
            Format::Csv => {
                let columns = self.columns();
                let mut w = csv::Writer::from_writer(&mut out);
                w.write_record(&columns).map_err(|e| e.to_string())?;
                for row in &self.rows {
                    w.write_record(columns.iter().map(|c| row.get(c).map(scalar).unwrap_or_default()))
                        .map_err(|e| e.to_string())?;
                }
                w.flush().map_err(|e| e.to_string())?;
            }
            Format::Text => {
                let mut put = |s: String| {
                    out.extend_from_slice(s.as_bytes());
                    out.push(b'\n');
                };
                if let Value::Object(cfg) = &self.config {
                    for (k, v) in cfg {
                        put(format!("# {k} = {}", scalar(v)));
                    }
                }
                for row in &self.rows {
                    put(row.iter().map(|(k, v)| format!("{k}={}", scalar(v))).collect::<Vec<_>>().join(" "));
                }
                for n in &self.notes {
                    put(format!("# note: {n}"));
                }
            }
        }
        Ok(out)
    }

    /// Union of row keys, alphabetical.
    fn columns(&self) -> Vec<String> {
        let set: BTreeSet<&String> = self.rows.iter().flat_map(|r| r.keys()).collect();
        set.into_iter().cloned().collect()
    }

    pub fn emit(&self, format: Format, path: Option<&std::path::Path>) -> Result<(), String> {
        let bytes = self.render(format)?;
        if format != Format::Json {
            for n in &self.notes {
                eprintln!("note: {n}");
            }
        }
        match path {
            Some(p) => std::fs::write(p, bytes).map_err(|e| format!("{}: {e}", p.display())),
            None => std::io::stdout().write_all(&bytes).map_err(|e| e.to_string()),
        }
    }
}

/// Cell text: strings raw, everything else as its JSON literal, null empty.
fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// `u128` counts fit JSON integers up to `u64::MAX`; larger ones become strings.
pub fn big(v: u128) -> Value {
    u64::try_from(v).map(Value::from).unwrap_or_else(|_| Value::String(v.to_string()))
}
