use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use clap::ValueEnum;
use laser_noise::sweeps::{format_number, SweepTable, TOOL_VERSION};
use laser_noise::{Error, Result};
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub enum Report {
    /// A single JSON object.
    Record(Value),
    /// One JSON object per row, all with the same keys.
    Records(Vec<Value>),
    Table(SweepTable),
}

impl Report {
    fn default_format(&self) -> Format {
        match self {
            Report::Table(_) => Format::Csv,
            _ => Format::Json,
        }
    }
}

fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_owned()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(&key(k), v, out);
            }
        }
        Value::Number(n) => {
            let text = match (n.as_u64(), n.as_i64()) {
                (Some(u), _) => u.to_string(),
                (_, Some(i)) => i.to_string(),
                _ => format_number(n.as_f64().unwrap_or(f64::NAN)),
            };
            out.push((prefix.to_owned(), text));
        }
        Value::String(s) => out.push((prefix.to_owned(), s.clone())),
        Value::Null => out.push((prefix.to_owned(), String::new())),
        other => out.push((prefix.to_owned(), other.to_string())),
    }
}

fn write_records<W: Write>(out: &mut W, records: &[Value], metadata: bool) -> Result<()> {
    if metadata {
        writeln!(out, "# tool: {TOOL_VERSION}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    for (i, record) in records.iter().enumerate() {
        let mut flat = Vec::new();
        flatten("", record, &mut flat);
        if i == 0 {
            w.write_record(flat.iter().map(|(k, _)| k))?;
        }
        w.write_record(flat.iter().map(|(_, v)| v))?;
    }
    w.flush()?;
    Ok(())
}

fn with_tool(value: Value, metadata: bool) -> Value {
    match value {
        Value::Object(map) if metadata => {
            let mut out = Map::new();
            out.insert("tool".into(), Value::String(TOOL_VERSION.into()));
            out.extend(map);
            Value::Object(out)
        }
        other => other,
    }
}

pub fn emit(report: Report, format: Option<Format>, path: Option<&Path>, metadata: bool) -> Result<()> {
    let format = format.unwrap_or_else(|| report.default_format());
    let sink: Box<dyn Write> = match path {
        Some(p) => Box::new(
            File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?,
        ),
        None => Box::new(io::stdout().lock()),
    };
    let mut out = BufWriter::new(sink);
    match (report, format) {
        (Report::Table(t), Format::Csv) => t.write_csv(&mut out, metadata)?,
        (Report::Table(t), Format::Json) => {
            serde_json::to_writer_pretty(&mut out, &t.to_json(metadata))?;
            writeln!(out)?;
        }
        (Report::Record(v), Format::Json) => {
            serde_json::to_writer_pretty(&mut out, &with_tool(v, metadata))?;
            writeln!(out)?;
        }
        (Report::Record(v), Format::Csv) => write_records(&mut out, &[v], metadata)?,
        (Report::Records(rs), Format::Json) => {
            let body = if metadata {
                serde_json::json!({ "tool": TOOL_VERSION, "records": rs })
            } else {
                Value::Array(rs)
            };
            serde_json::to_writer_pretty(&mut out, &body)?;
            writeln!(out)?;
        }
        (Report::Records(rs), Format::Csv) => write_records(&mut out, &rs, metadata)?,
    }
    out.flush()?;
    Ok(())
}
