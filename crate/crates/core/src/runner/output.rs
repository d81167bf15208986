//! Table serialization.
//!
//! CSV files open with `# `-prefixed metadata lines (engine versions, build
//! id and the configuration as one line of JSON), then the header row and one
//! line per row. Numbers are written with 17 significant digits in scientific
//! notation, which round-trips every `f64`. JSON output is a single object
//! `{metadata, columns, rows}`.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::config::OutputFormat;
use super::experiment::ResultTable;
use crate::{Error, Result};

fn ser_err(e: serde_json::Error) -> Error {
    Error::Serialization(e.to_string())
}

pub fn to_csv(table: &ResultTable) -> Result<String> {
    let mut out = String::new();
    let meta = &table.metadata;
    let engine = meta
        .engine
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(" ");
    out.push_str(&format!("# engine: {engine}\n"));
    out.push_str(&format!("# build: {}\n", meta.build_id));
    out.push_str(&format!(
        "# config: {}\n",
        serde_json::to_string(&meta.config).map_err(ser_err)?
    ));
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    Ok(out)
}

pub fn to_json(table: &ResultTable) -> Result<String> {
    let mut s = serde_json::to_string_pretty(table).map_err(ser_err)?;
    s.push('\n');
    Ok(s)
}

pub fn from_json(text: &str) -> Result<ResultTable> {
    serde_json::from_str(text).map_err(ser_err)
}

pub fn render(table: &ResultTable, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => to_csv(table),
        OutputFormat::Json => to_json(table),
    }
}

/// Writes the table to `path`, or to stdout when `path` is `None`.
pub fn emit(table: &ResultTable, format: OutputFormat, path: Option<&Path>) -> Result<()> {
    let text = render(table, format)?;
    match path {
        Some(p) => fs::write(p, text).map_err(|source| Error::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| Error::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}
