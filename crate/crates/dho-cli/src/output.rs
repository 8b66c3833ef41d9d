//! Deterministic table output: CSV with fixed 17-significant-digit cells,
//! or a column/row JSON document. Identical inputs produce byte-identical
//! files.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::CliError;

/// Fixed 17-significant-digit scientific formatting for CSV cells.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// One table cell: integers print bare, floats in fixed scientific form.
#[derive(Clone, Copy, Debug)]
pub enum Cell {
    Int(i64),
    Float(f64),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => fmt_float(*v),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Int(v) => serde_json::Value::from(*v),
            Cell::Float(v) => serde_json::Value::from(*v),
        }
    }
}

pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.rows.len() * 32 + 64);
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            debug_assert_eq!(row.len(), self.columns.len());
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "columns": self.columns,
            "rows": self.rows
                .iter()
                .map(|row| row.iter().map(Cell::json).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Apply the `DHO_OUTPUT_DIR` directory override to an output path.
pub fn resolve_output_path(path: &Path) -> PathBuf {
    match std::env::var_os("DHO_OUTPUT_DIR") {
        Some(dir) if !dir.is_empty() => {
            let file = path.file_name().unwrap_or(path.as_os_str());
            PathBuf::from(dir).join(file)
        }
        _ => path.to_path_buf(),
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() && !parent.exists() {
            fs::create_dir_all(parent)
                .map_err(|e| CliError::io(&format!("creating {}", parent.display()), e))?;
        }
    }
    fs::write(path, text).map_err(|e| CliError::io(&format!("writing {}", path.display()), e))
}

pub fn write_table(path: &Path, table: &Table, format: Format) -> Result<(), CliError> {
    let text = match format {
        Format::Csv => table.to_csv(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&table.to_json())
                .expect("table serialization is infallible");
            s.push('\n');
            s
        }
    };
    write_text(path, &text)
}
