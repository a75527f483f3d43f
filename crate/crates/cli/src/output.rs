//! CSV tables and JSON sidecars.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::args::{Format, OutputArgs};
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Real(f64),
}

impl Cell {
    /// Reals carry 12 significant digits.
    fn text(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => format!("{v:.11e}"),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::text))?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.into_error()))
    }

    fn to_json(&self, meta: &Value) -> Value {
        serde_json::json!({
            "meta": meta,
            "columns": self.header,
            "rows": self.rows,
        })
    }
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

fn pretty(value: &Value) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Writes the table and its metadata according to `--out` and `--format`.
pub fn emit(out: &OutputArgs, table: &Table, meta: &Value) -> Result<(), CliError> {
    match (&out.out, out.format) {
        (Some(path), Format::Csv) => {
            let sidecar = sidecar_path(path);
            if sidecar == *path {
                return Err(CliError::Usage(format!(
                    "--out {} would be overwritten by its JSON sidecar",
                    path.display()
                )));
            }
            fs::write(path, table.to_csv()?)?;
            fs::write(sidecar, pretty(meta)?)?;
        }
        (Some(path), Format::Json) => fs::write(path, pretty(&table.to_json(meta))?)?,
        (None, format) => {
            let data = match format {
                Format::Csv => table.to_csv()?,
                Format::Json => pretty(&table.to_json(meta))?,
            };
            io::stdout().lock().write_all(&data)?;
            if format == Format::Csv {
                io::stderr().lock().write_all(&pretty(meta)?)?;
            }
        }
    }
    Ok(())
}
