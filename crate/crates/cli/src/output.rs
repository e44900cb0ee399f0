//! Atomic file output and the CSV result format.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    UInt,
    Float,
    Text,
    Bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    UInt(u64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn kind(&self) -> ColumnKind {
        match self {
            Cell::UInt(_) => ColumnKind::UInt,
            Cell::Float(_) => ColumnKind::Float,
            Cell::Text(_) => ColumnKind::Text,
            Cell::Bool(_) => ColumnKind::Bool,
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::UInt(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Text(v) => v.clone(),
            Cell::Bool(v) => v.to_string(),
        }
    }

    fn parse(kind: ColumnKind, field: &str) -> Option<Cell> {
        Some(match kind {
            ColumnKind::UInt => Cell::UInt(field.parse().ok()?),
            ColumnKind::Float => Cell::Float(field.parse().ok()?),
            ColumnKind::Text => Cell::Text(field.to_owned()),
            ColumnKind::Bool => Cell::Bool(field.parse().ok()?),
        })
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schema {
    pub columns: Vec<(&'static str, ColumnKind)>,
}

impl Schema {
    pub fn new(columns: &[(&'static str, ColumnKind)]) -> Self {
        Self {
            columns: columns.to_vec(),
        }
    }

    fn check(&self, row: &[Cell]) -> CliResult<()> {
        let kinds: Vec<ColumnKind> = row.iter().map(Cell::kind).collect();
        let expected: Vec<ColumnKind> = self.columns.iter().map(|c| c.1).collect();
        if kinds != expected {
            return Err(CliError::Config(format!(
                "row {kinds:?} does not match schema {expected:?}"
            )));
        }
        Ok(())
    }
}

/// RFC 4180 CSV with a header row, written atomically.
pub fn emit_results(rows: &[Vec<Cell>], schema: &Schema, path: &Path) -> CliResult<()> {
    for row in rows {
        schema.check(row)?;
    }
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    writer.write_record(schema.columns.iter().map(|c| c.0))?;
    for row in rows {
        writer.write_record(row.iter().map(Cell::render))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| CliError::Io(e.to_string()))?;
    write_atomic(path, &bytes)
}

/// Reads a file written by [`emit_results`] back into typed rows.
pub fn read_results(path: &Path, schema: &Schema) -> CliResult<Vec<Vec<Cell>>> {
    let mut reader = csv::Reader::from_path(path)?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    let names: Vec<&str> = schema.columns.iter().map(|c| c.0).collect();
    if header != names {
        return Err(CliError::Config(format!(
            "{}: header {header:?} does not match {names:?}",
            path.display()
        )));
    }
    reader
        .records()
        .map(|record| {
            let record = record?;
            record
                .iter()
                .zip(&schema.columns)
                .map(|(field, &(name, kind))| {
                    Cell::parse(kind, field).ok_or_else(|| {
                        CliError::Config(format!("column {name}: cannot parse {field:?}"))
                    })
                })
                .collect()
        })
        .collect()
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)?;
    Ok(())
}

/// Output directory with fixed file names inside it.
#[derive(Debug, Clone)]
pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    pub fn create(root: &Path) -> CliResult<Self> {
        std::fs::create_dir_all(root)?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> CliResult<()> {
        write_atomic(&self.path(name), bytes)?;
        self.written.push(name.to_owned());
        Ok(())
    }

    pub fn write_csv(&mut self, name: &str, schema: &Schema, rows: &[Vec<Cell>]) -> CliResult<()> {
        emit_results(rows, schema, &self.path(name))?;
        self.written.push(name.to_owned());
        Ok(())
    }

    /// File names written so far, in order.
    pub fn written(&self) -> &[String] {
        &self.written
    }
}
