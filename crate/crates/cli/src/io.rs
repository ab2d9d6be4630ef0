use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::CliError;

/// Column selector: zero-based index or header name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnRef {
    Index(usize),
    Name(String),
}

impl std::str::FromStr for ColumnRef {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim().parse::<usize>() {
            Ok(i) => ColumnRef::Index(i),
            Err(_) => ColumnRef::Name(s.trim().to_string()),
        })
    }
}

impl std::fmt::Display for ColumnRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ColumnRef::Index(i) => write!(f, "{i}"),
            ColumnRef::Name(n) => f.write_str(n),
        }
    }
}

/// A parsed CSV file: optional header plus raw string rows.
pub struct Table {
    pub header: Option<Vec<String>>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    /// Reads a comma-separated file. The first row is a header when any of
    /// its cells fails to parse as a number.
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record.map_err(|e| CliError::Input(format!("{}: row {}: {e}", path.display(), i + 1)))?;
            rows.push(record.iter().map(str::to_string).collect::<Vec<_>>());
        }
        let header = match rows.first() {
            Some(first) if first.iter().any(|cell| cell.parse::<f64>().is_err()) => Some(rows.remove(0)),
            _ => None,
        };
        Ok(Self { header, rows })
    }

    pub fn column_index(&self, column: &ColumnRef) -> Result<usize, CliError> {
        match column {
            ColumnRef::Index(i) => Ok(*i),
            ColumnRef::Name(name) => self
                .header
                .as_ref()
                .and_then(|h| h.iter().position(|c| c == name))
                .ok_or_else(|| CliError::Input(format!("no column named '{name}'"))),
        }
    }

    pub fn has_column(&self, name: &str) -> bool {
        self.header.as_ref().is_some_and(|h| h.iter().any(|c| c == name))
    }

    /// Numeric values of one column; every data row must have a finite number there.
    pub fn numeric_column(&self, column: &ColumnRef) -> Result<Vec<f64>, CliError> {
        let index = self.column_index(column)?;
        let offset = if self.header.is_some() { 2 } else { 1 };
        let mut values = Vec::with_capacity(self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            let cell = row.get(index).ok_or_else(|| {
                CliError::Input(format!("line {}: column {column} missing", i + offset))
            })?;
            let v: f64 = cell
                .parse()
                .map_err(|_| CliError::Input(format!("line {}: non-numeric cell '{cell}' in column {column}", i + offset)))?;
            if !v.is_finite() {
                return Err(CliError::Input(format!("line {}: non-finite value in column {column}", i + offset)));
            }
            values.push(v);
        }
        if values.is_empty() {
            return Err(CliError::Input(format!("column {column} is empty")));
        }
        Ok(values)
    }
}

/// Writes `bytes` to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Input(format!("invalid output path {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp-{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
        fs::rename(&tmp, path)
    })();
    result.map_err(|e| {
        let _ = fs::remove_file(&tmp);
        CliError::Input(format!("cannot write {}: {e}", path.display()))
    })
}

/// Writes to `path` when given, otherwise to stdout.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => write_atomic(p, bytes),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Input(format!("cannot write to stdout: {e}")))
        }
    }
}

/// CSV text from a header and rows of cells.
pub fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::Input(format!("csv encoding failed: {e}"));
    writer.write_record(header).map_err(fail)?;
    for row in rows {
        writer.write_record(&row).map_err(fail)?;
    }
    writer
        .into_inner()
        .map_err(|e| CliError::Input(format!("csv encoding failed: {e}")))
}
