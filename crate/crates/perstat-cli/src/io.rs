//! CSV ingestion and emission shared by every subcommand.
//!
//! Input files carry one header row; a column is selected by exact
//! header name first, then by 0-based index. Missing or non-numeric
//! cells are hard errors naming the data row and column. All numbers
//! are written with the shortest representation that round-trips, so
//! re-reading an output reproduces the exact bit pattern.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use sha2::{Digest, Sha256};

/// SHA-256 of raw bytes, lowercase hex.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        let _ = write!(out, "{b:02x}");
    }
    out
}

/// A parsed CSV file plus the content digest of its raw bytes.
pub struct Table {
    /// Display path, used in error messages and manifests.
    pub path: String,
    /// Header row cells.
    pub headers: Vec<String>,
    /// Data rows; may be ragged (missing cells error on access).
    pub rows: Vec<Vec<String>>,
    /// SHA-256 of the file bytes as read.
    pub digest: String,
}

/// Reads and parses a CSV file with one header row.
pub fn read_table(path: &Path) -> Result<Table> {
    let bytes = fs::read(path).with_context(|| format!("cannot read input {}", path.display()))?;
    let digest = sha256_hex(&bytes);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes.as_slice());
    let mut records = reader.records();
    let headers: Vec<String> = match records.next() {
        Some(record) => record
            .with_context(|| format!("{}: malformed CSV header row", path.display()))?
            .iter()
            .map(str::to_owned)
            .collect(),
        None => bail!("{}: empty file (expected a header row)", path.display()),
    };
    let mut rows = Vec::new();
    for (i, record) in records.enumerate() {
        let record = record
            .with_context(|| format!("{}: malformed CSV at data row {}", path.display(), i + 1))?;
        rows.push(record.iter().map(str::to_owned).collect());
    }
    Ok(Table {
        path: path.display().to_string(),
        headers,
        rows,
        digest,
    })
}

impl Table {
    /// Resolves a column selector to an index: exact header name first,
    /// then a 0-based integer index.
    pub fn column_index(&self, selector: &str) -> Result<usize> {
        if let Some(i) = self.headers.iter().position(|h| h == selector) {
            return Ok(i);
        }
        if let Ok(i) = selector.parse::<usize>() {
            if i < self.headers.len() {
                return Ok(i);
            }
            bail!(
                "{}: column index {i} out of range (file has {} columns)",
                self.path,
                self.headers.len()
            );
        }
        bail!(
            "{}: column {selector:?} not found (headers: {})",
            self.path,
            self.headers.join(", ")
        );
    }

    fn cell(&self, row: usize, col: usize) -> Result<&str> {
        self.rows[row].get(col).map(String::as_str).ok_or_else(|| {
            anyhow!(
                "{}: data row {} has no cell in column {:?}",
                self.path,
                row + 1,
                self.headers[col]
            )
        })
    }

    /// Extracts a column as floats, erroring on the first bad cell.
    pub fn f64_column(&self, selector: &str) -> Result<Vec<f64>> {
        let col = self.column_index(selector)?;
        (0..self.rows.len())
            .map(|row| {
                let cell = self.cell(row, col)?;
                cell.parse::<f64>().map_err(|_| {
                    anyhow!(
                        "{}: data row {}, column {:?}: invalid number {cell:?}",
                        self.path,
                        row + 1,
                        self.headers[col]
                    )
                })
            })
            .collect()
    }

    /// Extracts a column as integer state labels.
    pub fn i64_column(&self, selector: &str) -> Result<Vec<i64>> {
        let col = self.column_index(selector)?;
        (0..self.rows.len())
            .map(|row| {
                let cell = self.cell(row, col)?;
                cell.parse::<i64>().map_err(|_| {
                    anyhow!(
                        "{}: data row {}, column {:?}: invalid state label {cell:?}",
                        self.path,
                        row + 1,
                        self.headers[col]
                    )
                })
            })
            .collect()
    }

    /// Extracts a column verbatim (used for timestamps, echoed opaquely).
    pub fn str_column(&self, selector: &str) -> Result<Vec<String>> {
        let col = self.column_index(selector)?;
        (0..self.rows.len())
            .map(|row| self.cell(row, col).map(str::to_owned))
            .collect()
    }
}

/// Formats a float with the shortest digits that parse back bit-exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// Writes a CSV file: header line, then pre-joined rows, `\n` endings.
pub fn write_csv<I>(path: &Path, header: &str, rows: I) -> Result<()>
where
    I: IntoIterator<Item = String>,
{
    let mut text = String::with_capacity(1024);
    text.push_str(header);
    text.push('\n');
    for row in rows {
        text.push_str(&row);
        text.push('\n');
    }
    fs::write(path, text).with_context(|| format!("cannot write output {}", path.display()))
}
