//! CSV ingestion: header row required, two named columns, pairwise NA drop.

use std::io::Read;
use std::path::Path;

use gcor_core::{BivariateSample, NaPolicy};

use crate::error::{CliError, CliResult};

/// Cell spellings read as missing.
const NA_TOKENS: [&str; 6] = ["", "NA", "N/A", "NaN", "nan", "null"];

/// Which two columns to read; `None` picks the first resp. second column.
#[derive(Debug, Clone, Default)]
pub struct Columns {
    pub x: Option<String>,
    pub y: Option<String>,
}

pub fn read_sample(path: &Path, columns: &Columns) -> CliResult<BivariateSample> {
    let mut text = String::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    parse_sample(&text, columns)
}

fn column_index(headers: &csv::StringRecord, name: Option<&str>, fallback: usize) -> CliResult<usize> {
    match name {
        Some(name) => {
            headers.iter().position(|h| h.trim() == name).ok_or_else(|| CliError::Parse(format!("column `{name}` not found in header")))
        }
        None if fallback < headers.len() => Ok(fallback),
        None => Err(CliError::Parse(format!("header has {} column(s); select columns with --x and --y", headers.len()))),
    }
}

fn parse_cell(cell: &str, line: u64, column: &str) -> CliResult<f64> {
    let cell = cell.trim();
    if NA_TOKENS.contains(&cell) {
        return Ok(f64::NAN);
    }
    let value: f64 = cell.parse().map_err(|_| CliError::Parse(format!("line {line}, column `{column}`: `{cell}` is not a number")))?;
    Ok(if value.is_finite() { value } else { f64::NAN })
}

/// Parses CSV text into a sample, dropping pairs with a missing coordinate.
pub fn parse_sample(text: &str, columns: &Columns) -> CliResult<BivariateSample> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| CliError::Parse(e.to_string()))?.clone();
    if headers.is_empty() {
        return Err(CliError::Parse("missing header row".into()));
    }
    let ix = column_index(&headers, columns.x.as_deref(), 0)?;
    let iy = column_index(&headers, columns.y.as_deref(), 1)?;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Parse(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        xs.push(parse_cell(record.get(ix).unwrap_or(""), line, &headers[ix])?);
        ys.push(parse_cell(record.get(iy).unwrap_or(""), line, &headers[iy])?);
    }
    Ok(BivariateSample::with_policy(&xs, &ys, NaPolicy::DropPairwise)?)
}
