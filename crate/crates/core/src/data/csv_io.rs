use std::fs::File;
use std::io::Write;
use std::path::Path;

use super::{Dataset, QuarterIndex, Series};
use crate::error::{Error, Result};

fn open_reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(file))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    Error::BadFile { path: path.into(), message: e.to_string() }
}

/// Parses the date column of data row `row` (1-based, header excluded) and
/// checks it continues the quarter sequence.
fn next_quarter(
    path: &Path,
    row: usize,
    text: &str,
    prev: Option<QuarterIndex>,
) -> Result<QuarterIndex> {
    let q: QuarterIndex = text
        .parse()
        .map_err(|_| Error::MalformedDate { path: path.into(), row, text: text.into() })?;
    if let Some(p) = prev {
        if q <= p {
            return Err(Error::QuarterOrder { path: path.into(), row, found: q });
        }
        if q != p.succ() {
            return Err(Error::QuarterGap { path: path.into(), row, expected: p.succ() });
        }
    }
    Ok(q)
}

fn parse_value(path: &Path, row: usize, text: &str) -> Result<f64> {
    text.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::NonNumeric { path: path.into(), row, text: text.into() })
}

/// Reads a `date,value` quarterly CSV. Row numbers in errors count data rows
/// from 1 (the header is not counted).
pub fn load_series_csv(path: impl AsRef<Path>) -> Result<Series> {
    let path = path.as_ref();
    let mut rdr = open_reader(path)?;
    let headers = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    if headers.len() != 2 || &headers[0] != "date" || &headers[1] != "value" {
        return Err(Error::BadFile {
            path: path.into(),
            message: format!("expected header `date,value`, found `{}`", headers.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut start = None;
    let mut prev = None;
    let mut values = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let q = next_quarter(path, row, rec.get(0).unwrap_or(""), prev)?;
        values.push(parse_value(path, row, rec.get(1).unwrap_or(""))?);
        start.get_or_insert(q);
        prev = Some(q);
    }
    let start = start.ok_or_else(|| Error::BadFile { path: path.into(), message: "no data rows".into() })?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("series");
    Series::new(name, start, values)
}

/// Reads a monthly `date,value` CSV (dates `YYYY-MM` or `YYYY-MM-DD`) and
/// averages it to complete quarters.
pub fn load_monthly_csv(path: impl AsRef<Path>) -> Result<Series> {
    let path = path.as_ref();
    let mut rdr = open_reader(path)?;
    let mut first = None;
    let mut prev: Option<i64> = None;
    let mut values = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let text = rec.get(0).unwrap_or("");
        let bad = || Error::MalformedDate { path: path.into(), row, text: text.into() };
        let mut parts = text.split('-');
        let y: i32 = parts.next().and_then(|p| p.parse().ok()).ok_or_else(bad)?;
        let m: u32 = parts.next().and_then(|p| p.parse().ok()).filter(|m| (1..=12).contains(m)).ok_or_else(bad)?;
        let ord = y as i64 * 12 + m as i64 - 1;
        if let Some(p) = prev {
            if ord != p + 1 {
                return Err(Error::BadFile { path: path.into(), message: format!("row {row}: months not contiguous") });
            }
        }
        prev = Some(ord);
        first.get_or_insert((y, m));
        values.push(parse_value(path, row, rec.get(1).unwrap_or(""))?);
    }
    let (y, m) = first.ok_or_else(|| Error::BadFile { path: path.into(), message: "no data rows".into() })?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("series");
    super::monthly_to_quarterly(name, y, m, &values)
}

pub fn write_series_csv(series: &Series, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::from("date,value\n");
    for (i, v) in series.values().iter().enumerate() {
        out.push_str(&format!("{},{}\n", series.start().offset(i as i64), v));
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Reads a panel CSV with header `date,<col>,...`.
pub fn load_panel_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let mut rdr = open_reader(path)?;
    let headers = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    if headers.len() < 2 || &headers[0] != "date" {
        return Err(Error::BadFile { path: path.into(), message: "expected header `date,<col>,...`".into() });
    }
    let names: Vec<String> = headers.iter().skip(1).map(str::to_owned).collect();
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    let mut start = None;
    let mut prev = None;
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| csv_error(path, e))?;
        if rec.len() != headers.len() {
            return Err(Error::BadFile {
                path: path.into(),
                message: format!("row {row} has {} fields, expected {}", rec.len(), headers.len()),
            });
        }
        let q = next_quarter(path, row, &rec[0], prev)?;
        for (c, col) in cols.iter_mut().enumerate() {
            col.push(parse_value(path, row, &rec[c + 1])?);
        }
        start.get_or_insert(q);
        prev = Some(q);
    }
    let start = start.ok_or_else(|| Error::BadFile { path: path.into(), message: "no data rows".into() })?;
    Dataset::new(start, names.into_iter().zip(cols).collect())
}

/// Writes the panel with shortest round-trip float formatting, so that
/// re-reading reproduces every value bit for bit.
pub fn write_panel_csv(data: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = String::from("date");
    for n in data.column_names() {
        out.push(',');
        out.push_str(n);
    }
    out.push('\n');
    for t in 0..data.len() {
        out.push_str(&data.start().offset(t as i64).to_string());
        for (_, col) in &data.columns {
            out.push_str(&format!(",{}", col[t]));
        }
        out.push('\n');
    }
    file.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}
