use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::summary::{set_summary, SetSummary};
use super::{ConfidenceGrid, GridMetadata, GridPoint, GridSpec};
use crate::error::{Error, Result};

const FORMAT: &str = "euler-gmm-grid/1";

/// Six significant digits, shortest round-trip rendering.
fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return "NaN".into();
    }
    let r: f64 = format!("{x:.5e}").parse().expect("formatted float parses");
    format!("{r:?}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Sidecar {
    format: String,
    csv: String,
    param_names: Vec<String>,
    level: f64,
    variant: String,
    n_lattice: usize,
    n_points: usize,
    spec: GridSpec,
    metadata: GridMetadata,
    errors: Vec<(usize, String)>,
    summary: SetSummary,
}

/// One CSV row as read back.
#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    /// Fixed columns followed by the grid coordinates.
    pub values: Vec<f64>,
    pub statistic: f64,
    pub df: usize,
    pub critical_value: f64,
    pub accept: bool,
    pub error: bool,
}

/// Writes `<stem>.csv` and the `<stem>.json` sidecar; returns both paths.
///
/// CSV columns: fixed parameters, grid parameters, `stat,df,crit,accept,error`.
pub fn export_grid(g: &ConfidenceGrid, stem: impl AsRef<Path>) -> Result<(PathBuf, PathBuf)> {
    let stem = stem.as_ref();
    let csv_path = stem.with_extension("csv");
    let json_path = stem.with_extension("json");
    if let Some(dir) = csv_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }

    let f = File::create(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
    let mut w = BufWriter::new(f);
    let mut header: Vec<String> = g.metadata.fixed.iter().map(|(n, _)| n.clone()).collect();
    header.extend(g.param_names.iter().cloned());
    header.extend(["stat", "df", "crit", "accept", "error"].map(String::from));
    let werr = |e| Error::io(&csv_path, e);
    writeln!(w, "{}", header.join(",")).map_err(werr)?;
    for p in &g.points {
        let mut cols: Vec<String> = g.metadata.fixed.iter().map(|(_, v)| sig6(*v)).collect();
        cols.extend(p.coords.iter().map(|&c| sig6(c)));
        cols.push(sig6(p.statistic));
        cols.push(p.df.to_string());
        cols.push(sig6(p.critical_value));
        cols.push((p.accept as u8).to_string());
        cols.push((p.error.is_some() as u8).to_string());
        writeln!(w, "{}", cols.join(",")).map_err(werr)?;
    }
    w.flush().map_err(werr)?;

    let sidecar = Sidecar {
        format: FORMAT.into(),
        csv: csv_path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
        param_names: g.param_names.clone(),
        level: g.level,
        variant: g.variant.clone(),
        n_lattice: g.n_lattice,
        n_points: g.points.len(),
        spec: g.spec.clone(),
        metadata: g.metadata.clone(),
        errors: g.points.iter().enumerate().filter_map(|(i, p)| p.error.clone().map(|e| (i, e))).collect(),
        summary: set_summary(g),
    };
    let mut text = serde_json::to_string_pretty(&sidecar)?;
    text.push('\n');
    std::fs::write(&json_path, text).map_err(|e| Error::io(&json_path, e))?;
    Ok((csv_path, json_path))
}

/// Reads an exported CSV: header and rows.
pub fn read_grid_csv(path: impl AsRef<Path>) -> Result<(Vec<String>, Vec<GridRow>)> {
    let path = path.as_ref();
    let bad = |message: String| Error::BadFile { path: path.to_path_buf(), message };
    let mut rdr = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let header: Vec<String> = rdr.headers().map_err(|e| bad(e.to_string()))?.iter().map(str::to_owned).collect();
    let tail = ["stat", "df", "crit", "accept", "error"];
    if header.len() < tail.len() + 1 || header[header.len() - tail.len()..] != tail {
        return Err(bad(format!("unexpected header {header:?}")));
    }
    let nv = header.len() - tail.len();
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let num = |j: usize| -> Result<f64> {
            rec[j].parse::<f64>().map_err(|_| bad(format!("row {}: `{}` is not a number", i + 1, &rec[j])))
        };
        let flag = |j: usize| -> Result<bool> {
            match &rec[j] {
                "0" => Ok(false),
                "1" => Ok(true),
                s => Err(bad(format!("row {}: flag `{s}` is not 0/1", i + 1))),
            }
        };
        rows.push(GridRow {
            values: (0..nv).map(num).collect::<Result<_>>()?,
            statistic: num(nv)?,
            df: rec[nv + 1].parse().map_err(|_| bad(format!("row {}: bad df", i + 1)))?,
            critical_value: num(nv + 2)?,
            accept: flag(nv + 3)?,
            error: flag(nv + 4)?,
        });
    }
    Ok((header, rows))
}

/// Rebuilds a grid from an export (values at the exported precision).
pub fn import_grid(csv_path: impl AsRef<Path>) -> Result<ConfidenceGrid> {
    let csv_path = csv_path.as_ref();
    let json_path = csv_path.with_extension("json");
    let text = std::fs::read_to_string(&json_path).map_err(|e| Error::io(&json_path, e))?;
    let side: Sidecar = serde_json::from_str(&text)?;
    let (_, rows) = read_grid_csv(csv_path)?;
    if rows.len() != side.n_points {
        return Err(Error::BadFile {
            path: csv_path.to_path_buf(),
            message: format!("{} rows but the sidecar lists {}", rows.len(), side.n_points),
        });
    }
    let nf = side.metadata.fixed.len();
    let mut errors = side.errors.into_iter().peekable();
    let points = rows
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            let error = match errors.peek() {
                Some((j, _)) if *j == i => errors.next().map(|e| e.1),
                _ => None,
            };
            GridPoint {
                coords: r.values[nf..].to_vec(),
                statistic: r.statistic,
                df: r.df,
                critical_value: r.critical_value,
                accept: r.accept,
                error: error.or_else(|| r.error.then(|| "evaluation failed".to_owned())),
            }
        })
        .collect();
    Ok(ConfidenceGrid {
        param_names: side.param_names,
        spec: side.spec,
        level: side.level,
        variant: side.variant,
        points,
        n_lattice: side.n_lattice,
        metadata: side.metadata,
    })
}
