//! Subcommand implementations. Each writes its outputs under an output
//! directory and embeds the effective configuration in them.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::confidence::{
    export_grid, import_grid, invert_test, set_summary, ConfidenceGrid, Evaluator, GridMetadata, GridSpec,
    SetSummary, SystemEvaluator,
};
use crate::data::{
    build_panel, load_monthly_csv, load_panel_csv, load_series_csv, required_raw_series, write_panel_csv, Dataset,
    ExternalKind, FredClient, Series, FRED_API_KEY_ENV, FRED_BASE_URL, RAW_SERIES,
};
use crate::error::{Error, Result};
use crate::inference::{evaluate, TestResult};
use crate::misspec::{run_lab, MisspecReport};
use crate::model::{build_design, write_design_csv, ModelKind, MomentSystem};

pub const PANEL_FILE: &str = "panel.csv";
pub const TEST_RESULT_FILE: &str = "test_result.json";
pub const GRID_STEM: &str = "grid";
pub const MISSPEC_FILE: &str = "misspec_report.json";
pub const REPORT_FILE: &str = "report.txt";
pub const DESIGN_FILE: &str = "design.csv";

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

/// Quarterly `YYYYQn` files are read as is; `YYYY-MM[-DD]` files are averaged
/// to quarters.
fn load_any_series(path: &Path) -> Result<Series> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let monthly = text.lines().nth(1).map(|l| l.split(',').next().unwrap_or("").contains('-')).unwrap_or(false);
    if monthly {
        load_monthly_csv(path)
    } else {
        load_series_csv(path)
    }
}

fn fred_client(cfg: &RunConfig) -> Result<FredClient> {
    let key = std::env::var(FRED_API_KEY_ENV).unwrap_or_default();
    FredClient::with_base_url(cfg.data.fred_url.as_deref().unwrap_or(FRED_BASE_URL), key)
}

/// Raw inputs by name: explicit path, then `raw_dir/<name>.csv`, then FRED
/// when enabled.
fn load_raw(cfg: &RunConfig) -> Result<BTreeMap<String, Series>> {
    let mut client = None;
    let mut raw = BTreeMap::new();
    for name in required_raw_series(cfg.data.investment_measure) {
        let local = cfg
            .data
            .series
            .get(name)
            .cloned()
            .or_else(|| cfg.data.raw_dir.as_ref().map(|d| d.join(format!("{name}.csv"))).filter(|p| p.is_file()));
        let series = match local {
            Some(p) => load_any_series(&p)?,
            None if cfg.data.fred => {
                if client.is_none() {
                    client = Some(fred_client(cfg)?);
                }
                let id = RAW_SERIES.iter().find(|(n, _)| *n == name).map(|(_, id)| *id).expect("known raw name");
                client.as_ref().expect("set above").fetch(id)?
            }
            None => {
                return Err(Error::MissingSeries(format!(
                    "{name} (no data.series entry, no {name}.csv in data.raw_dir, and data.fred is off)"
                )))
            }
        };
        raw.insert(name.to_owned(), series.with_name(name));
    }
    Ok(raw)
}

fn load_external(cfg: &RunConfig) -> Result<Vec<(ExternalKind, Series)>> {
    cfg.data.external_kinds()?.into_iter().map(|(k, p)| Ok((k, load_any_series(&p)?))).collect()
}

/// The estimation panel: the configured panel file restricted to the sample,
/// or the panel built from raw inputs.
pub fn load_dataset(cfg: &RunConfig) -> Result<Dataset> {
    if let Some(p) = &cfg.data.panel {
        let data = load_panel_csv(p)?;
        return match cfg.data.sample {
            Some([a, b]) => data.window(a.max(data.start()), b.min(data.end())),
            None => Ok(data),
        };
    }
    build_panel(&cfg.data.transform_spec(), &load_raw(cfg)?, &load_external(cfg)?)
}

pub fn build_system(cfg: &RunConfig) -> Result<MomentSystem> {
    let data = load_dataset(cfg)?;
    build_design(&data, &cfg.model()?, &cfg.instruments()?)
}

fn sample_span(sys: &MomentSystem) -> (Option<String>, Option<String>) {
    match sys.first_date {
        Some(d) => (Some(d.to_string()), Some(d.offset(sys.t() as i64 - 1).to_string())),
        None => (None, None),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PanelSidecar {
    csv: String,
    start: String,
    end: String,
    observations: usize,
    columns: Vec<String>,
    config: serde_json::Value,
}

/// `transform`: writes `panel.csv` and a `panel.json` sidecar.
pub fn run_transform(cfg: &RunConfig, out: &Path) -> Result<PathBuf> {
    ensure_dir(out)?;
    let data = load_dataset(cfg)?;
    let path = out.join(PANEL_FILE);
    write_panel_csv(&data, &path)?;
    write_json(
        &path.with_extension("json"),
        &PanelSidecar {
            csv: PANEL_FILE.into(),
            start: data.start().to_string(),
            end: data.end().to_string(),
            observations: data.len(),
            columns: data.column_names().map(str::to_owned).collect(),
            config: cfg.to_json(),
        },
    )?;
    Ok(path)
}

/// Contents of `test_result.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub model: ModelKind,
    pub param_names: Vec<String>,
    pub theta: Vec<f64>,
    pub result: TestResult,
    pub sample_start: Option<String>,
    pub sample_end: Option<String>,
    pub observations: usize,
    pub instruments: Vec<String>,
    pub config: serde_json::Value,
}

/// `estimate`: one test at `estimate.theta`.
pub fn run_estimate(cfg: &RunConfig, out: &Path, dump_design: bool) -> Result<EstimateReport> {
    let theta = cfg
        .estimate
        .theta
        .clone()
        .ok_or_else(|| Error::InvalidParameter("estimate needs `theta` in the [estimate] section".into()))?;
    let sys = build_system(cfg)?;
    ensure_dir(out)?;
    if dump_design {
        write_design_csv(&sys, out.join(DESIGN_FILE))?;
    }
    let result = evaluate(&theta, &sys, &cfg.test_config())?;
    let (sample_start, sample_end) = sample_span(&sys);
    let report = EstimateReport {
        model: sys.model.kind,
        param_names: sys.model.param_names().iter().map(|s| s.to_string()).collect(),
        theta,
        result,
        sample_start,
        sample_end,
        observations: sys.t(),
        instruments: sys.instrument_labels.clone(),
        config: cfg.to_json(),
    };
    write_json(&out.join(TEST_RESULT_FILE), &report)?;
    Ok(report)
}

/// Inverts an arbitrary evaluator over `spec`, attaches `metadata` plus the
/// effective config and exports `grid.csv` / `grid.json`.
pub fn run_grid_with<E: Evaluator + ?Sized>(
    evaluator: &E,
    spec: &GridSpec,
    cfg: &RunConfig,
    metadata: GridMetadata,
    out: &Path,
) -> Result<ConfidenceGrid> {
    let mut g = invert_test(evaluator, spec, cfg.inference.level)?;
    let bandwidth = g.metadata.bandwidth;
    g.metadata = GridMetadata { bandwidth: metadata.bandwidth.or(bandwidth), config: cfg.to_json(), ..metadata };
    export_grid(&g, out.join(GRID_STEM))?;
    Ok(g)
}

/// `grid`: inverts the configured test on the configured grid.
pub fn run_grid(cfg: &RunConfig, out: &Path, dump_design: bool) -> Result<ConfidenceGrid> {
    let sys = build_system(cfg)?;
    let spec = cfg.grid_spec()?;
    ensure_dir(out)?;
    if dump_design {
        write_design_csv(&sys, out.join(DESIGN_FILE))?;
    }
    let (sample_start, sample_end) = sample_span(&sys);
    let fixed = match sys.model.kind {
        ModelKind::SEMI => vec![("rho".to_owned(), sys.model.semi_rho)],
        _ => Vec::new(),
    };
    let metadata = GridMetadata {
        model: Some(format!("{:?}", sys.model.kind)),
        fixed,
        sample_start,
        sample_end,
        observations: Some(sys.t()),
        instruments: sys.instrument_labels.clone(),
        bandwidth: None,
        config: serde_json::Value::Null,
    };
    let evaluator = SystemEvaluator { sys, cfg: cfg.test_config() };
    run_grid_with(&evaluator, &spec, cfg, metadata, out)
}

#[derive(Debug, Clone, Serialize)]
struct MisspecOutput<'a> {
    report: &'a MisspecReport,
    config: serde_json::Value,
}

/// `misspec`: runs the lab and writes `misspec_report.json`.
pub fn run_misspec(cfg: &RunConfig, out: &Path) -> Result<MisspecReport> {
    let report = run_lab(&cfg.misspec)?;
    ensure_dir(out)?;
    write_json(&out.join(MISSPEC_FILE), &MisspecOutput { report: &report, config: cfg.to_json() })?;
    Ok(report)
}

fn fmt_num(x: f64) -> String {
    format!("{x:.6}").trim_end_matches('0').trim_end_matches('.').to_owned()
}

/// Human-readable summary of a grid.
pub fn render_report(g: &ConfidenceGrid, s: &SetSummary, cfg: &RunConfig) -> String {
    let mut r = String::new();
    let m = &g.metadata;
    let _ = writeln!(r, "Confidence set: {} at level {}", s.variant, fmt_num(s.level));
    if let Some(model) = &m.model {
        let _ = writeln!(r, "Model: {model}");
    }
    for (name, v) in &m.fixed {
        let _ = writeln!(r, "Fixed: {name} = {}", fmt_num(*v));
    }
    if let (Some(a), Some(b)) = (&m.sample_start, &m.sample_end) {
        let _ = writeln!(r, "Sample: {a}–{b} ({} observations)", m.observations.unwrap_or(0));
    }
    if !m.instruments.is_empty() {
        let _ = writeln!(r, "Instruments: {}", m.instruments.join(", "));
    }
    if let Some(b) = m.bandwidth {
        let _ = writeln!(r, "HAC bandwidth: {b}");
    }
    let _ = writeln!(
        r,
        "Accepted: {} of {} lattice points ({:.1}%), {} evaluation errors",
        s.accepted,
        s.total,
        100.0 * s.accepted_fraction,
        s.errors
    );
    let _ = writeln!(r, "Projections:");
    for p in &s.projections {
        let range = match (p.min, p.max) {
            (Some(a), Some(b)) => format!("[{}, {}]", fmt_num(a), fmt_num(b)),
            _ => "empty".to_owned(),
        };
        let _ = writeln!(r, "  {:<8} {range} of axis [{}, {}]", p.name, fmt_num(p.axis_min), fmt_num(p.axis_max));
    }
    if !s.extra_points.is_empty() {
        let accepted = s.extra_points.iter().filter(|(_, a)| *a).count();
        let _ = writeln!(r, "Extra points: {accepted} of {} accepted", s.extra_points.len());
        for (p, a) in &s.extra_points {
            let coords: Vec<String> = p.iter().map(|x| fmt_num(*x)).collect();
            let _ = writeln!(r, "  ({}) {}", coords.join(", "), if *a { "accepted" } else { "rejected" });
        }
    }
    let _ = writeln!(r, "\nSettings:\n{}", cfg.to_toml());
    r
}

/// `report`: summarizes `grid.csv` in the output directory, computing the
/// grid first if it does not exist, and writes `report.txt`.
pub fn run_report(cfg: &RunConfig, out: &Path) -> Result<String> {
    let csv = out.join(GRID_STEM).with_extension("csv");
    let g = if csv.is_file() { import_grid(&csv)? } else { run_grid(cfg, out, false)? };
    let text = render_report(&g, &set_summary(&g), cfg);
    let path = out.join(REPORT_FILE);
    std::fs::write(&path, &text).map_err(|e| Error::io(&path, e))?;
    Ok(text)
}
