use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Dataset, QuarterIndex, Series};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InvestmentMeasure {
    /// Fixed private investment.
    SW,
    /// Gross private domestic investment plus durable consumption.
    JPT,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformSpec {
    pub investment_measure: InvestmentMeasure,
    /// Divisor taking the policy rate from annual percent to a quarterly decimal.
    pub rate_scale: f64,
    pub sample: Option<(QuarterIndex, QuarterIndex)>,
}

impl Default for TransformSpec {
    fn default() -> Self {
        Self { investment_measure: InvestmentMeasure::SW, rate_scale: 400.0, sample: None }
    }
}

impl TransformSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rate_scale > 0.0 && self.rate_scale.is_finite()) {
            return Err(Error::InvalidParameter(format!("rate_scale must be positive, got {}", self.rate_scale)));
        }
        if let Some((a, b)) = self.sample {
            if b < a {
                return Err(Error::InvalidParameter(format!("sample end {b} precedes start {a}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExternalKind {
    Oil,
    Vxo,
    MpShock,
    MilNews,
}

impl ExternalKind {
    pub fn column(self) -> &'static str {
        match self {
            ExternalKind::Oil => super::columns::OIL,
            ExternalKind::Vxo => super::columns::VXO,
            ExternalKind::MpShock => super::columns::MP_SHOCK,
            ExternalKind::MilNews => super::columns::MIL_NEWS,
        }
    }
}

fn require<'a>(raw: &'a BTreeMap<String, Series>, name: &str) -> Result<&'a Series> {
    raw.get(name).ok_or_else(|| Error::MissingSeries(name.into()))
}

/// Largest quarter range covered by every series.
fn common_span<'a>(series: impl IntoIterator<Item = &'a Series>) -> Result<(QuarterIndex, QuarterIndex)> {
    let mut span: Option<(QuarterIndex, QuarterIndex)> = None;
    let mut names = Vec::new();
    for s in series {
        names.push(format!("{} {}–{}", s.name(), s.start(), s.end()));
        span = Some(match span {
            None => (s.start(), s.end()),
            Some((a, b)) => (a.max(s.start()), b.min(s.end())),
        });
    }
    match span {
        Some((a, b)) if a <= b => Ok((a, b)),
        _ => Err(Error::EmptyIntersection(names.join(", "))),
    }
}

fn log_diff(name: &str, start: QuarterIndex, levels: &[f64]) -> Result<Series> {
    if let Some(i) = levels.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::NonPositive { name: name.into(), at: start.offset(i as i64), value: levels[i] });
    }
    if levels.len() < 2 {
        return Err(Error::InvalidSeries { name: name.into(), message: "need at least two levels to difference".into() });
    }
    let diffs = levels.windows(2).map(|w| (w[1] / w[0]).ln()).collect();
    Series::new(name, start.succ(), diffs)
}

/// Real per-capita investment growth `Δi_t`, as a log difference.
///
/// SW uses `FPI / P_fpi / pop`; JPT uses `(GPDI / P_gpdi + PCDG / P_pcdg) / pop`.
/// Inputs are aligned on their common span.
pub fn build_investment_measure(spec: &TransformSpec, raw: &BTreeMap<String, Series>) -> Result<Series> {
    let names: &[&str] = match spec.investment_measure {
        InvestmentMeasure::SW => &["fpi", "fpi_deflator", "population"],
        InvestmentMeasure::JPT => &["gpdi", "gpdi_deflator", "pcdg", "pcdg_deflator", "population"],
    };
    let inputs = names.iter().map(|n| require(raw, n)).collect::<Result<Vec<_>>>()?;
    let (a, b) = common_span(inputs.iter().copied())?;
    let w: Vec<Series> = inputs.iter().map(|s| s.window(a, b).expect("inside common span")).collect();
    for s in w.iter().filter(|s| s.name().ends_with("deflator") || s.name() == "population") {
        if let Some(i) = s.values().iter().position(|&v| !(v > 0.0)) {
            return Err(Error::NonPositive { name: s.name().into(), at: a.offset(i as i64), value: s.values()[i] });
        }
    }
    let n = w[0].len();
    let level: Vec<f64> = match spec.investment_measure {
        InvestmentMeasure::SW => (0..n).map(|t| w[0].values()[t] / w[1].values()[t] / w[2].values()[t]).collect(),
        InvestmentMeasure::JPT => (0..n)
            .map(|t| {
                let real = w[0].values()[t] / w[1].values()[t] + w[2].values()[t] / w[3].values()[t];
                real / w[4].values()[t]
            })
            .collect(),
    };
    log_diff(super::columns::DELTA_I, a, &level)
}

/// Quarterly inflation `π_t = ln(P_t / P_{t-1})`.
pub fn compute_inflation(deflator: &Series) -> Result<Series> {
    log_diff("inflation", deflator.start(), deflator.values())
}

/// Ex-post real rate `r^p_t = ffr_t / rate_scale − π_{t+1}`.
pub fn compute_real_rate(ffr: &Series, inflation: &Series, rate_scale: f64) -> Result<Series> {
    if !(rate_scale > 0.0) {
        return Err(Error::InvalidParameter(format!("rate_scale must be positive, got {rate_scale}")));
    }
    let first = ffr.start().max(inflation.start().pred());
    let last = ffr.end().min(inflation.end().pred());
    if last < first {
        return Err(Error::EmptyIntersection(format!(
            "ffr {}–{} has no following-quarter inflation in {}–{}",
            ffr.start(),
            ffr.end(),
            inflation.start(),
            inflation.end()
        )));
    }
    let n = last.quarters_since(first) as usize + 1;
    let values = (0..n)
        .map(|i| {
            let q = first.offset(i as i64);
            ffr.get(q).unwrap() / rate_scale - inflation.get(q.succ()).unwrap()
        })
        .collect();
    Series::new(super::columns::R_P, first, values)
}

/// Natural log of a strictly positive level series (capacity utilization).
pub fn log_level(series: &Series, name: &str) -> Result<Series> {
    if let Some(i) = series.values().iter().position(|&v| !(v > 0.0)) {
        return Err(Error::NonPositive {
            name: series.name().into(),
            at: series.start().offset(i as i64),
            value: series.values()[i],
        });
    }
    Series::new(name, series.start(), series.values().iter().map(|v| v.ln()).collect())
}

/// Transformations for the external instruments. Monthly inputs must already be
/// averaged to quarters (the loaders do this).
pub fn transform_external(kind: ExternalKind, raw: &Series) -> Result<Series> {
    let name = kind.column();
    match kind {
        ExternalKind::Oil => log_diff(name, raw.start(), raw.values()),
        ExternalKind::Vxo => {
            let v = raw.values();
            let n = v.len() as f64;
            let mean = v.iter().sum::<f64>() / n;
            let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
            if !(var > 0.0) {
                return Err(Error::ZeroVariance(raw.name().into()));
            }
            let sd = var.sqrt();
            Series::new(name, raw.start(), v.iter().map(|x| (x - mean) / sd).collect())
        }
        ExternalKind::MpShock | ExternalKind::MilNews => Ok(raw.clone().with_name(name)),
    }
}

/// Trim transformed series to their common span (and the configured sample)
/// and collect them into a panel. Column order follows `order`, unknown extra
/// series are appended alphabetically.
pub fn assemble_dataset(spec: &TransformSpec, transformed: &BTreeMap<String, Series>) -> Result<Dataset> {
    spec.validate()?;
    if transformed.is_empty() {
        return Err(Error::EmptySample("no series to assemble".into()));
    }
    let (mut a, mut b) = common_span(transformed.values())?;
    if let Some((sa, sb)) = spec.sample {
        a = a.max(sa);
        b = b.min(sb);
        if b < a {
            return Err(Error::EmptyIntersection(format!("sample {sa}–{sb} outside common span")));
        }
    }
    let order = [
        super::columns::DELTA_I,
        super::columns::R_P,
        super::columns::U,
        super::columns::MP_SHOCK,
        super::columns::MIL_NEWS,
        super::columns::OIL,
        super::columns::VXO,
    ];
    let mut names: Vec<&String> = transformed.keys().collect();
    names.sort_by_key(|n| (order.iter().position(|o| o == n).unwrap_or(order.len()), n.as_str()));
    let cols = names
        .into_iter()
        .map(|n| (n.clone(), transformed[n].window(a, b).expect("inside common span").values().to_vec()))
        .collect();
    Dataset::new(a, cols)
}

/// Raw series names understood by [`build_panel`] and their FRED identifiers.
/// Population is monthly on FRED and is averaged to quarters on download.
pub const RAW_SERIES: [(&str, &str); 10] = [
    ("fpi", "FPI"),
    ("fpi_deflator", "A007RD3Q086SBEA"),
    ("gpdi", "GPDI"),
    ("gpdi_deflator", "A006RD3Q086SBEA"),
    ("pcdg", "PCDG"),
    ("pcdg_deflator", "DDURRD3Q086SBEA"),
    ("population", "CNP16OV"),
    ("gdp_deflator", "GDPDEF"),
    ("ffr", "FEDFUNDS"),
    ("capacity_utilization", "TCU"),
];

/// Raw names needed for a given investment measure.
pub fn required_raw_series(measure: InvestmentMeasure) -> Vec<&'static str> {
    let inv: &[&str] = match measure {
        InvestmentMeasure::SW => &["fpi", "fpi_deflator"],
        InvestmentMeasure::JPT => &["gpdi", "gpdi_deflator", "pcdg", "pcdg_deflator"],
    };
    inv.iter().copied().chain(["population", "gdp_deflator", "ffr", "capacity_utilization"]).collect()
}

/// Full pipeline from raw series to the estimation panel: investment growth,
/// GDP-deflator inflation, the ex-post real rate, log utilization, and any
/// external instruments.
pub fn build_panel(
    spec: &TransformSpec,
    raw: &BTreeMap<String, Series>,
    external: &[(ExternalKind, Series)],
) -> Result<Dataset> {
    spec.validate()?;
    let delta_i = build_investment_measure(spec, raw)?;
    let inflation = compute_inflation(require(raw, "gdp_deflator")?)?;
    let r_p = compute_real_rate(require(raw, "ffr")?, &inflation, spec.rate_scale)?;
    let u = log_level(require(raw, "capacity_utilization")?, super::columns::U)?;
    let mut out = BTreeMap::new();
    for s in [delta_i, r_p, u] {
        out.insert(s.name().to_owned(), s);
    }
    for (kind, series) in external {
        let t = transform_external(*kind, series)?;
        out.insert(t.name().to_owned(), t);
    }
    assemble_dataset(spec, &out)
}


/// Average a monthly series to quarters, keeping only complete quarters.
pub fn monthly_to_quarterly(name: &str, first_year: i32, first_month: u32, values: &[f64]) -> Result<Series> {
    let mut start = None;
    let mut out = Vec::new();
    let mut i = 0usize;
    let mut year = first_year;
    let mut month = first_month;
    // skip to the first month opening a quarter
    while i < values.len() && (month - 1) % 3 != 0 {
        i += 1;
        month += 1;
        if month > 12 {
            month = 1;
            year += 1;
        }
    }
    while i + 3 <= values.len() {
        start.get_or_insert(QuarterIndex::from_month(year, month)?);
        out.push(values[i..i + 3].iter().sum::<f64>() / 3.0);
        i += 3;
        month += 3;
        if month > 12 {
            month -= 12;
            year += 1;
        }
    }
    let start = start.ok_or_else(|| Error::InvalidSeries {
        name: name.into(),
        message: "no complete quarter in monthly data".into(),
    })?;
    Series::new(name, start, out)
}

#[cfg(test)]
mod panel_tests {
    use super::*;

    fn series(name: &str, start: &str, f: impl Fn(usize) -> f64, n: usize) -> (String, Series) {
        (name.to_owned(), Series::new(name, start.parse().unwrap(), (0..n).map(f).collect()).unwrap())
    }

    #[test]
    fn panel_from_raw() {
        let n = 12;
        let raw: BTreeMap<String, Series> = [
            series("fpi", "2000Q1", |t| 100.0 * 1.01f64.powi(t as i32), n),
            series("fpi_deflator", "2000Q1", |_| 1.0, n),
            series("population", "2000Q1", |_| 2.0, n),
            series("gdp_deflator", "2000Q1", |t| 1.005f64.powi(t as i32), n),
            series("ffr", "2000Q1", |_| 4.0, n),
            series("capacity_utilization", "2000Q1", |_| 80.0, n),
        ]
        .into_iter()
        .collect();
        let oil = Series::new("oil", "2000Q1".parse().unwrap(), vec![50.0; n]).unwrap();
        let p = build_panel(&TransformSpec::default(), &raw, &[(ExternalKind::Oil, oil)]).unwrap();
        // Δi and π start one quarter late; r_p loses the last quarter
        assert_eq!(p.start().to_string(), "2000Q2");
        assert_eq!(p.len(), n - 2);
        assert_eq!(p.column_names().collect::<Vec<_>>(), ["delta_i", "r_p", "u", "oil"]);
        let di = p.column("delta_i").unwrap();
        assert!(di.iter().all(|v| (v - 1.01f64.ln()).abs() < 1e-12));
        let rp = p.column("r_p").unwrap();
        assert!(rp.iter().all(|v| (v - (0.01 - 1.005f64.ln())).abs() < 1e-12));
        assert!(p.column("u").unwrap().iter().all(|v| (v - 80f64.ln()).abs() < 1e-12));

        let mut missing = raw.clone();
        missing.remove("ffr");
        assert!(matches!(build_panel(&TransformSpec::default(), &missing, &[]), Err(Error::MissingSeries(_))));
        assert_eq!(required_raw_series(InvestmentMeasure::JPT).len(), 8);
    }
}
