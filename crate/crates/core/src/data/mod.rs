//! Quarterly series, the estimation panel, and the transformations that
//! turn raw macro series into model variables.

mod csv_io;
mod fred;
mod transform;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use csv_io::{load_monthly_csv, load_panel_csv, load_series_csv, write_panel_csv, write_series_csv};
pub use fred::{fetch_fred_series, FredClient, FRED_API_KEY_ENV, FRED_BASE_URL};
pub use transform::{
    assemble_dataset, build_investment_measure, build_panel, compute_inflation, compute_real_rate,
    log_level, monthly_to_quarterly, required_raw_series, transform_external, ExternalKind,
    InvestmentMeasure, TransformSpec, RAW_SERIES,
};

/// Calendar quarter, ordered by time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct QuarterIndex {
    year: i32,
    quarter: u8,
}

impl QuarterIndex {
    pub fn new(year: i32, quarter: u8) -> Result<Self> {
        if !(1..=4).contains(&quarter) {
            return Err(Error::InvalidParameter(format!("quarter {quarter} outside 1..4")));
        }
        Ok(Self { year, quarter })
    }

    pub fn year(self) -> i32 {
        self.year
    }

    pub fn quarter(self) -> u8 {
        self.quarter
    }

    /// Quarters since year 0 Q1; used for offset arithmetic.
    fn ordinal(self) -> i64 {
        self.year as i64 * 4 + (self.quarter as i64 - 1)
    }

    fn from_ordinal(ord: i64) -> Self {
        Self { year: ord.div_euclid(4) as i32, quarter: (ord.rem_euclid(4) + 1) as u8 }
    }

    pub fn succ(self) -> Self {
        self.offset(1)
    }

    pub fn pred(self) -> Self {
        self.offset(-1)
    }

    pub fn offset(self, quarters: i64) -> Self {
        Self::from_ordinal(self.ordinal() + quarters)
    }

    /// Number of quarters from `other` to `self` (negative if `self` is earlier).
    pub fn quarters_since(self, other: QuarterIndex) -> i64 {
        self.ordinal() - other.ordinal()
    }

    /// Quarter containing a calendar month (1..=12).
    pub fn from_month(year: i32, month: u32) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::InvalidParameter(format!("month {month} outside 1..12")));
        }
        Self::new(year, ((month - 1) / 3 + 1) as u8)
    }
}

impl fmt::Display for QuarterIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}Q{}", self.year, self.quarter)
    }
}

impl FromStr for QuarterIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("malformed quarter `{s}` (expected YYYYQn)"));
        let s = s.trim();
        let (y, q) = s.split_once(['Q', 'q']).ok_or_else(bad)?;
        if y.len() != 4 || q.len() != 1 {
            return Err(bad());
        }
        let year: i32 = y.parse().map_err(|_| bad())?;
        let quarter: u8 = q.parse().map_err(|_| bad())?;
        Self::new(year, quarter).map_err(|_| bad())
    }
}

impl TryFrom<String> for QuarterIndex {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<QuarterIndex> for String {
    fn from(q: QuarterIndex) -> String {
        q.to_string()
    }
}

/// A contiguous quarterly series with finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    name: String,
    start: QuarterIndex,
    values: Vec<f64>,
}

impl Series {
    pub fn new(name: impl Into<String>, start: QuarterIndex, values: Vec<f64>) -> Result<Self> {
        let name = name.into();
        if values.is_empty() {
            return Err(Error::InvalidSeries { name, message: "empty series".into() });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSeries {
                name,
                message: format!("non-finite value at {}", start.offset(i as i64)),
            });
        }
        Ok(Self { name, start, values })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn start(&self) -> QuarterIndex {
        self.start
    }

    /// Last quarter covered (inclusive).
    pub fn end(&self) -> QuarterIndex {
        self.start.offset(self.values.len() as i64 - 1)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn get(&self, q: QuarterIndex) -> Option<f64> {
        let i = q.quarters_since(self.start);
        (i >= 0).then(|| self.values.get(i as usize).copied()).flatten()
    }

    /// Restrict to `[from, to]`; `None` if the window does not lie within the series.
    pub fn window(&self, from: QuarterIndex, to: QuarterIndex) -> Option<Series> {
        let a = from.quarters_since(self.start);
        let b = to.quarters_since(self.start);
        if a < 0 || b < a || b as usize >= self.values.len() {
            return None;
        }
        Some(Series {
            name: self.name.clone(),
            start: from,
            values: self.values[a as usize..=b as usize].to_vec(),
        })
    }
}

/// Aligned estimation panel: equal-length named columns on a common start.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    start: QuarterIndex,
    len: usize,
    columns: Vec<(String, Vec<f64>)>,
}

/// Conventional column names of the panel.
pub mod columns {
    pub const DELTA_I: &str = "delta_i";
    pub const R_P: &str = "r_p";
    pub const U: &str = "u";
    pub const MP_SHOCK: &str = "mp_shock";
    pub const MIL_NEWS: &str = "mil_news";
    pub const OIL: &str = "oil";
    pub const VXO: &str = "vxo";
}

impl Dataset {
    pub fn new(start: QuarterIndex, columns: Vec<(String, Vec<f64>)>) -> Result<Self> {
        let len = columns.first().map(|c| c.1.len()).unwrap_or(0);
        if len == 0 {
            return Err(Error::EmptySample("dataset has no observations".into()));
        }
        for (i, (name, col)) in columns.iter().enumerate() {
            if col.len() != len {
                return Err(Error::Dimension(format!(
                    "column `{name}` has {} rows, expected {len}",
                    col.len()
                )));
            }
            if columns[..i].iter().any(|(n, _)| n == name) {
                return Err(Error::InvalidParameter(format!("duplicate column `{name}`")));
            }
            if let Some(j) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidSeries {
                    name: name.clone(),
                    message: format!("non-finite value at {}", start.offset(j as i64)),
                });
            }
        }
        Ok(Self { start, len, columns })
    }

    pub fn start(&self) -> QuarterIndex {
        self.start
    }

    pub fn end(&self) -> QuarterIndex {
        self.start.offset(self.len as i64 - 1)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|(n, _)| n == name).map(|(_, c)| c.as_slice())
    }

    pub fn column_names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|(n, _)| n.as_str())
    }

    pub fn series(&self, name: &str) -> Option<Series> {
        self.column(name).map(|c| Series { name: name.into(), start: self.start, values: c.to_vec() })
    }

    /// Quarters usable as estimation dates once `max_lead` leads and
    /// `max_lag` lags must exist inside the panel.
    pub fn estimation_window(&self, max_lead: usize, max_lag: usize) -> Option<(QuarterIndex, QuarterIndex)> {
        if self.len <= max_lead + max_lag {
            return None;
        }
        Some((self.start.offset(max_lag as i64), self.end().offset(-(max_lead as i64))))
    }

    /// Restrict every column to `[from, to]`.
    pub fn window(&self, from: QuarterIndex, to: QuarterIndex) -> Result<Dataset> {
        let a = from.quarters_since(self.start);
        let b = to.quarters_since(self.start);
        if a < 0 || b < a || b as usize >= self.len {
            return Err(Error::EmptyIntersection(format!(
                "window {from}–{to} outside panel {}–{}",
                self.start,
                self.end()
            )));
        }
        let cols = self
            .columns
            .iter()
            .map(|(n, c)| (n.clone(), c[a as usize..=b as usize].to_vec()))
            .collect();
        Dataset::new(from, cols)
    }
}
