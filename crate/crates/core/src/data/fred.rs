//! Minimal client for the FRED observations endpoint.

use serde::Deserialize;

use super::transform::monthly_to_quarterly;
use super::{QuarterIndex, Series};
use crate::error::{Error, Result};

pub const FRED_BASE_URL: &str = "https://api.stlouisfed.org";
pub const FRED_API_KEY_ENV: &str = "FRED_API_KEY";

#[derive(Debug, Clone)]
pub struct FredClient {
    base_url: String,
    api_key: String,
}

#[derive(Deserialize)]
struct Observations {
    observations: Vec<Observation>,
}

#[derive(Deserialize)]
struct Observation {
    date: String,
    value: String,
}

#[derive(Deserialize)]
struct FredErrorBody {
    error_message: Option<String>,
}

impl FredClient {
    pub fn new(api_key: impl Into<String>) -> Result<Self> {
        Self::with_base_url(FRED_BASE_URL, api_key)
    }

    /// Client against a different host, e.g. a local mock.
    pub fn with_base_url(base_url: impl Into<String>, api_key: impl Into<String>) -> Result<Self> {
        let api_key = api_key.into();
        if api_key.trim().is_empty() {
            return Err(Error::MissingApiKey);
        }
        Ok(Self { base_url: base_url.into().trim_end_matches('/').to_owned(), api_key })
    }

    /// Reads the key from `FRED_API_KEY`.
    pub fn from_env() -> Result<Self> {
        Self::new(std::env::var(FRED_API_KEY_ENV).unwrap_or_default())
    }

    /// Fetches a series and returns it at quarterly frequency. Monthly series
    /// are averaged over complete quarters.
    pub fn fetch(&self, series_id: &str) -> Result<Series> {
        let url = format!("{}/fred/series/observations", self.base_url);
        let resp = ureq::get(&url)
            .query("series_id", series_id)
            .query("api_key", &self.api_key)
            .query("file_type", "json")
            .call();
        let body = match resp {
            Ok(r) => r.into_string().map_err(|e| Error::Transport { series: series_id.into(), message: e.to_string() })?,
            Err(ureq::Error::Status(status, r)) => {
                let text = r.into_string().unwrap_or_default();
                let message = serde_json::from_str::<FredErrorBody>(&text)
                    .ok()
                    .and_then(|b| b.error_message)
                    .unwrap_or(text);
                return Err(Error::Http { series: series_id.into(), status, message });
            }
            Err(e) => return Err(Error::Transport { series: series_id.into(), message: e.to_string() }),
        };
        let obs: Observations = serde_json::from_str(&body)?;
        observations_to_series(series_id, &obs.observations)
    }
}

/// Shorthand for `FredClient::new(api_key)?.fetch(series_id)`.
pub fn fetch_fred_series(series_id: &str, api_key: &str) -> Result<Series> {
    FredClient::new(api_key)?.fetch(series_id)
}

fn parse_date(series: &str, text: &str) -> Result<(i32, u32)> {
    let mut it = text.split('-');
    let y = it.next().and_then(|y| y.parse().ok());
    let m = it.next().and_then(|m| m.parse().ok());
    match (y, m) {
        (Some(y), Some(m)) if (1..=12).contains(&m) => Ok((y, m)),
        _ => Err(Error::InvalidSeries { name: series.into(), message: format!("bad observation date `{text}`") }),
    }
}

fn observations_to_series(series: &str, obs: &[Observation]) -> Result<Series> {
    if obs.is_empty() {
        return Err(Error::InvalidSeries { name: series.into(), message: "no observations".into() });
    }
    let mut months = Vec::with_capacity(obs.len());
    let mut values = Vec::with_capacity(obs.len());
    for o in obs {
        let (y, m) = parse_date(series, &o.date)?;
        let v: f64 = o.value.trim().parse().map_err(|_| Error::InvalidSeries {
            name: series.into(),
            message: format!("missing or non-numeric value `{}` at {}", o.value, o.date),
        })?;
        months.push(y as i64 * 12 + m as i64 - 1);
        values.push(v);
    }
    let step = if months.len() > 1 { months[1] - months[0] } else { 3 };
    if months.windows(2).any(|w| w[1] - w[0] != step) || !(step == 1 || step == 3) {
        return Err(Error::InvalidSeries {
            name: series.into(),
            message: "observations are neither contiguous monthly nor contiguous quarterly".into(),
        });
    }
    let (y0, m0) = parse_date(series, &obs[0].date)?;
    if step == 1 {
        monthly_to_quarterly(series, y0, m0, &values)
    } else {
        Series::new(series, QuarterIndex::from_month(y0, m0)?, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obs(items: &[(&str, &str)]) -> Vec<Observation> {
        items.iter().map(|(d, v)| Observation { date: d.to_string(), value: v.to_string() }).collect()
    }

    #[test]
    fn monthly_observations_are_averaged() {
        let o = obs(&[
            ("1967-01-01", "1"),
            ("1967-02-01", "2"),
            ("1967-03-01", "3"),
            ("1967-04-01", "4"),
            ("1967-05-01", "5"),
            ("1967-06-01", "6"),
        ]);
        let s = observations_to_series("FEDFUNDS", &o).unwrap();
        assert_eq!(s.values(), &[2.0, 5.0]);
        assert_eq!(s.start().to_string(), "1967Q1");
    }

    #[test]
    fn missing_value_rejected() {
        let o = obs(&[("1967-01-01", "1"), ("1967-04-01", ".")]);
        assert!(observations_to_series("GPDI", &o).is_err());
    }

    #[test]
    fn empty_key_signals_snapshot() {
        assert!(matches!(FredClient::new("  "), Err(Error::MissingApiKey)));
    }
}
