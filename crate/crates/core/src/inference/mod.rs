//! Weak-identification-robust tests: S, qLL-S and split-sample S, plus the
//! HAC estimator, χ² quantiles and first-stage diagnostics they rely on.

pub mod chi2;
pub mod first_stage;
pub mod hac;
pub mod qll;
mod qll_table;
pub mod split;

use serde::{Deserialize, Serialize};

pub use chi2::{chi2_cdf, chi2_quantile};
pub use first_stage::{first_stage_diagnostics, first_stage_fit, FirstStageFit};
pub use hac::{hac_variance, Bandwidth, HacConfig, Kernel};
pub use qll::{qll_critical_value, qll_s_statistic, sup_split_statistic, QllMode};
pub use s_test::{s_statistic, s_statistic_raw, CueObjective, TestResult, Variant};
pub use split::{split_sample_s_statistic, SplitSpec};

use crate::error::{Error, Result};
use crate::model::MomentSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Statistic {
    #[default]
    S,
    #[serde(rename = "qLL")]
    Qll,
    #[serde(rename = "split")]
    Split,
}

impl std::str::FromStr for Statistic {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "s" => Ok(Self::S),
            "qll" | "qll-s" => Ok(Self::Qll),
            "split" | "split-sample" => Ok(Self::Split),
            _ => Err(Error::InvalidParameter(format!("unknown statistic `{s}` (expected S, qLL or split)"))),
        }
    }
}

/// Everything needed to evaluate one test at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestConfig {
    pub statistic: Statistic,
    pub level: f64,
    pub hac: HacConfig,
    pub split: SplitSpec,
    pub qll_mode: QllMode,
}

impl Default for TestConfig {
    fn default() -> Self {
        Self { statistic: Statistic::S, level: 0.90, hac: HacConfig::default(), split: SplitSpec::default(), qll_mode: QllMode::Canonical }
    }
}

impl TestConfig {
    pub fn with_level(mut self, level: f64) -> Self {
        self.level = level;
        self
    }

    pub fn with_statistic(mut self, statistic: Statistic) -> Self {
        self.statistic = statistic;
        self
    }
}

/// Evaluates the configured test at `theta0`.
pub fn evaluate(theta0: &[f64], sys: &MomentSystem, cfg: &TestConfig) -> Result<TestResult> {
    if !(cfg.level > 0.0 && cfg.level < 1.0) {
        return Err(Error::InvalidParameter(format!("level must lie in (0,1), got {}", cfg.level)));
    }
    match (cfg.statistic, cfg.qll_mode) {
        (Statistic::S, _) => s_statistic(theta0, sys, &cfg.hac, cfg.level),
        (Statistic::Qll, QllMode::Canonical) => qll_s_statistic(theta0, sys, &cfg.hac, cfg.level),
        (Statistic::Qll, QllMode::SupSplit) => sup_split_statistic(theta0, sys, &cfg.hac, cfg.level),
        (Statistic::Split, _) => split_sample_s_statistic(theta0, sys, &cfg.split, &cfg.hac, cfg.level),
    }
}
