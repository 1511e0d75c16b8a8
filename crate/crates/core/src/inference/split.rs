//! Split-sample S statistic, robust to many weak instruments.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::chi2::chi2_quantile;
use super::hac::{hac_variance, HacConfig};
use super::s_test::{TestResult, Variant};
use crate::error::{Error, Result};
use crate::linalg::{column_means, demean, ols, SpdFactor};
use crate::model::MomentSystem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SplitSpec {
    /// Share of the sample used for the first-stage fit.
    pub first_fraction: f64,
    /// Rows dropped between the two subsamples (at least the MA order of the error).
    pub gap: usize,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self { first_fraction: 0.45, gap: 3 }
    }
}

/// Zero-based half-open row ranges of the two subsamples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitRanges {
    pub first: (usize, usize),
    pub second: (usize, usize),
}

impl SplitRanges {
    pub fn t1(&self) -> usize {
        self.first.1 - self.first.0
    }
    pub fn t2(&self) -> usize {
        self.second.1 - self.second.0
    }
}

impl SplitSpec {
    /// Row ranges for a sample of `t` rows with `kz` instruments.
    pub fn ranges(&self, t: usize, kz: usize) -> Result<SplitRanges> {
        if !(self.first_fraction > 0.0 && self.first_fraction < 1.0) {
            return Err(Error::InvalidParameter(format!("first_fraction must lie in (0,1), got {}", self.first_fraction)));
        }
        let t1 = (self.first_fraction * t as f64).floor() as usize;
        let start2 = t1 + self.gap;
        let t2 = t.saturating_sub(start2);
        if t1 < kz + 1 || t2 < kz + 1 {
            return Err(Error::EmptySample(format!(
                "split of {t} rows gives subsamples of {t1} and {t2} rows; each needs at least {}",
                kz + 1
            )));
        }
        Ok(SplitRanges { first: (0, t1), second: (start2, t) })
    }
}

/// Split-sample statistic from raw inputs: regressors `y`, coefficients `b`,
/// Jacobian `jac` (m × n_p) and excluded instruments `z`.
pub fn split_sample_raw(
    y: &DMatrix<f64>,
    b: &DVector<f64>,
    jac: &DMatrix<f64>,
    z: &DMatrix<f64>,
    split: &SplitSpec,
    cfg: &HacConfig,
    level: f64,
) -> Result<TestResult> {
    let t = y.nrows();
    let np = jac.ncols();
    let r = split.ranges(t, z.ncols() + 1)?;
    let yd = demean(y);
    let zd = demean(z);
    let w = &yd * jac;
    let z1 = zd.rows(r.first.0, r.t1()).into_owned();
    let w1 = w.rows(r.first.0, r.t1()).into_owned();
    let pi = ols(&z1, &w1).map_err(|e| Error::Singular(format!("first-subsample instruments: {e}")))?;
    let w2 = zd.rows(r.second.0, r.t2()) * pi;
    let e2 = yd.rows(r.second.0, r.t2()) * b;
    let g = DMatrix::from_fn(r.t2(), np, |i, j| w2[(i, j)] * e2[i]);
    let omega = hac_variance(&demean(&g), cfg)?;
    let fac = SpdFactor::new(&omega).map_err(|_| Error::Singular("split-sample moment covariance".into()))?;
    let gsum = column_means(&g) * r.t2() as f64;
    let stat = (fac.quad_form(&gsum) / r.t2() as f64).max(0.0);
    let crit = chi2_quantile(np, level)?;
    Ok(TestResult::new(stat, np, crit, level, None, cfg.bandwidth.resolve(r.t2()), Variant::SplitSample, fac.ridged))
}

/// Split-sample S test of `H0: θ = θ0`; `df` equals the number of
/// structural parameters.
pub fn split_sample_s_statistic(
    theta0: &[f64],
    sys: &MomentSystem,
    split: &SplitSpec,
    cfg: &HacConfig,
    level: f64,
) -> Result<TestResult> {
    let b = sys.model.coefficients(theta0)?;
    let jac = sys.model.jacobian(theta0)?;
    split_sample_raw(&sys.y, &b, &jac, &sys.z_excluded(), split, cfg, level)
}
