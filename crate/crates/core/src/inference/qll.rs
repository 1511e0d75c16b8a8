//! qLL-S: the S statistic combined with a quasi-local-level stability
//! component that picks up moment violations confined to subsamples.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::chi2::chi2_quantile;
use super::hac::HacConfig;
use super::qll_table::QLL_CRITICAL_VALUES;
use super::s_test::{check_df, CueObjective, TestResult, Variant};
use crate::error::{Error, Result};
use crate::linalg::{demean, SpdFactor};
use crate::model::MomentSystem;

/// Weight on the full-sample S statistic.
pub const S_WEIGHT: f64 = 10.0 / 11.0;
/// Local-level persistence parameter `c̄` (so `r̄ = 1 − c̄/T`).
pub const QLL_CBAR: f64 = 10.0;
/// Levels with tabulated critical values.
pub const TABLE_LEVELS: [f64; 3] = [0.90, 0.95, 0.99];

/// How the qLL-S statistic is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum QllMode {
    /// Quasi-local-level component with tabulated critical values.
    #[default]
    Canonical,
    /// Supremum of subsample S statistics, Bonferroni critical values.
    SupSplit,
}

/// Subsample-instability component computed from whitened, demeaned moments.
pub trait StabilityComponent: Sync {
    fn value(&self, v: &DMatrix<f64>) -> f64;
}

/// Quasi-local-level component: for each whitened moment series,
/// `Σ v_t² − r̄ Σ w̃_t²` where `w_t = r̄ w_{t−1} + Δv_t` and `w̃` is the
/// residual of `w` on `r̄^t`. Nonnegative for demeaned input.
#[derive(Debug, Clone, Copy, Default)]
pub struct QuasiLocalLevel;

impl StabilityComponent for QuasiLocalLevel {
    fn value(&self, v: &DMatrix<f64>) -> f64 {
        let t = v.nrows();
        if t < 2 {
            return 0.0;
        }
        let r = 1.0 - QLL_CBAR / t as f64;
        let x: Vec<f64> = (1..=t).map(|i| r.powi(i as i32)).collect();
        let xx: f64 = x.iter().map(|a| a * a).sum();
        let mut total = 0.0;
        let mut w = vec![0.0; t];
        for col in v.column_iter() {
            w[0] = col[0];
            for i in 1..t {
                w[i] = r * w[i - 1] + col[i] - col[i - 1];
            }
            let beta = x.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() / xx;
            let ssr: f64 = x.iter().zip(&w).map(|(a, b)| (b - beta * a).powi(2)).sum();
            let ss: f64 = col.iter().map(|a| a * a).sum();
            total += ss - r * ssr;
        }
        total.max(0.0)
    }
}

/// A component that is identically zero; reduces qLL-S to `(10/11)·S`.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoInstability;

impl StabilityComponent for NoInstability {
    fn value(&self, _v: &DMatrix<f64>) -> f64 {
        0.0
    }
}

/// `(10/11) S + B`.
pub fn combine(s: f64, b: f64) -> f64 {
    S_WEIGHT * s + b
}

/// Tabulated critical value for `k_z` moments and one included instrument.
pub fn qll_critical_value(kz: usize, kx: usize, level: f64) -> Result<f64> {
    let missing = || Error::MissingCriticalValue { kz, kx, level };
    if kx != 1 {
        return Err(missing());
    }
    let li = TABLE_LEVELS.iter().position(|l| (l - level).abs() < 1e-12).ok_or_else(missing)?;
    QLL_CRITICAL_VALUES.iter().find(|(k, _)| *k == kz).map(|(_, cv)| cv[li]).ok_or_else(missing)
}

/// Whitened, demeaned moment contributions at `d`.
fn whitened_moments(e: &DVector<f64>, z: &DMatrix<f64>, obj: &CueObjective, d: f64) -> Result<DMatrix<f64>> {
    let f = DMatrix::from_fn(z.nrows(), z.ncols(), |i, j| z[(i, j)] * (e[i] - d));
    let fac = SpdFactor::new(&obj.variance(d)).map_err(|_| Error::Singular(format!("moment covariance is singular at d = {d}")))?;
    Ok(fac.whiten(&demean(&f).transpose()).transpose())
}

/// qLL-S with a caller-supplied stability component; returns the
/// statistic, the S part, the B part and `d̂`.
pub fn qll_parts(
    e: &DVector<f64>,
    z: &DMatrix<f64>,
    cfg: &HacConfig,
    component: &dyn StabilityComponent,
) -> Result<(f64, f64, f64, f64, bool, usize)> {
    let obj = CueObjective::new(e, z, cfg)?;
    let (d, s, ridged) = obj.minimize()?;
    let v = whitened_moments(e, z, &obj, d)?;
    let b = component.value(&v);
    Ok((combine(s, b), s, b, d, ridged, obj.bandwidth))
}

/// qLL-S test of `H0: θ = θ0` with tabulated critical values.
pub fn qll_s_statistic(theta0: &[f64], sys: &MomentSystem, cfg: &HacConfig, level: f64) -> Result<TestResult> {
    let df = check_df(sys)?;
    let crit = qll_critical_value(sys.kz(), sys.kx(), level)?;
    let e = sys.fitted_combination(theta0)?;
    let (stat, _, _, d, ridged, bw) = qll_parts(&e, &sys.z, cfg, &QuasiLocalLevel)?;
    Ok(TestResult::new(stat, df, crit, level, Some(d), bw, Variant::QllS, ridged))
}

/// Breakpoint fractions of the sup-split substitute.
pub const SUP_SPLIT_BREAKS: [f64; 7] = [0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8];

/// Non-canonical substitute: the largest S statistic among the full sample
/// and both sides of each breakpoint, against a Bonferroni critical value.
pub fn sup_split_statistic(theta0: &[f64], sys: &MomentSystem, cfg: &HacConfig, level: f64) -> Result<TestResult> {
    let df = check_df(sys)?;
    let e = sys.fitted_combination(theta0)?;
    let t = sys.t();
    let mut ranges = vec![(0, t)];
    for f in SUP_SPLIT_BREAKS {
        let tau = (f * t as f64).round() as usize;
        ranges.push((0, tau));
        ranges.push((tau, t));
    }
    let m = ranges.len();
    let crit = chi2_quantile(df, 1.0 - (1.0 - level) / m as f64)?;
    let mut best = f64::NEG_INFINITY;
    let mut ridged = false;
    let mut d_full = None;
    let mut bw_full = 0;
    for (a, b) in ranges {
        let n = b - a;
        if n <= sys.kz() {
            return Err(Error::EmptySample(format!("subsample {a}..{b} too short for {} moments", sys.kz())));
        }
        let es = e.rows(a, n).into_owned();
        let zs = sys.z.rows(a, n).into_owned();
        let obj = CueObjective::new(&es, &zs, cfg)?;
        let (d, s, r) = obj.minimize()?;
        if d_full.is_none() {
            d_full = Some(d);
            bw_full = obj.bandwidth;
        }
        ridged |= r;
        best = best.max(s);
    }
    Ok(TestResult::new(best, df, crit, level, d_full, bw_full, Variant::SupSplit, ridged))
}

/// Draws from the null distribution of qLL-S with `kz` moments and one
/// concentrated constant: `(10/11) χ²_{kz−1}` plus the stability component of
/// `t` i.i.d. Gaussian moment vectors, whitened by their sample covariance.
pub fn simulate_null(kz: usize, t: usize, reps: usize, seed: u64) -> Vec<f64> {
    (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(rep as u64);
            let s: f64 = (0..kz - 1).map(|_| StandardNormal.sample(&mut rng)).map(|x: f64| x * x).sum();
            let v = demean(&DMatrix::from_fn(t, kz, |_, _| StandardNormal.sample(&mut rng)));
            let cov = v.transpose() * &v / t as f64;
            let b = match SpdFactor::new(&cov) {
                Ok(f) => QuasiLocalLevel.value(&f.whiten(&v.transpose()).transpose()),
                Err(_) => 0.0,
            };
            combine(s, b)
        })
        .collect()
}

/// Empirical quantile (type 7).
pub fn empirical_quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}
