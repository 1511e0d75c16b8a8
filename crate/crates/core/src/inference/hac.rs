//! Bartlett-kernel HAC long-run covariance.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Kernel {
    #[default]
    Bartlett,
}

/// Truncation lag of the kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Bandwidth {
    /// `floor(4 (T/100)^{2/9})`.
    #[default]
    Auto,
    Fixed(usize),
}

impl Bandwidth {
    pub fn resolve(self, t: usize) -> usize {
        match self {
            Bandwidth::Fixed(b) => b,
            Bandwidth::Auto => (4.0 * (t as f64 / 100.0).powf(2.0 / 9.0)).floor() as usize,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct HacConfig {
    pub kernel: Kernel,
    pub bandwidth: Bandwidth,
}

impl HacConfig {
    pub fn fixed(bandwidth: usize) -> Self {
        Self { kernel: Kernel::Bartlett, bandwidth: Bandwidth::Fixed(bandwidth) }
    }
}

/// Bartlett weight for lag `j` at bandwidth `b`.
fn weight(j: usize, b: usize) -> f64 {
    if j > b {
        0.0
    } else {
        1.0 - j as f64 / (b as f64 + 1.0)
    }
}

/// `Γ_0 + Σ_{j=1}^{B} ω_j (Γ_j + Γ_j')` with `Γ_j = (1/T) Σ_{t>j} w_t w_{t-j}'`.
///
/// `w` holds one (already demeaned) observation per row.
pub fn hac_variance(w: &DMatrix<f64>, cfg: &HacConfig) -> Result<DMatrix<f64>> {
    let t = w.nrows();
    let b = cfg.bandwidth.resolve(t);
    if b >= t {
        return Err(Error::InvalidParameter(format!("bandwidth {b} must be below the sample size {t}")));
    }
    let tf = t as f64;
    let mut v = w.transpose() * w / tf;
    for j in 1..=b {
        let g = w.rows(j, t - j).transpose() * w.rows(0, t - j) / tf;
        let wj = weight(j, b);
        v += (&g + g.transpose()) * wj;
    }
    // exact symmetry
    let vt = v.transpose();
    Ok((v + vt) * 0.5)
}
