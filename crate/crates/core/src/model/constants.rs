use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Discount factor, depreciation and the constants derived from them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibratedConstants {
    pub beta: f64,
    pub delta: f64,
    /// `β(1 − δ)`
    pub phi_q: f64,
    /// `1 − φ_q`
    pub phi_k: f64,
    /// Steady-state rental rate of capital, `1/β − 1 + δ`.
    pub rbar_k: f64,
}

impl CalibratedConstants {
    pub fn from_calibration(beta: f64, delta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::InvalidParameter(format!("beta must lie in (0,1), got {beta}")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParameter(format!("delta must lie in (0,1), got {delta}")));
        }
        let phi_q = beta * (1.0 - delta);
        Ok(Self { beta, delta, phi_q, phi_k: 1.0 - phi_q, rbar_k: 1.0 / beta - 1.0 + delta })
    }
}

impl Default for CalibratedConstants {
    /// `β = 0.99`, `δ = 0.025`.
    fn default() -> Self {
        Self::from_calibration(0.99, 0.025).expect("valid default calibration")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn standard_calibration() {
        let c = CalibratedConstants::from_calibration(0.99, 0.025).unwrap();
        assert_abs_diff_eq!(c.phi_q, 0.96525, epsilon = 1e-14);
        assert_abs_diff_eq!(c.phi_k, 0.03475, epsilon = 1e-14);
        assert_abs_diff_eq!(c.rbar_k, 1.0 / 0.99 - 0.975, epsilon = 1e-15);
        assert_abs_diff_eq!(c.rbar_k, 0.035101010101, epsilon = 1e-11);
        assert_eq!(format!("{:.4}", c.phi_k), "0.0348");
        assert_abs_diff_eq!(c.phi_q + c.phi_k, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn half_half() {
        let c = CalibratedConstants::from_calibration(0.5, 0.5).unwrap();
        assert_eq!((c.phi_q, c.phi_k, c.rbar_k), (0.25, 0.75, 1.5));
    }

    #[test]
    fn rejects_boundary() {
        assert!(CalibratedConstants::from_calibration(1.0, 0.025).is_err());
        assert!(CalibratedConstants::from_calibration(0.99, 0.0).is_err());
    }
}
