//! Published (κ, ζ) calibrations from the DSGE literature and the reduced-form
//! (ϕ, φ) values they imply.

use serde::Serialize;

/// How a calibration's (κ, ζ) pair was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Provenance {
    /// Stated directly by the source.
    Stated,
    /// Recovered from the midpoint of the reported reduced-form values.
    BackedOut,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Calibration {
    pub label: &'static str,
    pub kappa: f64,
    pub zeta: f64,
    pub provenance: Provenance,
}

/// Reported reduced-form value: a point or an interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Reported {
    Point(f64),
    Range(f64, f64),
}

/// Reported `(phi, varphi)` pairs; `phi = 1/κ`, `varphi = φ_k ζ / κ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedFormRow {
    pub label: &'static str,
    pub phi: Reported,
    pub varphi: Reported,
}

pub const REDUCED_FORM_ROWS: [ReducedFormRow; 8] = [
    ReducedFormRow { label: "CEE", phi: Reported::Point(0.40), varphi: Reported::Point(0.0001) },
    ReducedFormRow { label: "SW", phi: Reported::Range(0.13, 0.25), varphi: Reported::Range(0.003, 0.02) },
    ReducedFormRow { label: "JPT", phi: Reported::Range(0.26, 0.48), varphi: Reported::Range(0.03, 0.12) },
    ReducedFormRow { label: "ACEL", phi: Reported::Point(0.67), varphi: Reported::Point(0.26) },
    ReducedFormRow { label: "CTW", phi: Reported::Range(0.05, 0.10), varphi: Reported::Range(0.0003, 0.002) },
    ReducedFormRow { label: "CMR", phi: Reported::Point(0.09), varphi: Reported::Point(0.008) },
    ReducedFormRow { label: "AABC", phi: Reported::Range(0.18, 0.35), varphi: Reported::Range(0.007, 0.01) },
    ReducedFormRow { label: "IKR", phi: Reported::Range(0.30, 0.67), varphi: Reported::Range(0.04, 0.15) },
];

/// Eight literature calibrations. Four are stated directly; the others are
/// recovered from the reduced-form row with `φ_k = 0.03475`.
pub const CALIBRATIONS: [Calibration; 8] = [
    Calibration { label: "CEE", kappa: 2.48, zeta: 0.01, provenance: Provenance::Stated },
    Calibration { label: "SW", kappa: 5.26, zeta: 1.74, provenance: Provenance::BackedOut },
    Calibration { label: "JPT", kappa: 2.85, zeta: 5.30, provenance: Provenance::Stated },
    Calibration { label: "ACEL", kappa: 1.50, zeta: 11.42, provenance: Provenance::Stated },
    Calibration { label: "CTW", kappa: 14.30, zeta: 0.30, provenance: Provenance::Stated },
    Calibration { label: "CMR", kappa: 11.11, zeta: 2.56, provenance: Provenance::BackedOut },
    Calibration { label: "AABC", kappa: 3.77, zeta: 0.92, provenance: Provenance::BackedOut },
    Calibration { label: "IKR", kappa: 2.06, zeta: 5.64, provenance: Provenance::BackedOut },
];

/// `(ρ, κ, ζ)` points pairing every calibration with every `ρ`.
pub fn calibration_points(rhos: &[f64]) -> Vec<Vec<f64>> {
    rhos.iter().flat_map(|&r| CALIBRATIONS.iter().map(move |c| vec![r, c.kappa, c.zeta])).collect()
}

/// Rounds to `decimals` places, the way the values are reported.
pub fn round_to(x: f64, decimals: u32) -> f64 {
    let s = 10f64.powi(decimals as i32);
    (x * s).round() / s
}
