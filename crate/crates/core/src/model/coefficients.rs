//! Coefficient maps `θ ↦ b(θ)` and their Jacobians.
//!
//! Column orders are fixed and normative:
//!
//! * IAC / semi-structural: `[Δi_t, Δi_{t-1}, Δi_{t+1}, Δi_{t+2}, r^p_t, r^p_{t-1}, u_t, u_{t+1}]`
//! * CAC: `[Δi_t, Δi_{t-1}, Δi_{t+1}, u_{t+1}, r^p_t, u_t, r^p_{t-1}, u_{t-1}, r^p_{t-2}]`
//!
//! The residual is `Y·b(θ) − X·d`, with the coefficient on `Δi_t` positive.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::constants::CalibratedConstants;
use super::design::{Regressor, ResidualSpec, Var};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructuralParams {
    pub rho: f64,
    pub kappa: f64,
    pub zeta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemiStructuralParams {
    pub rho: f64,
    /// Utilization slope `φ_k ζ / κ`.
    pub varphi: f64,
    /// Real-rate slope `1 / κ`.
    pub phi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CACParams {
    pub rho: f64,
    pub sigma: f64,
    pub zeta: f64,
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")))
    }
}

fn check_rho(rho: f64) -> Result<()> {
    check_finite("rho", rho)?;
    if rho.abs() >= 1.0 {
        return Err(Error::InvalidParameter(format!("rho must satisfy |rho| < 1, got {rho}")));
    }
    Ok(())
}

impl StructuralParams {
    fn validate(&self) -> Result<()> {
        check_rho(self.rho)?;
        check_finite("zeta", self.zeta)?;
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(Error::InvalidParameter(format!("kappa must be positive, got {}", self.kappa)));
        }
        Ok(())
    }
}

impl SemiStructuralParams {
    fn validate(&self) -> Result<()> {
        check_rho(self.rho)?;
        check_finite("varphi", self.varphi)?;
        check_finite("phi", self.phi)
    }
}

impl CACParams {
    fn validate(&self) -> Result<()> {
        check_rho(self.rho)?;
        check_finite("zeta", self.zeta)?;
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("sigma must be positive, got {}", self.sigma)));
        }
        Ok(())
    }
}

/// Quasi-differenced investment-dynamics part shared by IAC and semi maps.
fn dynamics(rho: f64, c: &CalibratedConstants) -> [f64; 4] {
    let s = c.beta + c.phi_q;
    [1.0 + rho * s, -rho, -(s + rho * c.beta * c.phi_q), c.beta * c.phi_q]
}

pub fn iac_coefficients(p: &StructuralParams, c: &CalibratedConstants) -> Result<DVector<f64>> {
    p.validate()?;
    let [a0, a1, a2, a3] = dynamics(p.rho, c);
    let k = p.kappa;
    Ok(DVector::from_vec(vec![
        a0,
        a1,
        a2,
        a3,
        1.0 / k,
        -p.rho / k,
        c.phi_k * p.rho * p.zeta / k,
        -c.phi_k * p.zeta / k,
    ]))
}

pub fn semi_coefficients(p: &SemiStructuralParams, c: &CalibratedConstants) -> Result<DVector<f64>> {
    p.validate()?;
    let [a0, a1, a2, a3] = dynamics(p.rho, c);
    Ok(DVector::from_vec(vec![a0, a1, a2, a3, p.phi, -p.rho * p.phi, p.rho * p.varphi, -p.varphi]))
}

/// CAC map, in the form multiplied through by `1 + ρβ`.
pub fn cac_coefficients(p: &CACParams, c: &CalibratedConstants) -> Result<DVector<f64>> {
    p.validate()?;
    let (rho, beta, delta) = (p.rho, c.beta, c.delta);
    let a = 1.0 / (p.sigma * delta);
    let r = beta * c.rbar_k;
    let z = p.zeta;
    Ok(DVector::from_vec(vec![
        1.0 + rho * beta,
        -rho,
        -beta,
        -r * z * a,
        a,
        r * (1.0 - delta + rho) * z * a,
        -(1.0 - delta + rho) * a,
        -rho * (1.0 - delta) * r * z * a,
        rho * (1.0 - delta) * a,
    ]))
}

/// `(varphi, phi) = (φ_k ζ / κ, 1 / κ)`.
pub fn map_structural_to_semi(kappa: f64, zeta: f64, c: &CalibratedConstants) -> Result<(f64, f64)> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::InvalidParameter(format!("kappa must be positive, got {kappa}")));
    }
    Ok((c.phi_k * zeta / kappa, 1.0 / kappa))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    IAC,
    CAC,
    SEMI,
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "IAC" => Ok(ModelKind::IAC),
            "CAC" => Ok(ModelKind::CAC),
            "SEMI" => Ok(ModelKind::SEMI),
            _ => Err(Error::InvalidParameter(format!("unknown model `{s}` (IAC, CAC or SEMI)"))),
        }
    }
}

const IAC_REGRESSORS: [Regressor; 8] = [
    Regressor::new(Var::DeltaI, 0),
    Regressor::new(Var::DeltaI, -1),
    Regressor::new(Var::DeltaI, 1),
    Regressor::new(Var::DeltaI, 2),
    Regressor::new(Var::RealRate, 0),
    Regressor::new(Var::RealRate, -1),
    Regressor::new(Var::Util, 0),
    Regressor::new(Var::Util, 1),
];

const CAC_REGRESSORS: [Regressor; 9] = [
    Regressor::new(Var::DeltaI, 0),
    Regressor::new(Var::DeltaI, -1),
    Regressor::new(Var::DeltaI, 1),
    Regressor::new(Var::Util, 1),
    Regressor::new(Var::RealRate, 0),
    Regressor::new(Var::Util, 0),
    Regressor::new(Var::RealRate, -1),
    Regressor::new(Var::Util, -1),
    Regressor::new(Var::RealRate, -2),
];

/// A model variant together with its calibration. For the semi-structural
/// model `ρ` is fixed and the free parameters are `(varphi, phi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub kind: ModelKind,
    pub constants: CalibratedConstants,
    /// Only used by [`ModelKind::SEMI`].
    pub semi_rho: f64,
}

impl Model {
    pub fn iac(constants: CalibratedConstants) -> Self {
        Self { kind: ModelKind::IAC, constants, semi_rho: 0.0 }
    }

    pub fn cac(constants: CalibratedConstants) -> Self {
        Self { kind: ModelKind::CAC, constants, semi_rho: 0.0 }
    }

    pub fn semi(constants: CalibratedConstants, rho: f64) -> Self {
        Self { kind: ModelKind::SEMI, constants, semi_rho: rho }
    }

    pub fn param_names(&self) -> &'static [&'static str] {
        match self.kind {
            ModelKind::IAC => &["rho", "kappa", "zeta"],
            ModelKind::CAC => &["rho", "sigma", "zeta"],
            ModelKind::SEMI => &["varphi", "phi"],
        }
    }

    pub fn n_params(&self) -> usize {
        self.param_names().len()
    }

    pub fn regressors(&self) -> &'static [Regressor] {
        match self.kind {
            ModelKind::IAC | ModelKind::SEMI => &IAC_REGRESSORS,
            ModelKind::CAC => &CAC_REGRESSORS,
        }
    }

    pub fn residual_spec(&self) -> ResidualSpec {
        match self.kind {
            ModelKind::IAC | ModelKind::SEMI => ResidualSpec { ma_order: 2, min_instrument_lag: 1 },
            ModelKind::CAC => ResidualSpec { ma_order: 2, min_instrument_lag: 2 },
        }
    }

    fn check_len(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.n_params() {
            return Err(Error::Dimension(format!(
                "{:?} takes {} parameters ({}), got {}",
                self.kind,
                self.n_params(),
                self.param_names().join(", "),
                theta.len()
            )));
        }
        Ok(())
    }

    pub fn coefficients(&self, theta: &[f64]) -> Result<DVector<f64>> {
        self.check_len(theta)?;
        let c = &self.constants;
        match self.kind {
            ModelKind::IAC => {
                iac_coefficients(&StructuralParams { rho: theta[0], kappa: theta[1], zeta: theta[2] }, c)
            }
            ModelKind::CAC => cac_coefficients(&CACParams { rho: theta[0], sigma: theta[1], zeta: theta[2] }, c),
            ModelKind::SEMI => semi_coefficients(
                &SemiStructuralParams { rho: self.semi_rho, varphi: theta[0], phi: theta[1] },
                c,
            ),
        }
    }

    /// Analytic `∂b/∂θ'`, an `m × n_p` matrix.
    pub fn jacobian(&self, theta: &[f64]) -> Result<DMatrix<f64>> {
        // validates the point as a side effect
        self.coefficients(theta)?;
        let c = &self.constants;
        Ok(match self.kind {
            ModelKind::IAC => {
                let (rho, k, z) = (theta[0], theta[1], theta[2]);
                let pk = c.phi_k;
                let k2 = k * k;
                #[rustfmt::skip]
                let j = DMatrix::from_row_slice(8, 3, &[
                    c.beta + c.phi_q,     0.0,                     0.0,
                    -1.0,                 0.0,                     0.0,
                    -c.beta * c.phi_q,    0.0,                     0.0,
                    0.0,                  0.0,                     0.0,
                    0.0,                  -1.0 / k2,               0.0,
                    -1.0 / k,             rho / k2,                0.0,
                    pk * z / k,           -pk * rho * z / k2,      pk * rho / k,
                    0.0,                  pk * z / k2,             -pk / k,
                ]);
                j
            }
            ModelKind::SEMI => {
                let rho = self.semi_rho;
                #[rustfmt::skip]
                let j = DMatrix::from_row_slice(8, 2, &[
                    0.0,  0.0,
                    0.0,  0.0,
                    0.0,  0.0,
                    0.0,  0.0,
                    0.0,  1.0,
                    0.0,  -rho,
                    rho,  0.0,
                    -1.0, 0.0,
                ]);
                j
            }
            ModelKind::CAC => {
                let (rho, s, z) = (theta[0], theta[1], theta[2]);
                let (beta, delta) = (c.beta, c.delta);
                let a = 1.0 / (s * delta);
                let r = beta * c.rbar_k;
                let m = 1.0 - delta + rho;
                let q = 1.0 - delta;
                #[rustfmt::skip]
                let j = DMatrix::from_row_slice(9, 3, &[
                    beta,           0.0,                    0.0,
                    -1.0,           0.0,                    0.0,
                    0.0,            0.0,                    0.0,
                    0.0,            r * z * a / s,          -r * a,
                    0.0,            -a / s,                 0.0,
                    r * z * a,      -r * m * z * a / s,     r * m * a,
                    -a,             m * a / s,              0.0,
                    -q * r * z * a, rho * q * r * z * a / s, -rho * q * r * a,
                    q * a,          -rho * q * a / s,       0.0,
                ]);
                j
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c() -> CalibratedConstants {
        CalibratedConstants::default()
    }

    fn assert_vec(got: &DVector<f64>, want: &[f64], tol: f64) {
        assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(want) {
            assert_abs_diff_eq!(*g, *w, epsilon = tol);
        }
    }

    #[test]
    fn iac_examples() {
        let b = iac_coefficients(&StructuralParams { rho: 0.0, kappa: 1.0, zeta: 5.0 }, &c()).unwrap();
        assert_vec(&b, &[1.0, 0.0, -1.95525, 0.9555975, 1.0, 0.0, 0.0, -0.17375], 1e-12);
        let b = iac_coefficients(&StructuralParams { rho: 0.0, kappa: 1.0, zeta: 0.0 }, &c()).unwrap();
        assert_eq!((b[6], b[7]), (0.0, 0.0));
        // values from a symbolic evaluation of the quasi-differenced equation
        let b = iac_coefficients(&StructuralParams { rho: 0.5, kappa: 2.0, zeta: 4.0 }, &c()).unwrap();
        assert_vec(&b, &[1.977625, -0.5, -2.43304875, 0.9555975, 0.5, -0.25, 0.03475, -0.0695], 1e-12);
        assert!(iac_coefficients(&StructuralParams { rho: 0.5, kappa: 0.0, zeta: 4.0 }, &c()).is_err());
    }

    #[test]
    fn semi_examples() {
        let b = semi_coefficients(&SemiStructuralParams { rho: 0.6, varphi: 0.1, phi: 0.2 }, &c()).unwrap();
        assert_vec(&b, &[2.17315, -0.6, -2.5286085, 0.9555975, 0.2, -0.12, 0.06, -0.1], 1e-12);
        let b = semi_coefficients(&SemiStructuralParams { rho: 0.3, varphi: 0.0, phi: 0.0 }, &c()).unwrap();
        assert!(b.iter().skip(4).all(|&v| v == 0.0));
    }

    #[test]
    fn cac_examples() {
        let b = cac_coefficients(&CACParams { rho: 0.0, sigma: 1.0, zeta: 0.0 }, &c()).unwrap();
        assert_vec(&b, &[1.0, 0.0, -0.99, 0.0, 40.0, 0.0, -39.0, 0.0, 0.0], 1e-10);
        let b = cac_coefficients(&CACParams { rho: 0.0, sigma: 1.5, zeta: 3.0 }, &c()).unwrap();
        assert_eq!((b[7], b[8]), (0.0, 0.0));
        // symbolic evaluation of the grouped CAC equation times (1 + ρβ)
        let b = cac_coefficients(&CACParams { rho: 0.5, sigma: 2.0, zeta: 1.0 }, &c()).unwrap();
        assert_vec(&b, &[1.495, -0.5, -0.99, -0.695, 20.0, 1.025125, -29.5, -0.3388125, 9.75], 1e-10);
        assert!(cac_coefficients(&CACParams { rho: 0.5, sigma: 0.0, zeta: 1.0 }, &c()).is_err());
    }

    #[test]
    fn cac_linear_in_zeta() {
        let p = CACParams { rho: 0.4, sigma: 1.3, zeta: 2.0 };
        let b1 = cac_coefficients(&p, &c()).unwrap();
        let b2 = cac_coefficients(&CACParams { zeta: 4.0, ..p }, &c()).unwrap();
        for i in [3, 5, 7] {
            assert_abs_diff_eq!(b2[i], 2.0 * b1[i], epsilon = 1e-12);
        }
        for i in [0, 1, 2, 4, 6, 8] {
            assert_eq!(b2[i], b1[i]);
        }
    }

    #[test]
    fn table_two_points() {
        let round = |x: f64, d: i32| (x * 10f64.powi(d)).round() / 10f64.powi(d);
        let (varphi, phi) = map_structural_to_semi(1.50, 11.42, &c()).unwrap();
        assert_eq!((round(phi, 2), round(varphi, 2)), (0.67, 0.26));
        let (varphi, phi) = map_structural_to_semi(2.48, 0.01, &c()).unwrap();
        assert_eq!((round(phi, 2), round(varphi, 4)), (0.40, 0.0001));
        let (varphi, phi) = map_structural_to_semi(2.85, 5.30, &c()).unwrap();
        assert_abs_diff_eq!(varphi, 0.0646, epsilon = 5e-5);
        assert_abs_diff_eq!(phi, 0.3509, epsilon = 5e-5);
        assert!(map_structural_to_semi(0.0, 1.0, &c()).is_err());
    }

    #[test]
    fn rho_zero_removes_quasi_differencing() {
        let b = iac_coefficients(&StructuralParams { rho: 0.0, kappa: 3.0, zeta: 2.0 }, &c()).unwrap();
        assert_eq!((b[1], b[5], b[6]), (0.0, 0.0, 0.0));
    }

    fn fd_jacobian(m: &Model, theta: &[f64]) -> DMatrix<f64> {
        let h = 1e-6;
        let base = m.coefficients(theta).unwrap();
        let mut j = DMatrix::zeros(base.len(), theta.len());
        for k in 0..theta.len() {
            let mut up = theta.to_vec();
            let mut dn = theta.to_vec();
            up[k] += h;
            dn[k] -= h;
            let d = (m.coefficients(&up).unwrap() - m.coefficients(&dn).unwrap()) / (2.0 * h);
            j.set_column(k, &d);
        }
        j
    }

    proptest! {
        #[test]
        fn semi_of_mapped_equals_structural(rho in 0.0f64..0.99, kappa in 0.05f64..20.0, zeta in 0.0f64..10.0) {
            let c = c();
            let (varphi, phi) = map_structural_to_semi(kappa, zeta, &c).unwrap();
            let s = semi_coefficients(&SemiStructuralParams { rho, varphi, phi }, &c).unwrap();
            let b = iac_coefficients(&StructuralParams { rho, kappa, zeta }, &c).unwrap();
            for (x, y) in s.iter().zip(b.iter()) {
                prop_assert!((x - y).abs() <= 1e-14 * (1.0 + y.abs()));
            }
            prop_assert!(b[0] >= 1.0);
        }

        #[test]
        fn analytic_jacobians_match_finite_differences(
            rho in 0.01f64..0.98, p1 in 0.5f64..20.0, p2 in 0.1f64..10.0,
        ) {
            let c = c();
            for (m, theta) in [
                (Model::iac(c), vec![rho, p1, p2]),
                (Model::cac(c), vec![rho, p1, p2]),
                (Model::semi(c, rho), vec![p2, p1]),
            ] {
                let diff = (m.jacobian(&theta).unwrap() - fd_jacobian(&m, &theta)).abs().max();
                prop_assert!(diff < 1e-6, "{:?}: {}", m.kind, diff);
            }
        }
    }
}
