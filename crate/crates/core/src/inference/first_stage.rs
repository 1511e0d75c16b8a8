//! First-stage fits of the endogenous combinations on the instruments.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::ols;
use crate::model::{build_design, CalibratedConstants, InstrumentSpec, Model, Var};

/// Actual and fitted values of one combination plus the centered R².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstStageFit {
    pub name: String,
    pub actual: Vec<f64>,
    pub fitted: Vec<f64>,
    pub r2: f64,
}

/// OLS of `actual` on `z` (which should contain the constant).
pub fn first_stage_fit(name: &str, actual: &DVector<f64>, z: &DMatrix<f64>) -> Result<FirstStageFit> {
    let y = DMatrix::from_column_slice(actual.len(), 1, actual.as_slice());
    let coef = ols(z, &y).map_err(|e| Error::Singular(format!("instrument matrix: {e}")))?;
    let fitted = z * coef.column(0);
    let mean = actual.mean();
    let sst: f64 = actual.iter().map(|a| (a - mean).powi(2)).sum();
    let ssr: f64 = actual.iter().zip(fitted.iter()).map(|(a, f)| (a - f).powi(2)).sum();
    let r2 = if sst > 0.0 { 1.0 - ssr / sst } else { 1.0 };
    Ok(FirstStageFit { name: name.to_owned(), actual: actual.iter().copied().collect(), fitted: fitted.iter().copied().collect(), r2 })
}

/// Fits `φ_k u_{t+1} − ρ φ_k u_t` and `r^p_t − ρ r^p_{t−1}` on the
/// instruments over the estimation sample.
pub fn first_stage_diagnostics(
    rho: f64,
    data: &Dataset,
    instruments: &InstrumentSpec,
    c: &CalibratedConstants,
) -> Result<Vec<FirstStageFit>> {
    let model = Model::iac(*c);
    let sys = build_design(data, &model, instruments)?;
    let col = |var: Var, offset: i32| {
        let i = model.regressors().iter().position(|r| r.var == var && r.offset == offset).expect("regressor in model");
        sys.y.column(i).into_owned()
    };
    let util = col(Var::Util, 1) * c.phi_k - col(Var::Util, 0) * (rho * c.phi_k);
    let rate = col(Var::RealRate, 0) - col(Var::RealRate, -1) * rho;
    Ok(vec![
        first_stage_fit("phi_k*u(t+1) - rho*phi_k*u(t)", &util, &sys.z)?,
        first_stage_fit("r_p(t) - rho*r_p(t-1)", &rate, &sys.z)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::QuarterIndex;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn instruments(seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut z = DMatrix::from_fn(80, 4, |_, _| StandardNormal.sample(&mut rng));
        z.column_mut(0).fill(1.0);
        z
    }

    #[test]
    fn perfect_fit() {
        let z = instruments(1);
        let y = &z * DVector::from_vec(vec![0.5, 1.0, -2.0, 0.25]);
        let f = first_stage_fit("y", &y, &z).unwrap();
        assert!((f.r2 - 1.0).abs() < 1e-12);
        assert!(f.actual.iter().zip(&f.fitted).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn orthogonal_fit() {
        let z = instruments(2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let raw = DVector::from_fn(80, |_, _| StandardNormal.sample(&mut rng));
        let coef = ols(&z, &DMatrix::from_column_slice(80, 1, raw.as_slice())).unwrap();
        let y = &raw - &z * coef.column(0);
        let f = first_stage_fit("y", &y, &z).unwrap();
        assert!(f.r2.abs() < 1e-12);
    }

    #[test]
    fn rank_deficient() {
        let mut z = instruments(4);
        let c1 = z.column(1).into_owned();
        z.column_mut(3).copy_from(&c1);
        let y = DVector::from_element(80, 1.0);
        assert!(matches!(first_stage_fit("y", &y, &z), Err(Error::Singular(_))));
    }

    #[test]
    fn diagnostics_on_panel() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 120;
        let mut series = |phi: f64| {
            let mut x = 0.0;
            (0..n).map(|_| {
                let e: f64 = StandardNormal.sample(&mut rng);
                x = phi * x + e;
                x
            }).collect::<Vec<_>>()
        };
        let data = Dataset::new(
            "1970Q1".parse::<QuarterIndex>().unwrap(),
            vec![("delta_i".into(), series(0.3)), ("r_p".into(), series(0.9)), ("u".into(), series(0.95))],
        )
        .unwrap();
        let c = CalibratedConstants::default();
        let model = Model::iac(c);
        let fits = first_stage_diagnostics(0.0, &data, &InstrumentSpec::baseline(&model), &c).unwrap();
        assert_eq!(fits.len(), 2);
        // persistent series are predictable from their own lags at ρ = 0
        assert!(fits[0].r2 > 0.3 && fits[1].r2 > 0.3, "{} {}", fits[0].r2, fits[1].r2);
        assert_eq!(fits[0].actual.len(), 120 - 4);
    }
}
