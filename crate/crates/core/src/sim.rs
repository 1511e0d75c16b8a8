//! Simulated moment systems for size and power studies.
//!
//! Regressors follow a linear first stage `Y = c_y + Z Π + η`; the first
//! column is then solved so that `Y b(θ0) = c + ε` holds exactly, with `ε`
//! an MA(2) process correlated with `η` but independent of the instruments.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::Result;
use crate::inference::TestResult;
use crate::model::{CalibratedConstants, Model, MomentSystem};

#[derive(Debug, Clone)]
pub struct SimDesign {
    pub model: Model,
    pub theta0: Vec<f64>,
    pub t: usize,
    /// Number of excluded instruments.
    pub n_instruments: usize,
    /// Scale of the first-stage coefficients (small = weak instruments).
    pub first_stage: f64,
    /// AR(1) coefficient of each instrument.
    pub instrument_ar: f64,
    /// MA coefficients of the structural error.
    pub ma: [f64; 2],
    /// Loading of the regressor noise on the structural shock.
    pub endogeneity: f64,
    /// Intercept of the moment condition.
    pub constant: f64,
    /// `ε_t += break_size · Z_{1t}` in the first half and `−break_size · Z_{1t}` in the second.
    pub break_size: f64,
    /// Rows discarded at the start of each draw.
    pub burn_in: usize,
}

impl Default for SimDesign {
    fn default() -> Self {
        Self {
            model: Model::iac(CalibratedConstants::default()),
            theta0: vec![0.5, 2.0, 4.0],
            t: 200,
            n_instruments: 3,
            first_stage: 0.05,
            instrument_ar: 0.5,
            ma: [0.5, 0.3],
            endogeneity: 0.8,
            constant: 0.1,
            break_size: 0.0,
            burn_in: 100,
        }
    }
}

impl SimDesign {
    /// One draw; replication `rep` uses its own stream of the seeded generator.
    pub fn draw(&self, seed: u64, rep: u64) -> Result<MomentSystem> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(rep);
        let n = self.t + self.burn_in;
        let k = self.n_instruments;
        let m = self.model.regressors().len();
        let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };

        let mut z = DMatrix::zeros(n, k);
        for j in 0..k {
            let mut x = 0.0;
            for t in 0..n {
                x = self.instrument_ar * x + normal();
                z[(t, j)] = x;
            }
        }
        let u: Vec<f64> = (0..n + 2).map(|_| normal()).collect();
        let mut eps: Vec<f64> = (0..n).map(|t| u[t + 2] + self.ma[0] * u[t + 1] + self.ma[1] * u[t]).collect();
        if self.break_size != 0.0 && k > 0 {
            for (t, e) in eps.iter_mut().enumerate().skip(self.burn_in) {
                let sign = if t - self.burn_in < self.t / 2 { 1.0 } else { -1.0 };
                *e += sign * self.break_size * z[(t, 0)];
            }
        }
        let pi = DMatrix::from_fn(k, m, |_, _| self.first_stage * normal());
        let mut y = &z * pi;
        for t in 0..n {
            for j in 0..m {
                y[(t, j)] += self.endogeneity * u[t + 2] + normal();
            }
        }
        let b = self.model.coefficients(&self.theta0)?;
        for t in 0..n {
            let rest: f64 = (1..m).map(|j| b[j] * y[(t, j)]).sum();
            y[(t, 0)] = (self.constant + eps[t] - rest) / b[0];
        }
        let y = y.rows(self.burn_in, self.t).into_owned();
        let z = z.rows(self.burn_in, self.t).into_owned();
        MomentSystem::from_parts(self.model, y, z)
    }
}

/// Outcome of a rejection-rate study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RejectionRate {
    pub rate: f64,
    pub reps: usize,
    pub errors: usize,
}

impl RejectionRate {
    /// Binomial standard error of the rate.
    pub fn std_error(&self) -> f64 {
        (self.rate * (1.0 - self.rate) / self.reps as f64).sqrt()
    }
}

/// Rejection frequency of `test` evaluated at the design's `θ0` over
/// `reps` draws. Draws where the test errors count as non-rejections and
/// are reported separately.
pub fn rejection_rate<F>(design: &SimDesign, reps: usize, seed: u64, test: F) -> RejectionRate
where
    F: Fn(&[f64], &MomentSystem) -> Result<TestResult> + Sync,
{
    let out: Vec<Option<bool>> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let sys = design.draw(seed, rep as u64).ok()?;
            test(&design.theta0, &sys).ok().map(|r| !r.accept)
        })
        .collect();
    let errors = out.iter().filter(|o| o.is_none()).count();
    let rejections = out.iter().filter(|o| **o == Some(true)).count();
    RejectionRate { rate: rejections as f64 / reps as f64, reps, errors }
}

/// Residual combination `Y b(θ)` of a simulated system; handy for checks.
pub fn combination(sys: &MomentSystem, theta: &[f64]) -> Result<DVector<f64>> {
    sys.fitted_combination(theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ols;

    #[test]
    fn combination_is_constant_plus_ma2() {
        let d = SimDesign::default();
        let sys = d.draw(1, 0).unwrap();
        let e = combination(&sys, &d.theta0).unwrap();
        assert_eq!(e.len(), 200);
        assert!((e.mean() - d.constant).abs() < 0.4);
        // lag-3 autocorrelation of an MA(2) is zero in population
        let c = e.add_scalar(-e.mean());
        let ac = |l: usize| (l..c.len()).map(|t| c[t] * c[t - l]).sum::<f64>() / c.norm_squared();
        assert!(ac(1) > 0.2 && ac(3).abs() < 0.2);
    }

    #[test]
    fn deterministic_and_stream_separated() {
        let d = SimDesign::default();
        assert_eq!(d.draw(7, 3).unwrap().y, d.draw(7, 3).unwrap().y);
        assert_ne!(d.draw(7, 3).unwrap().y, d.draw(7, 4).unwrap().y);
    }

    #[test]
    fn instruments_exogenous_in_large_sample() {
        let d = SimDesign { t: 20_000, ..SimDesign::default() };
        let sys = d.draw(2, 0).unwrap();
        let e = combination(&sys, &d.theta0).unwrap();
        let coef = ols(&sys.z, &DMatrix::from_column_slice(e.len(), 1, e.as_slice())).unwrap();
        for j in 1..sys.kz() {
            assert!(coef[(j, 0)].abs() < 0.05);
        }
    }
}
