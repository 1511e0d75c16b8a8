//! Identification versus misspecification: an AR(1) driver fitted as an
//! MA(1), and the omitted-variable bias this induces in a system approach.
//!
//! `x_t = γ x_{t−1} + ω_t`; the MA(1) fit has the invertible pseudo-true root
//! `θ*` solving `γ = θ*/(1+θ*²)` and filtered shock `ω*_t = Σ_j (−θ*)^j x_{t−j}`.
//! With `z_t = γ x_t` and `z*_t = θ* ω*_t`, regressing `y_{t+2} = ζ z_t + e_{t+2}`
//! on `z*_t` is biased whenever `cov(z*, z − z*) ≠ 0`.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MisspecConfig {
    /// AR(1) coefficient of `x_t`, `|γ| < 0.5`.
    pub gamma: f64,
    /// Innovation standard deviation of `ω_t`.
    pub sigma_omega: f64,
    pub zeta_true: f64,
    #[serde(rename = "T")]
    pub t: usize,
    pub reps: usize,
    pub seed: u64,
    /// Standard deviation of the regression noise `e_t`.
    pub noise_sd: f64,
}

impl Default for MisspecConfig {
    fn default() -> Self {
        Self { gamma: 0.4, sigma_omega: 1.0, zeta_true: 1.0, t: 100_000, reps: 10, seed: 12_345, noise_sd: 1.0 }
    }
}

/// Observations discarded before the sample starts.
pub const BURN_IN: usize = 1000;

impl MisspecConfig {
    pub fn validate(&self) -> Result<()> {
        pseudo_true_theta(self.gamma)?;
        if !(self.sigma_omega > 0.0 && self.sigma_omega.is_finite()) {
            return Err(Error::InvalidParameter(format!("sigma_omega must be positive, got {}", self.sigma_omega)));
        }
        if !(self.noise_sd >= 0.0 && self.noise_sd.is_finite()) {
            return Err(Error::InvalidParameter(format!("noise_sd must be nonnegative, got {}", self.noise_sd)));
        }
        if !self.zeta_true.is_finite() {
            return Err(Error::InvalidParameter("zeta_true must be finite".into()));
        }
        if self.reps == 0 {
            return Err(Error::InvalidParameter("reps must be at least 1".into()));
        }
        let j = truncation_lag(pseudo_true_theta(self.gamma)?);
        if self.t < j + 10 {
            return Err(Error::InvalidParameter(format!("T = {} is too short for truncation lag {j}", self.t)));
        }
        Ok(())
    }
}

/// Invertible MA(1) root matching the first autocorrelation `γ`.
pub fn pseudo_true_theta(gamma: f64) -> Result<f64> {
    if !(gamma.abs() < 0.5) {
        return Err(Error::InvalidParameter(format!("|gamma| must be below 0.5 for an invertible root, got {gamma}")));
    }
    if gamma == 0.0 {
        return Ok(0.0);
    }
    // 2γ / (1 + sqrt(1 − 4γ²)) is the same root without cancellation near 0;
    // the factored discriminant is exact for the common grid values of γ
    Ok(2.0 * gamma / (1.0 + ((1.0 - 2.0 * gamma) * (1.0 + 2.0 * gamma)).sqrt()))
}

/// `θ/(1+θ²)`.
pub fn gamma_from_theta(theta: f64) -> f64 {
    theta / (1.0 + theta * theta)
}

/// `J = ceil(ln 1e−12 / ln|θ*|)`; zero when `θ* = 0`.
pub fn truncation_lag(theta: f64) -> usize {
    if theta == 0.0 {
        0
    } else {
        (1e-12f64.ln() / theta.abs().ln()).ceil() as usize
    }
}

fn check_theta(theta: f64) -> Result<f64> {
    if !(theta.abs() < 1.0) {
        return Err(Error::InvalidParameter(format!("|theta*| must be below 1, got {theta}")));
    }
    Ok(gamma_from_theta(theta))
}

/// `var(ω*)` from the AR(2) representation with `a1 = γ − θ*`, `a2 = γθ*`.
pub fn var_omega_star_ar2(theta: f64, sigma2: f64) -> Result<f64> {
    let g = check_theta(theta)?;
    let (a1, a2) = (g - theta, g * theta);
    Ok((1.0 - a2) / (1.0 + a2) * sigma2 / ((1.0 - a2).powi(2) - a1 * a1))
}

/// `var(ω*) = (1−γθ*)σ² / [(1+γθ*)(1−γ²)(1−θ*²)]`.
pub fn var_omega_star(theta: f64, sigma2: f64) -> Result<f64> {
    let g = check_theta(theta)?;
    Ok((1.0 - g * theta) * sigma2 / ((1.0 + g * theta) * (1.0 - g * g) * (1.0 - theta * theta)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PseudoTrueValues {
    pub theta_star: f64,
    pub var_omega_star: f64,
    pub cov_zstar_err: f64,
}

/// Closed-form values with the covariance
/// `σ² θ*² (2−θ*⁴)(θ*²+1)² / [(1−θ*²)(1−θ*+θ*²)(1+θ*+θ*²)(1+2θ*²)]`.
///
/// This expression does not match simulation (see [`exact_moments`]); it is
/// kept so the discrepancy can be reported.
pub fn closed_form_cov(theta: f64, sigma2: f64) -> Result<PseudoTrueValues> {
    check_theta(theta)?;
    let t2 = theta * theta;
    let num = sigma2 * t2 * (2.0 - t2 * t2) * (t2 + 1.0).powi(2);
    let den = (1.0 - t2) * (1.0 - theta + t2) * (1.0 + theta + t2) * (1.0 + 2.0 * t2);
    Ok(PseudoTrueValues { theta_star: theta, var_omega_star: var_omega_star(theta, sigma2)?, cov_zstar_err: num / den })
}

/// `1 + cov(z*, z−z*)/var(z*)` scaled by `ζ`, using [`closed_form_cov`].
pub fn closed_form_plim(theta: f64, sigma2: f64, zeta: f64) -> Result<f64> {
    let v = closed_form_cov(theta, sigma2)?;
    if theta == 0.0 {
        return Ok(zeta);
    }
    Ok(zeta * (1.0 + v.cov_zstar_err / (theta * theta * v.var_omega_star)))
}

/// Population second moments derived directly from the AR(1) autocovariances
/// `γ_x(j) = σ² γ^j / (1−γ²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactMoments {
    /// `cov(z*, z) = σ² γ θ* / [(1−γ²)(1+γθ*)]`.
    pub cov_zstar_z: f64,
    /// `var(z*) = θ*² var(ω*)`.
    pub var_zstar: f64,
    /// `cov(z*, z − z*) = cov(z*, z) − var(z*)`, which equals `−θ*² var(z*)`.
    pub cov_zstar_err: f64,
    /// Probability limit of the misspecified slope per unit `ζ`: `1 − θ*²`.
    pub plim_ratio: f64,
}

pub fn exact_moments(theta: f64, sigma2: f64) -> Result<ExactMoments> {
    let g = check_theta(theta)?;
    let cov_zstar_z = sigma2 * g * theta / ((1.0 - g * g) * (1.0 + g * theta));
    let var_zstar = theta * theta * var_omega_star(theta, sigma2)?;
    let cov_zstar_err = cov_zstar_z - var_zstar;
    let plim_ratio = if var_zstar > 0.0 { cov_zstar_z / var_zstar } else { 1.0 };
    Ok(ExactMoments { cov_zstar_z, var_zstar, cov_zstar_err, plim_ratio })
}

/// One simulated path. Moment computations use indices `skip..`.
#[derive(Debug, Clone, PartialEq)]
pub struct MisspecSeries {
    pub x: Vec<f64>,
    pub omega: Vec<f64>,
    pub z: Vec<f64>,
    pub omega_star: Vec<f64>,
    pub z_star: Vec<f64>,
    /// Regression noise `e_t`.
    pub e: Vec<f64>,
    /// Truncation lag `J`; the first `J` observations are excluded.
    pub skip: usize,
}

/// Simulates replication `rep` (an independent stream of the seeded generator).
pub fn simulate_dgp_rep(cfg: &MisspecConfig, rep: u64) -> Result<MisspecSeries> {
    cfg.validate()?;
    let theta = pseudo_true_theta(cfg.gamma)?;
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    rng.set_stream(rep);
    let n = cfg.t + BURN_IN;
    let draws: Vec<f64> = (0..n).map(|_| { let u: f64 = StandardNormal.sample(&mut rng); cfg.sigma_omega * u }).collect();
    let e: Vec<f64> = (0..cfg.t).map(|_| { let u: f64 = StandardNormal.sample(&mut rng); cfg.noise_sd * u }).collect();

    let mut x = Vec::with_capacity(cfg.t);
    let mut xt = 0.0;
    for (i, w) in draws.iter().enumerate() {
        xt = cfg.gamma * xt + w;
        if i >= BURN_IN {
            x.push(xt);
        }
    }
    let omega = draws[BURN_IN..].to_vec();
    let z = x.iter().map(|v| cfg.gamma * v).collect();
    // ω*_t = x_t − θ* ω*_{t−1}, i.e. the backward sum cut at the sample start;
    // beyond J lags the omitted terms are below 1e−12 in relative weight
    let mut omega_star = Vec::with_capacity(cfg.t);
    let mut prev = 0.0;
    for v in &x {
        prev = v - theta * prev;
        omega_star.push(prev);
    }
    let z_star = omega_star.iter().map(|v| theta * v).collect();
    Ok(MisspecSeries { x, omega, z, omega_star, z_star, e, skip: truncation_lag(theta) })
}

/// First replication of the configured simulation.
pub fn simulate_dgp(cfg: &MisspecConfig) -> Result<MisspecSeries> {
    simulate_dgp_rep(cfg, 0)
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn cov(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (mean(a), mean(b));
    a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / a.len() as f64
}

/// Sample lag-`k` autocorrelation.
pub fn autocorrelation(v: &[f64], k: usize) -> f64 {
    let m = mean(v);
    let den: f64 = v.iter().map(|x| (x - m).powi(2)).sum();
    let num: f64 = (k..v.len()).map(|t| (v[t] - m) * (v[t - k] - m)).sum();
    num / den
}

/// Mean over replications and its standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub per_rep: Vec<f64>,
}

impl McEstimate {
    fn from_reps(per_rep: Vec<f64>) -> Self {
        let n = per_rep.len() as f64;
        let m = mean(&per_rep);
        let sd = if per_rep.len() > 1 { (per_rep.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt() } else { 0.0 };
        Self { mean: m, std_error: sd / n.sqrt(), per_rep }
    }

    /// `|mean − target|` in standard errors.
    pub fn z_score(&self, target: f64) -> f64 {
        if self.std_error > 0.0 {
            (self.mean - target).abs() / self.std_error
        } else if self.mean == target {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

fn replicate<F: Fn(&MisspecSeries) -> Result<f64> + Sync>(cfg: &MisspecConfig, f: F) -> Result<McEstimate> {
    cfg.validate()?;
    let per_rep = (0..cfg.reps as u64).into_par_iter().map(|r| simulate_dgp_rep(cfg, r).and_then(|s| f(&s))).collect::<Result<Vec<_>>>()?;
    Ok(McEstimate::from_reps(per_rep))
}

/// Monte Carlo estimate of `cov(z*, z − z*)`.
pub fn monte_carlo_cov(cfg: &MisspecConfig) -> Result<McEstimate> {
    replicate(cfg, |s| {
        let k = s.skip;
        let err: Vec<f64> = s.z[k..].iter().zip(&s.z_star[k..]).map(|(a, b)| a - b).collect();
        Ok(cov(&s.z_star[k..], &err))
    })
}

fn slope(y: &[f64], x: &[f64]) -> Result<f64> {
    let v = cov(x, x);
    if !(v > 0.0) {
        return Err(Error::InvalidParameter("regressor has zero variance".into()));
    }
    Ok(cov(x, y) / v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasDemo {
    /// Slope of `y_{t+2}` on `z*_t`.
    pub zeta_hat_misspecified: McEstimate,
    /// Slope of `y_{t+2}` on `z_t`.
    pub zeta_hat_correct: McEstimate,
    /// `ζ (1 + cov/var)` with the closed-form covariance.
    pub theoretical_plim: f64,
    /// `ζ (1 − θ*²)` from the exact moments.
    pub exact_plim: f64,
}

/// Regresses `y_{t+2} = ζ z_t + e_{t+2}` on `z*_t` and on `z_t`.
pub fn bias_demo(cfg: &MisspecConfig) -> Result<BiasDemo> {
    let theta = pseudo_true_theta(cfg.gamma)?;
    let s2 = cfg.sigma_omega.powi(2);
    let regress = |use_star: bool| {
        replicate(cfg, move |s| {
            let k = s.skip;
            let n = s.z.len() - 2;
            let y: Vec<f64> = (k..n).map(|t| cfg.zeta_true * s.z[t] + s.e[t + 2]).collect();
            let x = if use_star { &s.z_star[k..n] } else { &s.z[k..n] };
            slope(&y, x)
        })
    };
    // γ = 0 makes z and z* identically zero: a degenerate-variance error
    let correct = regress(false)?;
    Ok(BiasDemo {
        zeta_hat_misspecified: regress(true)?,
        zeta_hat_correct: correct,
        theoretical_plim: closed_form_plim(theta, s2, cfg.zeta_true)?,
        exact_plim: cfg.zeta_true * exact_moments(theta, s2)?.plim_ratio,
    })
}

/// Everything the lab reports for one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MisspecReport {
    pub config: MisspecConfig,
    pub theta_star: f64,
    pub truncation_lag: usize,
    pub closed_form: PseudoTrueValues,
    pub exact: ExactMoments,
    pub monte_carlo_cov: McEstimate,
    /// `None` when the regressors are degenerate (γ = 0).
    pub bias: Option<BiasDemo>,
}

pub fn run_lab(cfg: &MisspecConfig) -> Result<MisspecReport> {
    cfg.validate()?;
    let theta = pseudo_true_theta(cfg.gamma)?;
    let s2 = cfg.sigma_omega.powi(2);
    Ok(MisspecReport {
        config: *cfg,
        theta_star: theta,
        truncation_lag: truncation_lag(theta),
        closed_form: closed_form_cov(theta, s2)?,
        exact: exact_moments(theta, s2)?,
        monte_carlo_cov: monte_carlo_cov(cfg)?,
        bias: if cfg.gamma == 0.0 { None } else { Some(bias_demo(cfg)?) },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg(gamma: f64, t: usize, reps: usize) -> MisspecConfig {
        MisspecConfig { gamma, t, reps, ..MisspecConfig::default() }
    }

    #[test]
    fn pseudo_true_root() {
        assert_eq!(pseudo_true_theta(0.0).unwrap(), 0.0);
        assert!((pseudo_true_theta(0.4).unwrap() - 0.5).abs() < 1e-15);
        assert!(pseudo_true_theta(0.5).is_err());
        assert!(pseudo_true_theta(-0.5).is_err());
        assert!(pseudo_true_theta(f64::NAN).is_err());
    }

    proptest! {
        #[test]
        fn gamma_round_trip(g in -0.4999f64..0.4999) {
            let th = pseudo_true_theta(g).unwrap();
            prop_assert!(th.abs() < 1.0);
            prop_assert!((gamma_from_theta(th) - g).abs() < 1e-12);
        }

        #[test]
        fn variance_forms_agree(th in -0.95f64..0.95, s2 in 0.1f64..5.0) {
            let a = var_omega_star_ar2(th, s2).unwrap();
            let b = var_omega_star(th, s2).unwrap();
            prop_assert!((a - b).abs() < 1e-12 * a.max(1.0));
        }
    }

    #[test]
    fn closed_form_values() {
        let v = closed_form_cov(0.5, 1.0).unwrap();
        assert!((v.var_omega_star - 1.058201).abs() < 5e-7);
        // the printed expression evaluates to 0.5125661…
        assert!((v.cov_zstar_err - 0.5125661).abs() < 5e-8);
        assert!((closed_form_plim(0.5, 1.0, 1.0).unwrap() - 2.9375).abs() < 1e-4);
        assert_eq!(closed_form_cov(0.0, 1.0).unwrap().cov_zstar_err, 0.0);
        let v4 = closed_form_cov(0.5, 4.0).unwrap();
        assert!((v4.var_omega_star - 4.0 * v.var_omega_star).abs() < 1e-12);
        assert!((v4.cov_zstar_err - 4.0 * v.cov_zstar_err).abs() < 1e-12);
        assert!(closed_form_cov(1.0, 1.0).is_err());
    }

    #[test]
    fn exact_values() {
        let m = exact_moments(0.5, 1.0).unwrap();
        assert!((m.cov_zstar_err + 0.066138).abs() < 1e-6);
        assert!((m.cov_zstar_err + 0.25 * m.var_zstar).abs() < 1e-12);
        assert!((m.plim_ratio - 0.75).abs() < 1e-12);
    }

    #[test]
    fn simulation_determinism_and_white_noise_case() {
        let c = cfg(0.4, 2000, 2);
        assert_eq!(simulate_dgp(&c).unwrap(), simulate_dgp(&c).unwrap());
        assert_ne!(simulate_dgp_rep(&c, 0).unwrap().x, simulate_dgp_rep(&c, 1).unwrap().x);
        let w = simulate_dgp(&cfg(0.0, 500, 1)).unwrap();
        assert_eq!(w.x, w.omega);
        assert!(w.z.iter().all(|&v| v == 0.0));
        assert_eq!(w.skip, 0);
        assert_eq!(truncation_lag(0.5), 40);
    }

    #[test]
    fn ar1_autocorrelation() {
        let s = simulate_dgp(&cfg(0.4, 200_000, 1)).unwrap();
        assert!((autocorrelation(&s.x, 1) - 0.4).abs() < 0.005);
    }

    #[test]
    fn monte_carlo_matches_exact_moments() {
        for g in [-0.45, -0.3, -0.1, 0.1, 0.3, 0.4, 0.45] {
            let c = cfg(g, 20_000, 20);
            let th = pseudo_true_theta(g).unwrap();
            let mc = monte_carlo_cov(&c).unwrap();
            let exact = exact_moments(th, 1.0).unwrap().cov_zstar_err;
            assert!(mc.z_score(exact) < 3.0, "γ = {g}: {} ± {} vs {exact}", mc.mean, mc.std_error);
        }
    }

    #[test]
    fn closed_form_cov_differs_from_simulation() {
        let mc = monte_carlo_cov(&cfg(0.4, 100_000, 10)).unwrap();
        let printed = closed_form_cov(0.5, 1.0).unwrap().cov_zstar_err;
        assert!(mc.z_score(printed) > 100.0);
        assert!(mc.mean < 0.0);
    }

    #[test]
    fn covariance_scales_with_variance() {
        let a = monte_carlo_cov(&cfg(0.3, 5000, 3)).unwrap();
        let b = monte_carlo_cov(&MisspecConfig { sigma_omega: 2.0, ..cfg(0.3, 5000, 3) }).unwrap();
        assert!((b.mean / a.mean - 4.0).abs() < 1e-9);
        let z = monte_carlo_cov(&cfg(0.0, 5000, 5)).unwrap();
        assert_eq!(z.mean, 0.0);
    }

    #[test]
    fn bias_demonstration() {
        let d = bias_demo(&cfg(0.4, 50_000, 10)).unwrap();
        assert!(d.zeta_hat_correct.z_score(1.0) < 3.0);
        assert!(d.zeta_hat_misspecified.z_score(d.exact_plim) < 3.0);
        assert!((d.exact_plim - 0.75).abs() < 1e-12);
        // the bias is toward zero for both signs of γ
        let neg = bias_demo(&cfg(-0.4, 50_000, 10)).unwrap();
        assert!(neg.zeta_hat_misspecified.z_score(0.75) < 3.0);
        assert!(matches!(bias_demo(&cfg(0.0, 1000, 2)), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn invalid_configs() {
        assert!(cfg(0.5, 1000, 1).validate().is_err());
        assert!(cfg(0.4, 1000, 0).validate().is_err());
        assert!(cfg(0.4, 20, 1).validate().is_err());
        assert!(MisspecConfig { sigma_omega: 0.0, ..MisspecConfig::default() }.validate().is_err());
    }
}
