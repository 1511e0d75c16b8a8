//! The triangular-system laboratory: pseudo-true MA root, printed closed
//! forms vs exact moments, and the Monte Carlo bias of the misspecified
//! single-equation slope.
//!
//! cargo run --release --example misspec_lab [gamma]

use euler_gmm::misspec::{run_lab, MisspecConfig};

fn main() -> euler_gmm::Result<()> {
    let gamma = std::env::args().nth(1).map(|a| a.parse().expect("numeric gamma")).unwrap_or(0.4);
    let cfg = MisspecConfig { gamma, ..MisspecConfig::default() };
    let r = run_lab(&cfg)?;
    println!("γ = {gamma}, T = {}, reps = {}", cfg.t, cfg.reps);
    println!("θ* = {:.6} (truncation lag {})", r.theta_star, r.truncation_lag);
    println!("var(ω*)                 {:.6}", r.closed_form.var_omega_star);
    println!("cov(z*, z − z*) closed  {:.6}", r.closed_form.cov_zstar_err);
    println!("cov(z*, z − z*) exact   {:.6}", r.exact.cov_zstar_err);
    println!("cov(z*, z − z*) MC      {:.6} ± {:.6}", r.monte_carlo_cov.mean, r.monte_carlo_cov.std_error);
    if let Some(b) = &r.bias {
        println!("slope, correct regressor     {:.4} ± {:.4} (true {})", b.zeta_hat_correct.mean, b.zeta_hat_correct.std_error, cfg.zeta_true);
        println!(
            "slope, misspecified          {:.4} ± {:.4} (exact plim {:.4})",
            b.zeta_hat_misspecified.mean,
            b.zeta_hat_misspecified.std_error,
            r.exact.plim_ratio * cfg.zeta_true
        );
    }
    Ok(())
}
