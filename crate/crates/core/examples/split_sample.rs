//! Split-sample S with many instruments: the first subsample fits the
//! first stage, the second tests the moments built from it.
//!
//! cargo run --example split_sample [config.toml | panel.csv]

mod common;

use euler_gmm::inference::{evaluate, SplitSpec, Statistic, TestConfig};
use euler_gmm::model::{build_design, CalibratedConstants, InstrumentSpec, Model};

fn main() -> euler_gmm::Result<()> {
    let (panel, source) = common::panel_from_args()?;
    let model = Model::iac(CalibratedConstants::default());
    let theta = [0.5, 2.0, 4.0];
    let split = SplitSpec::default();
    println!("data: {source}; H0: (rho, kappa, zeta) = {theta:?}\n");
    println!("lags  k_z    T   T1   T2    S (crit)           split (crit)");
    for lags in 1..=4 {
        let sys = build_design(&panel, &model, &InstrumentSpec::lags(&model, lags))?;
        let r = split.ranges(sys.t(), sys.kz() - 1)?;
        let s = evaluate(&theta, &sys, &TestConfig::default())?;
        let sp = evaluate(&theta, &sys, &TestConfig::default().with_statistic(Statistic::Split))?;
        println!(
            "{lags:>4} {:>4} {:>4} {:>4} {:>4}  {:>7.3} ({:>6.3}) {}  {:>7.3} ({:>6.3}) {}",
            sys.kz(),
            sys.t(),
            r.t1(),
            r.t2(),
            s.statistic,
            s.critical_value,
            if s.accept { "acc" } else { "rej" },
            sp.statistic,
            sp.critical_value,
            if sp.accept { "acc" } else { "rej" }
        );
    }
    Ok(())
}
