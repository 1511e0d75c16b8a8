//! First-stage fits of the two endogenous combinations on the baseline
//! instruments as ρ rises: the instruments weaken at high ρ.
//!
//! cargo run --example first_stage [config.toml | panel.csv]

mod common;

use euler_gmm::inference::first_stage_diagnostics;
use euler_gmm::model::{CalibratedConstants, InstrumentSpec, Model};

fn main() -> euler_gmm::Result<()> {
    let (panel, source) = common::panel_from_args()?;
    let c = CalibratedConstants::default();
    let spec = InstrumentSpec::baseline(&Model::iac(c));
    println!("data: {source}\n");
    for rho in [0.0, 0.4, 0.8, 0.95] {
        for f in first_stage_diagnostics(rho, &panel, &spec, &c)? {
            println!("ρ = {rho:<4}  {:<32} R² = {:.3}", f.name, f.r2);
        }
    }
    Ok(())
}
