//! Semi-structural (varphi, phi) confidence sets at several fixed ρ, plus the
//! structural → semi-structural map for the published calibrations.
//!
//! cargo run --release --example semi_structural [config.toml | panel.csv]

mod common;

use euler_gmm::confidence::{invert_test, set_summary, GridSpec, SystemEvaluator};
use euler_gmm::inference::TestConfig;
use euler_gmm::model::literature::CALIBRATIONS;
use euler_gmm::model::{build_design, map_structural_to_semi, CalibratedConstants, InstrumentSpec, Model, ModelKind};

fn main() -> euler_gmm::Result<()> {
    let (panel, source) = common::panel_from_args()?;
    let c = CalibratedConstants::default();
    println!("data: {source}\n");

    println!("calibration → (varphi, phi):");
    for cal in CALIBRATIONS {
        let (varphi, phi) = map_structural_to_semi(cal.kappa, cal.zeta, &c)?;
        println!("  {:<5} κ={:<6} ζ={:<6} varphi {varphi:.4}  phi {phi:.3}", cal.label, cal.kappa, cal.zeta);
    }

    let spec = GridSpec::default_for(ModelKind::SEMI);
    println!("\n90% S sets over varphi∈[0,10] × phi∈[0,20]:");
    for rho in [0.0, 0.3, 0.6, 0.9] {
        let model = Model::semi(c, rho);
        let sys = build_design(&panel, &model, &InstrumentSpec::baseline(&model))?;
        let g = invert_test(&SystemEvaluator { sys, cfg: TestConfig::default() }, &spec, 0.90)?;
        let s = set_summary(&g);
        let span: Vec<String> = s
            .projections
            .iter()
            .map(|p| match (p.min, p.max) {
                (Some(a), Some(b)) => format!("{} [{a:.2}, {b:.2}]", p.name),
                _ => format!("{} empty", p.name),
            })
            .collect();
        let origin = g.lattice().iter().any(|p| p.accept && p.coords == [0.0, 0.0]);
        println!(
            "  ρ = {rho:.1}: {:>5.1}% accepted; {}; contains (0,0): {origin}",
            100.0 * s.accepted_fraction,
            span.join(", ")
        );
    }
    Ok(())
}
