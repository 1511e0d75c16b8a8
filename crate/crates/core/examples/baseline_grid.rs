//! Inverts the S test over the default (ρ, κ, ζ) lattice, adds the published
//! calibrations as extra points, and exports the grid.
//!
//! cargo run --release --example baseline_grid [config.toml | panel.csv]

mod common;

use euler_gmm::confidence::{export_grid, invert_test, set_summary, GridSpec, SystemEvaluator};
use euler_gmm::inference::TestConfig;
use euler_gmm::model::literature::{calibration_points, CALIBRATIONS};
use euler_gmm::model::{build_design, CalibratedConstants, InstrumentSpec, Model, ModelKind};

fn main() -> euler_gmm::Result<()> {
    let (panel, source) = common::panel_from_args()?;
    let model = Model::iac(CalibratedConstants::default());
    let sys = build_design(&panel, &model, &InstrumentSpec::baseline(&model))?;
    let base = GridSpec::default_for(ModelKind::IAC);
    let rhos = base.axes[0].values()?;
    let spec = base.with_extra_points(calibration_points(&rhos));

    let t0 = std::time::Instant::now();
    let g = invert_test(&SystemEvaluator { sys, cfg: TestConfig::default() }, &spec, 0.90)?;
    let s = set_summary(&g);
    println!("data: {source}");
    println!(
        "90% S set: {} of {} lattice points accepted ({:.1}%) in {:.1}s",
        s.accepted,
        s.total,
        100.0 * s.accepted_fraction,
        t0.elapsed().as_secs_f64()
    );
    for p in &s.projections {
        match (p.min, p.max) {
            (Some(a), Some(b)) => println!("  {:<6} [{a:.3}, {b:.3}] of [{:.3}, {:.3}]", p.name, p.axis_min, p.axis_max),
            _ => println!("  {:<6} empty", p.name),
        }
    }
    println!("\nliterature calibrations (accepted at how many ρ):");
    for cal in CALIBRATIONS {
        let hits = g.extras().iter().filter(|p| p.accept && p.coords[1] == cal.kappa && p.coords[2] == cal.zeta).count();
        println!("  {:<5} κ={:<6} ζ={:<6} {hits}/{}", cal.label, cal.kappa, cal.zeta, rhos.len());
    }
    let (csv, json) = export_grid(&g, common::out_dir("baseline_grid").join("grid"))?;
    println!("\nwrote {} and {}", csv.display(), json.display());
    Ok(())
}
