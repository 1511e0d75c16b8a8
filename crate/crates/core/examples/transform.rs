//! Builds the estimation panel (investment growth, ex-post real rate, log
//! utilization) from raw quarterly/monthly series and writes `panel.csv`.
//!
//! cargo run --example transform [raw_dir]
//!
//! `raw_dir` holds `<name>.csv` for fpi, fpi_deflator, population,
//! gdp_deflator, ffr and capacity_utilization; without it synthetic inputs
//! are used.

mod common;

use std::collections::BTreeMap;
use std::path::Path;

use euler_gmm::data::{build_panel, load_monthly_csv, load_series_csv, required_raw_series, write_panel_csv, TransformSpec};

fn main() -> euler_gmm::Result<()> {
    let spec = TransformSpec::default();
    let raw = match std::env::args().nth(1) {
        Some(dir) => {
            let mut raw = BTreeMap::new();
            for name in required_raw_series(spec.investment_measure) {
                let p = Path::new(&dir).join(format!("{name}.csv"));
                // quarterly `YYYYQn` dates, or monthly ones averaged to quarters
                let s = load_series_csv(&p).or_else(|_| load_monthly_csv(&p))?;
                raw.insert(name.to_owned(), s.with_name(name));
            }
            raw
        }
        None => common::synthetic_raw(212, 1),
    };
    for (name, s) in &raw {
        println!("{name:<22} {} – {} ({} quarters)", s.start(), s.end(), s.len());
    }
    let panel = build_panel(&spec, &raw, &[])?;
    println!("\npanel {} – {} ({} quarters)", panel.start(), panel.end(), panel.len());
    for name in panel.column_names() {
        let v = panel.column(name).expect("listed column");
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let sd = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt();
        println!("  {name:<8} mean {mean:>10.5}  sd {sd:>9.5}");
    }
    let out = common::out_dir("transform").join("panel.csv");
    write_panel_csv(&panel, &out)?;
    println!("\nwrote {}", out.display());
    Ok(())
}
