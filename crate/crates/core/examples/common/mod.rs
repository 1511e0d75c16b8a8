//! Shared input handling for the examples: a config or panel path from the
//! command line, or a synthetic panel when none is given.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use euler_gmm::data::{load_panel_csv, Dataset, QuarterIndex, Series};
use euler_gmm::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

fn ar1(rng: &mut ChaCha20Rng, n: usize, phi: f64, sd: f64, mean: f64) -> Vec<f64> {
    let mut x = 0.0;
    (0..n + 50)
        .map(|_| {
            let e: f64 = StandardNormal.sample(rng);
            x = phi * x + sd * e;
            x + mean
        })
        .skip(50)
        .collect()
}

pub fn start() -> QuarterIndex {
    "1967Q1".parse().expect("valid quarter")
}

/// Persistent `delta_i`, `r_p`, `u` panel of `n` quarters from 1967Q1.
pub fn synthetic_panel(n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let di = ar1(&mut rng, n, 0.4, 0.02, 0.005);
    let rp = ar1(&mut rng, n, 0.9, 0.005, 0.004);
    let u = ar1(&mut rng, n, 0.9, 0.03, 4.4);
    Dataset::new(start(), vec![("delta_i".into(), di), ("r_p".into(), rp), ("u".into(), u)]).expect("equal lengths")
}

/// Raw inputs for the fixed-investment measure, `n` quarters from 1967Q1.
pub fn synthetic_raw(n: usize, seed: u64) -> BTreeMap<String, Series> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let growth = ar1(&mut rng, n, 0.5, 0.01, 0.01);
    let level: Vec<f64> = growth
        .iter()
        .scan(100.0, |l, g| {
            *l *= g.exp();
            Some(*l)
        })
        .collect();
    let infl = ar1(&mut rng, n, 0.8, 0.003, 0.008);
    let defl: Vec<f64> = infl
        .iter()
        .scan(30.0, |l, g| {
            *l *= g.exp();
            Some(*l)
        })
        .collect();
    let cols = [
        ("fpi", level),
        ("fpi_deflator", defl.clone()),
        ("population", (0..n).map(|i| 130_000.0 + 300.0 * i as f64).collect()),
        ("gdp_deflator", defl),
        ("ffr", ar1(&mut rng, n, 0.95, 0.6, 5.0)),
        ("capacity_utilization", ar1(&mut rng, n, 0.9, 2.0, 80.0)),
    ];
    cols.into_iter().map(|(k, v)| (k.to_owned(), Series::new(k, start(), v).expect("non-empty"))).collect()
}

/// Panel named by the first command-line argument (a run config `.toml` or a
/// panel `.csv`), else a synthetic 210-quarter panel.
pub fn panel_from_args() -> Result<(Dataset, String)> {
    match std::env::args().nth(1).map(PathBuf::from) {
        Some(p) if p.extension().is_some_and(|e| e == "toml") => {
            let cfg = euler_gmm::cli::parse_config(&p)?;
            Ok((euler_gmm::cli::load_dataset(&cfg)?, p.display().to_string()))
        }
        Some(p) => Ok((load_panel_csv(&p)?, p.display().to_string())),
        None => Ok((synthetic_panel(210, 7), "synthetic panel (pass a config or panel.csv to use real data)".into())),
    }
}

/// `out/examples/<name>`, created on demand.
pub fn out_dir(name: &str) -> PathBuf {
    let d = PathBuf::from("out/examples").join(name);
    std::fs::create_dir_all(&d).expect("create output directory");
    d
}
