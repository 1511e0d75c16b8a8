#![allow(dead_code)]

use std::io::Write;
use std::path::{Path, PathBuf};

use euler_gmm::data::{write_panel_csv, Dataset, QuarterIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn q(s: &str) -> QuarterIndex {
    s.parse().unwrap()
}

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

/// A persistent three-variable panel starting in 1967Q1.
pub fn synthetic_panel(n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let di = ar1(&mut rng, n, 0.4, 0.02, 0.005);
    let rp = ar1(&mut rng, n, 0.9, 0.005, 0.004);
    let u = ar1(&mut rng, n, 0.9, 0.03, 4.4);
    Dataset::new(q("1967Q1"), vec![("delta_i".into(), di), ("r_p".into(), rp), ("u".into(), u)]).unwrap()
}

pub fn write_file(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    if let Some(parent) = p.parent() {
        std::fs::create_dir_all(parent).unwrap();
    }
    std::fs::File::create(&p).unwrap().write_all(text.as_bytes()).unwrap();
    p
}

/// Writes `panel.csv` with `n` quarters into `dir`.
pub fn write_panel(dir: &Path, n: usize, seed: u64) -> PathBuf {
    let p = dir.join("panel.csv");
    write_panel_csv(&synthetic_panel(n, seed), &p).unwrap();
    p
}

fn quarterly_csv(start: QuarterIndex, values: &[f64]) -> String {
    let mut s = String::from("date,value\n");
    for (i, v) in values.iter().enumerate() {
        s.push_str(&format!("{},{v}\n", start.offset(i as i64)));
    }
    s
}

fn monthly_csv(year: i32, values: &[f64]) -> String {
    let mut s = String::from("date,value\n");
    for (i, v) in values.iter().enumerate() {
        s.push_str(&format!("{}-{:02}-01,{v}\n", year + (i / 12) as i32, i % 12 + 1));
    }
    s
}

/// Raw inputs for the fixed-investment measure, `n` quarters from 1967Q1;
/// the policy rate is monthly.
pub fn write_raw_dir(dir: &Path, n: usize, seed: u64) -> PathBuf {
    let raw = dir.join("raw");
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let growth = ar1(&mut rng, n, 0.5, 0.01, 0.01);
    let level: Vec<f64> = growth.iter().scan(100.0, |l, g| {
        *l *= (*g as f64).exp();
        Some(*l)
    }).collect();
    let defl: Vec<f64> = (0..n).map(|i| 30.0 * (0.01 * i as f64).exp()).collect();
    let pop: Vec<f64> = (0..n).map(|i| 130_000.0 + 300.0 * i as f64).collect();
    let ffr: Vec<f64> = ar1(&mut rng, 3 * n, 0.97, 0.3, 5.0);
    let tcu: Vec<f64> = ar1(&mut rng, n, 0.9, 2.0, 80.0);
    let start = q("1967Q1");
    write_file(&raw, "fpi.csv", &quarterly_csv(start, &level));
    write_file(&raw, "fpi_deflator.csv", &quarterly_csv(start, &defl));
    write_file(&raw, "population.csv", &quarterly_csv(start, &pop));
    write_file(&raw, "gdp_deflator.csv", &quarterly_csv(start, &defl));
    write_file(&raw, "ffr.csv", &monthly_csv(1967, &ffr));
    write_file(&raw, "capacity_utilization.csv", &quarterly_csv(start, &tcu));
    raw
}
