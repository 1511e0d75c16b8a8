//! Downloads the raw inputs from FRED into `data/snapshot/raw/` and writes
//! `data/snapshot/baseline.toml`, the config the snapshot-based tests read.
//!
//! FRED_API_KEY=... cargo run --example fetch_snapshot

use std::path::Path;

use euler_gmm::data::{required_raw_series, write_series_csv, FredClient, InvestmentMeasure, RAW_SERIES};

const FIRST: &str = "1967Q1";
const LAST: &str = "2019Q4";

fn main() -> euler_gmm::Result<()> {
    let client = FredClient::from_env()?;
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/snapshot");
    let raw = root.join("raw");
    std::fs::create_dir_all(&raw).expect("create data/snapshot/raw");
    let (a, b) = (FIRST.parse()?, LAST.parse()?);
    for name in required_raw_series(InvestmentMeasure::SW) {
        let id = RAW_SERIES.iter().find(|(n, _)| *n == name).expect("known raw series").1;
        let s = client.fetch(id)?;
        let w = s.window(a, b).ok_or_else(|| {
            euler_gmm::Error::EmptySample(format!("{id} ({} – {}) does not cover {FIRST}–{LAST}", s.start(), s.end()))
        })?;
        println!("{name:<22} {id:<18} {} quarters", w.len());
        write_series_csv(&w.with_name(name), raw.join(format!("{name}.csv")))?;
    }
    let cfg = root.join("baseline.toml");
    let text = format!(
        "# Raw FRED inputs {FIRST}–{LAST}.\n[data]\nraw_dir = \"raw\"\n\n[model]\nkind = \"IAC\"\n"
    );
    std::fs::write(&cfg, text).expect("write baseline.toml");
    println!("wrote {}", cfg.display());
    Ok(())
}
