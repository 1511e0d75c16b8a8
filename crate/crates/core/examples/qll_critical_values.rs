//! Simulates the null distribution of qLL-S and prints the critical-value
//! table embedded in the library.
//!
//! cargo run --release --example qll_critical_values > crates/core/src/inference/qll_table.rs

use euler_gmm::inference::qll::{empirical_quantile, simulate_null, TABLE_LEVELS};

const T: usize = 500;
const REPS: usize = 100_000;
const SEED: u64 = 20_240_917;

fn main() {
    println!("//! Simulated qLL-S critical values; regenerate with the");
    println!("//! `qll_critical_values` example ({REPS} draws, T = {T}, seed {SEED}).");
    println!();
    println!("/// `(k_z, [q_0.90, q_0.95, q_0.99])` for one included instrument.");
    println!("pub const QLL_CRITICAL_VALUES: &[(usize, [f64; 3])] = &[");
    for kz in 2..=16 {
        let mut d = simulate_null(kz, T, REPS, SEED + kz as u64);
        d.sort_by(f64::total_cmp);
        let q: Vec<String> = TABLE_LEVELS.iter().map(|&p| format!("{:.4}", empirical_quantile(&d, p))).collect();
        println!("    ({kz}, [{}]),", q.join(", "));
        eprintln!("k_z = {kz} done");
    }
    println!("];");
}
