//! Monte Carlo null rejection rates of S, qLL-S and split-sample S under the
//! default simulation design (weak first stage, MA(2) errors).
//!
//! cargo run --release --example size_study [reps]

use euler_gmm::inference::{evaluate, Statistic, TestConfig};
use euler_gmm::sim::{rejection_rate, SimDesign};

fn main() {
    let reps: usize = std::env::args().nth(1).map(|a| a.parse().expect("integer reps")).unwrap_or(2000);
    let designs = [
        ("3 instruments, T=200", SimDesign::default()),
        ("3 instruments, T=1000", SimDesign { t: 1000, ..SimDesign::default() }),
        ("12 instruments, T=200", SimDesign { n_instruments: 12, ..SimDesign::default() }),
        ("3 instruments, iid errors", SimDesign { ma: [0.0, 0.0], ..SimDesign::default() }),
    ];
    println!("nominal level 0.10, {reps} replications\n");
    println!("{:<28} {:>14} {:>14} {:>14}", "design", "S", "qLL-S", "split");
    for (label, d) in designs {
        let cells: Vec<String> = [Statistic::S, Statistic::Qll, Statistic::Split]
            .iter()
            .map(|&stat| {
                let cfg = TestConfig::default().with_statistic(stat);
                let r = rejection_rate(&d, reps, 1, |th, sys| evaluate(th, sys, &cfg));
                let err = if r.errors > 0 { format!(" ({} err)", r.errors) } else { String::new() };
                format!("{:.3}±{:.3}{err}", r.rate, r.std_error())
            })
            .collect();
        println!("{label:<28} {:>14} {:>14} {:>14}", cells[0], cells[1], cells[2]);
    }
}
