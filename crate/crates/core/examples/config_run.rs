//! Drives the command-line front end from code: writes a run config and a
//! panel, then runs `estimate`, `grid` and `report` as the binary would.
//!
//! cargo run --release --example config_run

mod common;

use euler_gmm::cli::main_with_args;
use euler_gmm::data::write_panel_csv;

const CONFIG: &str = r#"[data]
panel = "panel.csv"

[model]
kind = "IAC"

[inference]
statistic = "S"
level = 0.90
bandwidth = "auto"

[estimate]
theta = [0.5, 2.0, 4.0]

[grid]
literature_points = true

[[grid.axes]]
name = "rho"
lower = 0.0
upper = 0.9
points = 4

[[grid.axes]]
name = "kappa"
lower = 0.5
upper = 20.0
points = 12

[[grid.axes]]
name = "zeta"
lower = 0.5
upper = 10.0
points = 10

[output]
dir = "run"
"#;

fn main() {
    let dir = common::out_dir("config_run");
    write_panel_csv(&common::synthetic_panel(210, 7), dir.join("panel.csv")).expect("write panel");
    let cfg = dir.join("run.toml");
    std::fs::write(&cfg, CONFIG).expect("write config");
    for sub in ["estimate", "grid", "report"] {
        println!("$ euler-gmm {sub} --config {}", cfg.display());
        let code = main_with_args(["euler-gmm", sub, "--config", cfg.to_str().expect("utf-8 path")]);
        println!("(exit {code})\n");
    }
}
