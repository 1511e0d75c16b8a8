//! Config-driven command-line front end. Exit codes reflect operational
//! health only: a rejected hypothesis is a successful run.

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{
    build_system, load_dataset, render_report, run_estimate, run_grid, run_grid_with, run_misspec, run_report,
    run_transform, EstimateReport, DESIGN_FILE, GRID_STEM, MISSPEC_FILE, PANEL_FILE, REPORT_FILE, TEST_RESULT_FILE,
};
pub use config::{parse_config, RunConfig};

use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "euler-gmm", version, about = "Weak-identification-robust inference for investment Euler equations")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `[output] dir`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for grid points and replications (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Also write the design matrices to `design.csv`.
    #[arg(long, global = true)]
    pub dump_design: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the estimation panel from raw series and write panel.csv.
    Transform,
    /// Evaluate the configured test at `[estimate] theta`.
    Estimate,
    /// Invert the configured test over the parameter grid.
    Grid,
    /// Run the misspecification laboratory.
    Misspec(MisspecArgs),
    /// Summarize the confidence set in the output directory.
    Report,
}

#[derive(Debug, Args, Default)]
pub struct MisspecArgs {
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub zeta: Option<f64>,
    #[arg(long = "T", id = "T")]
    pub t: Option<usize>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl MisspecArgs {
    fn apply(&self, cfg: &mut RunConfig) -> Result<()> {
        let m = &mut cfg.misspec;
        if let Some(g) = self.gamma {
            m.gamma = g;
        }
        if let Some(z) = self.zeta {
            m.zeta_true = z;
        }
        if let Some(t) = self.t {
            m.t = t;
        }
        if let Some(r) = self.reps {
            m.reps = r;
        }
        if let Some(s) = self.seed {
            m.seed = s;
        }
        m.validate()
    }
}

fn load_config(global: &GlobalArgs, required: bool) -> Result<RunConfig> {
    match &global.config {
        Some(p) => parse_config(p),
        None if required => Err(Error::InvalidParameter("this subcommand needs --config <path>".into())),
        None => {
            let mut cfg = RunConfig::default();
            cfg.output.dir = std::env::current_dir().map_err(|e| Error::io(".", e))?.join(&cfg.output.dir);
            Ok(cfg)
        }
    }
}

/// Runs a parsed command line; returns a one-line description of what was written.
pub fn run(cli: &Cli) -> Result<String> {
    let mut cfg = load_config(&cli.global, !matches!(cli.command, Command::Misspec(_)))?;
    if let Some(out) = &cli.global.out {
        cfg.output.dir = out.clone();
    }
    if let Command::Misspec(args) = &cli.command {
        args.apply(&mut cfg)?;
    }
    let out = cfg.output.dir.clone();
    let work = || -> Result<String> {
        match &cli.command {
            Command::Transform => {
                let p = run_transform(&cfg, &out)?;
                Ok(format!("wrote {}", p.display()))
            }
            Command::Estimate => {
                let r = run_estimate(&cfg, &out, cli.global.dump_design)?;
                Ok(format!(
                    "{} = {:.6} (df {}, critical value {:.6}): {} at level {}; wrote {}",
                    r.result.variant,
                    r.result.statistic,
                    r.result.df,
                    r.result.critical_value,
                    if r.result.accept { "accepted" } else { "rejected" },
                    r.result.level,
                    out.join(TEST_RESULT_FILE).display()
                ))
            }
            Command::Grid => {
                let g = run_grid(&cfg, &out, cli.global.dump_design)?;
                let s = crate::confidence::set_summary(&g);
                Ok(format!(
                    "accepted {} of {} lattice points; wrote {}",
                    s.accepted,
                    s.total,
                    out.join(GRID_STEM).with_extension("csv").display()
                ))
            }
            Command::Misspec(_) => {
                let r = run_misspec(&cfg, &out)?;
                Ok(format!(
                    "theta* = {:.6}, MC cov = {:.6} ± {:.6}; wrote {}",
                    r.theta_star,
                    r.monte_carlo_cov.mean,
                    r.monte_carlo_cov.std_error,
                    out.join(MISSPEC_FILE).display()
                ))
            }
            Command::Report => run_report(&cfg, &out),
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.global.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))?;
    pool.install(work)
}

/// Entry point for the binary: parses `args`, runs, prints, and returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(msg) => {
            println!("{msg}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
