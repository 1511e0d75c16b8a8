mod common;

use std::path::Path;
use std::process::Command;

use common::{write_file, write_panel, write_raw_dir};
use euler_gmm::cli::{
    main_with_args, parse_config, run_estimate, run_grid, run_grid_with, run_report, run_transform, EstimateReport,
    GRID_STEM, TEST_RESULT_FILE,
};
use euler_gmm::confidence::{read_grid_csv, Axis, GridMetadata, GridSpec};
use euler_gmm::data::{build_panel, load_panel_csv};
use euler_gmm::inference::{chi2_quantile, TestResult, Variant};
use euler_gmm::Result;

const BIN: &str = env!("CARGO_BIN_EXE_euler-gmm");

fn baseline_config(dir: &Path, extra: &str) -> std::path::PathBuf {
    write_panel(dir, 212, 7);
    write_file(
        dir,
        "run.toml",
        &format!("[data]\npanel = \"panel.csv\"\n\n[model]\nkind = \"IAC\"\n\n[estimate]\ntheta = [0.5, 2.0, 4.0]\n{extra}"),
    )
}

#[test]
fn stub_evaluator_grid_accepts_every_point() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = baseline_config(dir.path(), "");
    let cfg = parse_config(&cfg_path).unwrap();
    let spec = GridSpec::new(vec![Axis::new("a", 0.0, 1.0, 3)]);
    let stub = |_: &[f64], level: f64| -> Result<TestResult> {
        Ok(TestResult {
            statistic: 0.0,
            df: 3,
            critical_value: chi2_quantile(3, level)?,
            level,
            accept: true,
            d_hat: None,
            bandwidth: 0,
            variant: Variant::S,
            ridged: false,
        })
    };
    let out = dir.path().join("out");
    run_grid_with(&stub, &spec, &cfg, GridMetadata::default(), &out).unwrap();
    let (header, rows) = read_grid_csv(out.join("grid.csv")).unwrap();
    assert_eq!(header, ["a", "stat", "df", "crit", "accept", "error"]);
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.accept && !r.error));
    let side: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("grid.json")).unwrap()).unwrap();
    assert_eq!(side["metadata"]["config"]["model"]["beta"], 0.99);
}

#[test]
fn estimate_reports_df_and_critical_value() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = parse_config(baseline_config(dir.path(), "")).unwrap();
    let out = dir.path().join("out");
    let r = run_estimate(&cfg, &out, true).unwrap();
    assert_eq!(r.result.df, 3);
    assert!((r.result.critical_value - 6.25139).abs() < 1e-5);
    assert!(r.result.statistic.is_finite() && r.result.statistic >= 0.0);
    let text = std::fs::read_to_string(out.join(TEST_RESULT_FILE)).unwrap();
    let back: EstimateReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, r);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["config"]["inference"]["bandwidth"], "auto");
    assert_eq!(v["config"]["inference"]["split_gap"], 3);
    assert!(out.join("design.csv").is_file());
}

#[test]
fn estimate_matches_grid_extra_point() {
    let dir = tempfile::tempdir().unwrap();
    for stat in ["S", "qLL", "split"] {
        let extra = format!(
            "\n[inference]\nstatistic = \"{stat}\"\n\n[grid]\nextra_points = [[0.5, 2.0, 4.0]]\n\
             [[grid.axes]]\nname = \"rho\"\nlower = 0.0\nupper = 0.9\npoints = 2\n\
             [[grid.axes]]\nname = \"kappa\"\nlower = 1.0\nupper = 3.0\npoints = 2\n\
             [[grid.axes]]\nname = \"zeta\"\nlower = 1.0\nupper = 5.0\npoints = 2\n"
        );
        let cfg = parse_config(baseline_config(dir.path(), &extra)).unwrap();
        let out = dir.path().join(format!("out-{stat}"));
        let est = run_estimate(&cfg, &out, false).unwrap();
        let g = run_grid(&cfg, &out, false).unwrap();
        let p = &g.extras()[0];
        assert_eq!(p.coords, vec![0.5, 2.0, 4.0]);
        let rel = (p.statistic - est.result.statistic).abs() / est.result.statistic.abs().max(1.0);
        assert!(rel < 1e-12, "{stat}: grid {} vs estimate {}", p.statistic, est.result.statistic);
        assert_eq!(p.accept, est.result.accept);
    }
}

#[test]
fn grid_exports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let extra = "\n[grid]\n[[grid.axes]]\nname = \"varphi\"\nlower = 0.0\nupper = 1.0\npoints = 4\n\
                 [[grid.axes]]\nname = \"phi\"\nlower = 0.0\nupper = 1.0\npoints = 3\n";
    let path = baseline_config(dir.path(), extra);
    let text = std::fs::read_to_string(&path).unwrap().replace("kind = \"IAC\"", "kind = \"SEMI\"\nrho = 0.3").replace("theta = [0.5, 2.0, 4.0]", "theta = [0.1, 0.2]");
    std::fs::write(&path, text).unwrap();
    let cfg = parse_config(&path).unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    run_grid(&cfg, &a, false).unwrap();
    run_grid(&cfg, &b, false).unwrap();
    for f in ["grid.csv", "grid.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let csv = std::fs::read_to_string(a.join("grid.csv")).unwrap();
    assert!(csv.starts_with("rho,varphi,phi,stat,df,crit,accept,error\n"));
    assert_eq!(csv.lines().count(), 13);
}

#[test]
fn report_summarizes_existing_grid() {
    let dir = tempfile::tempdir().unwrap();
    let extra = "\n[grid]\nliterature_points = true\n[[grid.axes]]\nname = \"rho\"\nlower = 0.0\nupper = 0.5\npoints = 2\n\
                 [[grid.axes]]\nname = \"kappa\"\nlower = 1.0\nupper = 3.0\npoints = 2\n\
                 [[grid.axes]]\nname = \"zeta\"\nlower = 1.0\nupper = 5.0\npoints = 2\n";
    let cfg = parse_config(baseline_config(dir.path(), extra)).unwrap();
    let out = dir.path().join("out");
    let text = run_report(&cfg, &out).unwrap();
    assert!(out.join(format!("{GRID_STEM}.csv")).is_file());
    assert!(text.contains("lattice points"), "{text}");
    assert!(text.contains("Extra points: "), "{text}");
    assert!(text.contains("[inference]"), "{text}");
    assert_eq!(std::fs::read_to_string(out.join("report.txt")).unwrap(), text);
}

#[test]
fn transform_from_raw_inputs_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    write_raw_dir(dir.path(), 60, 3);
    let path = write_file(dir.path(), "t.toml", "[data]\nraw_dir = \"raw\"\nsample = [\"1968Q1\", \"1979Q4\"]\n");
    let cfg = parse_config(&path).unwrap();
    let out = dir.path().join("out");
    let csv = run_transform(&cfg, &out).unwrap();
    let panel = load_panel_csv(&csv).unwrap();
    assert_eq!(panel.start().to_string(), "1968Q1");
    assert_eq!(panel.end().to_string(), "1979Q4");
    assert_eq!(panel.column_names().collect::<Vec<_>>(), ["delta_i", "r_p", "u"]);
    let side: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("panel.json")).unwrap()).unwrap();
    assert_eq!(side["config"]["data"]["rate_scale"], 400.0);

    // same panel as the library pipeline, bit for bit
    let mut raw = std::collections::BTreeMap::new();
    for name in ["fpi", "fpi_deflator", "population", "gdp_deflator", "capacity_utilization"] {
        raw.insert(name.to_owned(), euler_gmm::data::load_series_csv(dir.path().join(format!("raw/{name}.csv"))).unwrap().with_name(name));
    }
    raw.insert("ffr".into(), euler_gmm::data::load_monthly_csv(dir.path().join("raw/ffr.csv")).unwrap().with_name("ffr"));
    let direct = build_panel(&cfg.data.transform_spec(), &raw, &[]).unwrap();
    assert_eq!(direct, panel);
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(BIN).arg("--version").output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains(env!("CARGO_PKG_VERSION")));
    let out = Command::new(BIN).arg("--help").output().unwrap();
    assert!(out.status.success());
    for sub in ["transform", "estimate", "grid", "misspec", "report"] {
        assert!(String::from_utf8_lossy(&out.stdout).contains(sub), "{sub}");
    }

    // missing panel: operational failure naming the path
    let cfg = write_file(dir.path(), "bad.toml", "[data]\npanel = \"missing/panel.csv\"\n");
    let out = Command::new(BIN).args(["estimate", "--config"]).arg(&cfg).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("missing/panel.csv"), "{err}");

    // a rejected hypothesis is still a successful run
    let cfg = baseline_config(dir.path(), "");
    let text = std::fs::read_to_string(&cfg).unwrap().replace("theta = [0.5, 2.0, 4.0]", "theta = [0.99, 0.01, 10.0]");
    std::fs::write(&cfg, text).unwrap();
    let outdir = dir.path().join("rej");
    let out = Command::new(BIN).args(["estimate", "--threads", "2", "--config"]).arg(&cfg).arg("--out").arg(&outdir).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(outdir.join(TEST_RESULT_FILE).is_file());
}

#[test]
fn misspec_subcommand_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lab");
    let code = main_with_args([
        "euler-gmm", "misspec", "--gamma", "0.4", "--zeta", "2", "--T", "5000", "--reps", "3", "--seed", "9", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("misspec_report.json")).unwrap()).unwrap();
    assert_eq!(v["report"]["theta_star"], 0.5);
    assert_eq!(v["config"]["misspec"]["T"], 5000);
    assert_eq!(v["config"]["misspec"]["zeta_true"], 2.0);
    assert!((v["report"]["bias"]["zeta_hat_correct"]["mean"].as_f64().unwrap() - 2.0).abs() < 0.2);

    // invalid gamma is an operational error
    assert_ne!(main_with_args(["euler-gmm", "misspec", "--gamma", "0.5", "--out", out.to_str().unwrap()]), 0);
}

#[test]
fn config_errors_carry_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_file(dir.path(), "typo.toml", "[model]\nkind = \"IAC\"\n[inference]\nbandwith = 3\n");
    let out = Command::new(BIN).args(["grid", "--config"]).arg(&cfg).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("typo.toml, line 4"), "{err}");
    assert!(err.contains("bandwidth"), "{err}");
}
