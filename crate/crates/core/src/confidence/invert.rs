use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{make_grid, GridSpec};
use crate::error::{Error, Result};
use crate::inference::{evaluate, TestConfig, TestResult};
use crate::model::MomentSystem;

/// A test statistic evaluated at one parameter point and level.
pub trait Evaluator: Sync {
    fn evaluate(&self, point: &[f64], level: f64) -> Result<TestResult>;
}

impl<F> Evaluator for F
where
    F: Fn(&[f64], f64) -> Result<TestResult> + Sync,
{
    fn evaluate(&self, point: &[f64], level: f64) -> Result<TestResult> {
        self(point, level)
    }
}

/// Evaluates a configured test on a fixed moment system.
#[derive(Debug, Clone)]
pub struct SystemEvaluator {
    pub sys: MomentSystem,
    pub cfg: TestConfig,
}

impl Evaluator for SystemEvaluator {
    fn evaluate(&self, point: &[f64], level: f64) -> Result<TestResult> {
        evaluate(point, &self.sys, &self.cfg.with_level(level))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Serial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub coords: Vec<f64>,
    pub statistic: f64,
    pub df: usize,
    pub critical_value: f64,
    pub accept: bool,
    /// Why the evaluator failed here; such points are rejected.
    pub error: Option<String>,
}

/// Descriptive metadata carried into exports.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GridMetadata {
    pub model: Option<String>,
    /// Parameters held fixed on this grid, exported as leading columns.
    #[serde(default)]
    pub fixed: Vec<(String, f64)>,
    pub sample_start: Option<String>,
    pub sample_end: Option<String>,
    pub observations: Option<usize>,
    #[serde(default)]
    pub instruments: Vec<String>,
    pub bandwidth: Option<usize>,
    /// Effective run configuration.
    #[serde(default)]
    pub config: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceGrid {
    pub param_names: Vec<String>,
    pub spec: GridSpec,
    pub level: f64,
    pub variant: String,
    /// Lattice points first, then extra points.
    pub points: Vec<GridPoint>,
    pub n_lattice: usize,
    pub metadata: GridMetadata,
}

impl ConfidenceGrid {
    pub fn lattice(&self) -> &[GridPoint] {
        &self.points[..self.n_lattice]
    }

    pub fn extras(&self) -> &[GridPoint] {
        &self.points[self.n_lattice..]
    }

    pub fn accepted(&self) -> impl Iterator<Item = &GridPoint> {
        self.points.iter().filter(|p| p.accept)
    }
}

/// Inverts `test` over the lattice in parallel.
pub fn invert_test<E: Evaluator + ?Sized>(test: &E, spec: &GridSpec, level: f64) -> Result<ConfidenceGrid> {
    invert_test_with(test, spec, level, Execution::Parallel)
}

/// Inverts `test` over the lattice. Every point is evaluated once and results
/// are stored by lattice index, so the output does not depend on scheduling.
/// Failing points are recorded as rejected; more than half failing aborts.
pub fn invert_test_with<E: Evaluator + ?Sized>(test: &E, spec: &GridSpec, level: f64, exec: Execution) -> Result<ConfidenceGrid> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidParameter(format!("level must lie in (0,1), got {level}")));
    }
    let pts = make_grid(spec)?;
    let eval = |p: &Vec<f64>| (p.clone(), test.evaluate(p, level));
    let raw: Vec<(Vec<f64>, Result<TestResult>)> = match exec {
        Execution::Parallel => pts.par_iter().map(eval).collect(),
        Execution::Serial => pts.iter().map(eval).collect(),
    };

    let total = raw.len();
    let failed = raw.iter().filter(|(_, r)| r.is_err()).count();
    if 2 * failed > total {
        let first = raw
            .iter()
            .find_map(|(p, r)| r.as_ref().err().map(|e| format!("at {p:?}: {e}")))
            .unwrap_or_default();
        return Err(Error::GridAborted { failed, total, first });
    }
    let variant = raw.iter().find_map(|(_, r)| r.as_ref().ok().map(|t| t.variant.to_string())).unwrap_or_default();
    let bandwidth = raw.iter().find_map(|(_, r)| r.as_ref().ok().map(|t| t.bandwidth));
    let points = raw
        .into_iter()
        .map(|(coords, r)| match r {
            Ok(t) => GridPoint { coords, statistic: t.statistic, df: t.df, critical_value: t.critical_value, accept: t.accept, error: None },
            Err(e) => GridPoint { coords, statistic: f64::NAN, df: 0, critical_value: f64::NAN, accept: false, error: Some(e.to_string()) },
        })
        .collect();
    Ok(ConfidenceGrid {
        param_names: spec.names(),
        spec: spec.clone(),
        level,
        variant,
        points,
        n_lattice: spec.lattice_size(),
        metadata: GridMetadata { bandwidth, ..GridMetadata::default() },
    })
}
