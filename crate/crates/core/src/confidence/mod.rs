//! Confidence sets by test inversion over parameter lattices.

mod export;
mod invert;
mod summary;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Model, ModelKind};

pub use export::{export_grid, import_grid, read_grid_csv, GridRow};
pub use invert::{invert_test, invert_test_with, ConfidenceGrid, Evaluator, Execution, GridMetadata, GridPoint, SystemEvaluator};
pub use summary::{set_summary, AxisProjection, MarginalProfile, SetSummary};

fn yes() -> bool {
    true
}

/// One lattice axis. Excluded endpoints are offset by one step: with `n`
/// points the step is `(upper−lower)/(n−1)` when both ends are included,
/// `(upper−lower)/n` when one is excluded and `(upper−lower)/(n+1)` when both are.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub points: usize,
    #[serde(default = "yes")]
    pub lower_inclusive: bool,
    #[serde(default = "yes")]
    pub upper_inclusive: bool,
}

impl Axis {
    /// Closed axis `[lower, upper]`.
    pub fn new(name: &str, lower: f64, upper: f64, points: usize) -> Self {
        Self { name: name.to_owned(), lower, upper, points, lower_inclusive: true, upper_inclusive: true }
    }

    /// `(lower, upper]`.
    pub fn open_lower(mut self) -> Self {
        self.lower_inclusive = false;
        self
    }

    /// `[lower, upper)`.
    pub fn open_upper(mut self) -> Self {
        self.upper_inclusive = false;
        self
    }

    fn intervals(&self) -> f64 {
        let n = self.points as f64;
        match (self.lower_inclusive, self.upper_inclusive) {
            (true, true) => n - 1.0,
            (false, false) => n + 1.0,
            _ => n,
        }
    }

    pub fn step(&self) -> f64 {
        (self.upper - self.lower) / self.intervals()
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        if self.points < 2 {
            return Err(Error::InvalidParameter(format!("axis `{}` needs at least 2 points", self.name)));
        }
        let step = self.step();
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "axis `{}`: bounds [{}, {}] give a non-positive step",
                self.name, self.lower, self.upper
            )));
        }
        let first = if self.lower_inclusive { 0 } else { 1 };
        let span = self.upper - self.lower;
        let intervals = self.intervals();
        let mut v: Vec<f64> = (first..first + self.points).map(|i| self.lower + span * i as f64 / intervals).collect();
        if self.upper_inclusive {
            // land exactly on the bound
            *v.last_mut().expect("points >= 2") = self.upper;
        }
        Ok(v)
    }

    /// Smallest and largest lattice value.
    pub fn range(&self) -> Result<(f64, f64)> {
        let v = self.values()?;
        Ok((v[0], v[v.len() - 1]))
    }
}

/// Lattice axes plus explicit extra points appended after the lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub axes: Vec<Axis>,
    #[serde(default)]
    pub extra_points: Vec<Vec<f64>>,
}

impl GridSpec {
    pub fn new(axes: Vec<Axis>) -> Self {
        Self { axes, extra_points: Vec::new() }
    }

    pub fn with_extra_points(mut self, pts: Vec<Vec<f64>>) -> Self {
        self.extra_points.extend(pts);
        self
    }

    /// Default lattice for a model: `ρ∈[0,1)×κ∈(0,20]×ζ∈(0,10]` at 20×40×20
    /// (σ takes κ's range for CAC) and `varphi∈[0,10]×phi∈[0,20]` at 50×50.
    pub fn default_for(kind: ModelKind) -> Self {
        match kind {
            ModelKind::IAC | ModelKind::CAC => {
                let second = if kind == ModelKind::IAC { "kappa" } else { "sigma" };
                Self::new(vec![
                    Axis::new("rho", 0.0, 1.0, 20).open_upper(),
                    Axis::new(second, 0.0, 20.0, 40).open_lower(),
                    Axis::new("zeta", 0.0, 10.0, 20).open_lower(),
                ])
            }
            ModelKind::SEMI => Self::new(vec![Axis::new("varphi", 0.0, 10.0, 50), Axis::new("phi", 0.0, 20.0, 50)]),
        }
    }

    pub fn names(&self) -> Vec<String> {
        self.axes.iter().map(|a| a.name.clone()).collect()
    }

    pub fn lattice_size(&self) -> usize {
        self.axes.iter().map(|a| a.points).product()
    }

    /// Checks axis names and every point against the model's parameter box.
    pub fn validate_for(&self, model: &Model) -> Result<()> {
        let names = model.param_names();
        if self.names() != names {
            return Err(Error::InvalidParameter(format!("grid axes {:?} do not match model parameters {:?}", self.names(), names)));
        }
        for p in make_grid(self)? {
            model.coefficients(&p)?;
        }
        Ok(())
    }
}

/// Row-major lattice (last axis varies fastest) followed by the extra points.
pub fn make_grid(spec: &GridSpec) -> Result<Vec<Vec<f64>>> {
    if spec.axes.is_empty() {
        return Err(Error::InvalidParameter("grid has no axes".into()));
    }
    let values: Vec<Vec<f64>> = spec.axes.iter().map(Axis::values).collect::<Result<_>>()?;
    let mut out: Vec<Vec<f64>> = vec![Vec::new()];
    for v in &values {
        out = out.into_iter().flat_map(|p| v.iter().map(move |&x| {
            let mut q = p.clone();
            q.push(x);
            q
        })).collect();
    }
    for p in &spec.extra_points {
        if p.len() != spec.axes.len() || p.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(format!("extra point {p:?} needs {} finite coordinates", spec.axes.len())));
        }
        out.push(p.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CalibratedConstants;

    #[test]
    fn linspace() {
        let v = Axis::new("rho", 0.0, 0.9, 10).values().unwrap();
        assert_eq!(v.len(), 10);
        for (i, x) in v.iter().enumerate() {
            assert!((x - 0.1 * i as f64).abs() < 1e-15);
        }
        assert_eq!(v[9], 0.9);
    }

    #[test]
    fn half_open() {
        let v = Axis::new("kappa", 0.0, 20.0, 20).open_lower().values().unwrap();
        assert_eq!((v[0], v[19]), (1.0, 20.0));
        let r = Axis::new("rho", 0.0, 1.0, 20).open_upper().values().unwrap();
        assert_eq!(r[0], 0.0);
        assert!((r[19] - 0.95).abs() < 1e-15);
        let both = Axis { lower_inclusive: false, upper_inclusive: false, ..Axis::new("x", 0.0, 1.0, 3) }.values().unwrap();
        assert_eq!(both, vec![0.25, 0.5, 0.75]);
    }

    #[test]
    fn product_count_and_order() {
        let spec = GridSpec::new(vec![Axis::new("a", 0.0, 9.0, 10), Axis::new("b", 0.0, 19.0, 20), Axis::new("c", 0.0, 9.0, 10)]);
        let g = make_grid(&spec).unwrap();
        assert_eq!(g.len(), 2000);
        assert_eq!(g[0], vec![0.0, 0.0, 0.0]);
        assert_eq!(g[1], vec![0.0, 0.0, 1.0]);
        assert_eq!(g[10], vec![0.0, 1.0, 0.0]);
        assert_eq!(g[200], vec![1.0, 0.0, 0.0]);
        assert_eq!(g[1999], vec![9.0, 19.0, 9.0]);
    }

    #[test]
    fn invalid_axes() {
        assert!(Axis::new("x", 1.0, 1.0, 5).values().is_err());
        assert!(Axis::new("x", 2.0, 1.0, 5).values().is_err());
        assert!(Axis::new("x", 0.0, 1.0, 1).values().is_err());
        let spec = GridSpec::new(vec![Axis::new("x", 0.0, 1.0, 2)]).with_extra_points(vec![vec![1.0, 2.0]]);
        assert!(make_grid(&spec).is_err());
    }

    #[test]
    fn defaults_respect_box() {
        let c = CalibratedConstants::default();
        GridSpec::default_for(ModelKind::IAC).validate_for(&Model::iac(c)).unwrap();
        GridSpec::default_for(ModelKind::CAC).validate_for(&Model::cac(c)).unwrap();
        GridSpec::default_for(ModelKind::SEMI).validate_for(&Model::semi(c, 0.0)).unwrap();
        assert_eq!(GridSpec::default_for(ModelKind::IAC).lattice_size(), 16_000);
        // κ = 0 is outside the box
        let bad = GridSpec::new(vec![Axis::new("rho", 0.0, 0.5, 2), Axis::new("kappa", 0.0, 1.0, 2), Axis::new("zeta", 1.0, 2.0, 2)]);
        assert!(bad.validate_for(&Model::iac(c)).is_err());
    }

    #[test]
    fn literature_points_are_exact_lattice_queries() {
        use crate::model::literature::calibration_points;
        let spec = GridSpec::default_for(ModelKind::IAC);
        let rhos = spec.axes[0].values().unwrap();
        let spec = spec.with_extra_points(calibration_points(&rhos));
        let g = make_grid(&spec).unwrap();
        assert_eq!(g.len(), 16_000 + 8 * 20);
        assert!(g.contains(&vec![0.0, 2.85, 5.30]));
    }
}
