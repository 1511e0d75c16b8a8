//! Design matrices of the moment system `f_t = Z_t'(Y_t b(θ) − X_t d)`.

use std::fmt;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::coefficients::Model;
use crate::data::{columns, Dataset, QuarterIndex};
use crate::error::{Error, Result};

/// Panel variable entering the Euler equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Var {
    DeltaI,
    RealRate,
    Util,
}

impl Var {
    pub fn column(self) -> &'static str {
        match self {
            Var::DeltaI => columns::DELTA_I,
            Var::RealRate => columns::R_P,
            Var::Util => columns::U,
        }
    }
}

/// A model regressor: a panel variable at a lead (`offset > 0`) or lag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Regressor {
    pub var: Var,
    pub offset: i32,
}

impl Regressor {
    pub const fn new(var: Var, offset: i32) -> Self {
        Self { var, offset }
    }
}

impl fmt::Display for Regressor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.offset {
            0 => write!(f, "{}_t", self.var.column()),
            o if o > 0 => write!(f, "{}_t+{}", self.var.column(), o),
            o => write!(f, "{}_t{}", self.var.column(), o),
        }
    }
}

/// MA order of the structural error and the shallowest admissible lag of an
/// endogenous instrument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidualSpec {
    pub ma_order: usize,
    pub min_instrument_lag: usize,
}

/// One excluded instrument: a panel column at a lag (0 = contemporaneous).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstrumentTerm {
    pub column: String,
    pub lag: usize,
}

impl InstrumentTerm {
    pub fn new(column: impl Into<String>, lag: usize) -> Self {
        Self { column: column.into(), lag }
    }

    /// How many periods ahead the variable's information extends: `r^p_t`
    /// contains `π_{t+1}`.
    fn info_lead(&self) -> Option<usize> {
        match self.column.as_str() {
            columns::DELTA_I | columns::U => Some(0),
            columns::R_P => Some(1),
            _ => None,
        }
    }
}

impl fmt::Display for InstrumentTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lag == 0 {
            write!(f, "{}", self.column)
        } else {
            write!(f, "{}:{}", self.column, self.lag)
        }
    }
}

impl std::str::FromStr for InstrumentTerm {
    type Err = Error;

    /// `column` or `column:lag`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.split_once(':') {
            None => Ok(Self::new(s, 0)),
            Some((c, l)) => {
                let lag = l
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("bad instrument lag in `{s}`")))?;
                Ok(Self::new(c.trim(), lag))
            }
        }
    }
}

/// Excluded instruments. The constant is always the single included instrument.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstrumentSpec {
    pub terms: Vec<InstrumentTerm>,
}

impl InstrumentSpec {
    pub fn new(terms: Vec<InstrumentTerm>) -> Self {
        Self { terms }
    }

    /// One lag of each endogenous variable at the shallowest admissible depth:
    /// `Δi_{t-1}, r^p_{t-2}, u_{t-1}` for IAC/semi, one lag deeper for CAC.
    pub fn baseline(model: &Model) -> Self {
        Self::lags(model, 1)
    }

    /// `n` consecutive admissible lags of each endogenous variable.
    pub fn lags(model: &Model, n: usize) -> Self {
        let m = model.residual_spec().min_instrument_lag;
        let mut terms = Vec::new();
        for (col, lead) in [(columns::DELTA_I, 0), (columns::R_P, 1), (columns::U, 0)] {
            for k in 0..n {
                terms.push(InstrumentTerm::new(col, m + lead + k));
            }
        }
        Self { terms }
    }

    pub fn with_external(mut self, cols: &[&str]) -> Self {
        self.terms.extend(cols.iter().map(|c| InstrumentTerm::new(*c, 0)));
        self
    }

    /// Checks every endogenous instrument is dated before the error's
    /// information set. External columns are accepted as configured.
    pub fn validate(&self, spec: &ResidualSpec) -> Result<()> {
        if self.terms.is_empty() {
            return Err(Error::InvalidParameter("no excluded instruments".into()));
        }
        for t in &self.terms {
            if let Some(lead) = t.info_lead() {
                if t.lag < spec.min_instrument_lag + lead {
                    return Err(Error::InstrumentNotExogenous {
                        column: t.column.clone(),
                        lag: t.lag,
                        reason: format!(
                            "the error is MA({}) and requires endogenous instruments dated t-{} or earlier{}; use lag ≥ {}",
                            spec.ma_order,
                            spec.min_instrument_lag,
                            if lead > 0 { " (r_p_t already contains π_t+1)" } else { "" },
                            spec.min_instrument_lag + lead
                        ),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Regressors, included and excluded instruments for one model on one panel.
/// Immutable once built.
#[derive(Debug, Clone)]
pub struct MomentSystem {
    pub model: Model,
    /// `T × m` model regressors in the model's fixed order.
    pub y: DMatrix<f64>,
    /// `T × k_x` included instruments (the constant).
    pub x: DMatrix<f64>,
    /// `T × k_z`, `[X | excluded instruments]`.
    pub z: DMatrix<f64>,
    pub regressor_labels: Vec<String>,
    pub instrument_labels: Vec<String>,
    /// Date of the first estimation row.
    pub first_date: Option<QuarterIndex>,
}

impl MomentSystem {
    /// Assemble a system from raw matrices, validating dimensions.
    pub fn from_parts(model: Model, y: DMatrix<f64>, z_excluded: DMatrix<f64>) -> Result<Self> {
        let t = y.nrows();
        if z_excluded.nrows() != t {
            return Err(Error::Dimension(format!("Y has {t} rows, Z has {}", z_excluded.nrows())));
        }
        if y.ncols() != model.regressors().len() {
            return Err(Error::Dimension(format!(
                "{:?} needs {} regressors, got {}",
                model.kind,
                model.regressors().len(),
                y.ncols()
            )));
        }
        let kz = z_excluded.ncols() + 1;
        if t <= kz {
            return Err(Error::EmptySample(format!("T = {t} rows for k_z = {kz} instruments")));
        }
        if y.iter().chain(z_excluded.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("design contains non-finite values".into()));
        }
        let x = DMatrix::from_element(t, 1, 1.0);
        let mut z = DMatrix::from_element(t, kz, 1.0);
        z.columns_mut(1, kz - 1).copy_from(&z_excluded);
        let regressor_labels = model.regressors().iter().map(|r| r.to_string()).collect();
        let mut instrument_labels = vec!["const".to_owned()];
        instrument_labels.extend((1..kz).map(|i| format!("z{i}")));
        Ok(Self { model, y, x, z, regressor_labels, instrument_labels, first_date: None })
    }

    pub fn t(&self) -> usize {
        self.y.nrows()
    }

    pub fn kx(&self) -> usize {
        self.x.ncols()
    }

    pub fn kz(&self) -> usize {
        self.z.ncols()
    }

    /// Excluded instruments only.
    pub fn z_excluded(&self) -> DMatrix<f64> {
        self.z.columns(self.kx(), self.kz() - self.kx()).into_owned()
    }

    /// `Y b(θ)` for a parameter point.
    pub fn fitted_combination(&self, theta: &[f64]) -> Result<DVector<f64>> {
        Ok(&self.y * self.model.coefficients(theta)?)
    }

    /// Rows `[from, to)` as a new system.
    pub fn rows(&self, from: usize, to: usize) -> Result<Self> {
        if to > self.t() || from >= to {
            return Err(Error::Dimension(format!("row range {from}..{to} outside 0..{}", self.t())));
        }
        let n = to - from;
        Ok(Self {
            model: self.model,
            y: self.y.rows(from, n).into_owned(),
            x: self.x.rows(from, n).into_owned(),
            z: self.z.rows(from, n).into_owned(),
            regressor_labels: self.regressor_labels.clone(),
            instrument_labels: self.instrument_labels.clone(),
            first_date: self.first_date.map(|d| d.offset(from as i64)),
        })
    }
}

/// Builds the moment system on the largest window where every lead and lag
/// exists in the panel.
pub fn build_design(data: &Dataset, model: &Model, instruments: &InstrumentSpec) -> Result<MomentSystem> {
    instruments.validate(&model.residual_spec())?;
    let regs = model.regressors();
    let max_lead = regs.iter().map(|r| r.offset.max(0) as usize).max().unwrap_or(0);
    let max_lag = regs
        .iter()
        .map(|r| (-r.offset).max(0) as usize)
        .chain(instruments.terms.iter().map(|t| t.lag))
        .max()
        .unwrap_or(0);
    let (first, _) = data.estimation_window(max_lead, max_lag).ok_or_else(|| {
        Error::EmptySample(format!(
            "panel of {} quarters cannot supply {max_lead} leads and {max_lag} lags",
            data.len()
        ))
    })?;
    let t0 = max_lag;
    let n = data.len() - max_lead - max_lag;

    let col = |name: &str| data.column(name).ok_or_else(|| Error::MissingSeries(name.to_owned()));
    let mut y = DMatrix::zeros(n, regs.len());
    for (j, r) in regs.iter().enumerate() {
        let c = col(r.var.column())?;
        for i in 0..n {
            y[(i, j)] = c[((t0 + i) as i64 + r.offset as i64) as usize];
        }
    }
    let mut zx = DMatrix::zeros(n, instruments.terms.len());
    for (j, term) in instruments.terms.iter().enumerate() {
        let c = col(&term.column)?;
        for i in 0..n {
            zx[(i, j)] = c[t0 + i - term.lag];
        }
    }
    let mut sys = MomentSystem::from_parts(*model, y, zx)?;
    sys.instrument_labels = std::iter::once("const".to_owned())
        .chain(instruments.terms.iter().map(|t| t.to_string()))
        .collect();
    sys.first_date = Some(first);
    Ok(sys)
}

/// Residuals `ε = Y b − X d` and the `T × k_z` matrix of moment contributions
/// `f_t = ε_t Z_t`.
pub fn residuals_and_moments(
    sys: &MomentSystem,
    b: &DVector<f64>,
    d: &DVector<f64>,
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    if b.len() != sys.y.ncols() || d.len() != sys.x.ncols() {
        return Err(Error::Dimension(format!(
            "b has {} entries for {} regressors, d has {} for {} included instruments",
            b.len(),
            sys.y.ncols(),
            d.len(),
            sys.x.ncols()
        )));
    }
    let eps = &sys.y * b - &sys.x * d;
    let mut f = sys.z.clone();
    for (i, mut row) in f.row_iter_mut().enumerate() {
        row *= eps[i];
    }
    Ok((eps, f))
}

/// Writes `date,<regressors>,<instruments>` for auditing a design.
pub fn write_design_csv(sys: &MomentSystem, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::from("date");
    for l in sys.regressor_labels.iter().map(|l| format!("Y:{l}")).chain(sys.instrument_labels.iter().map(|l| format!("Z:{l}"))) {
        out.push(',');
        out.push_str(&l);
    }
    out.push('\n');
    for i in 0..sys.t() {
        match sys.first_date {
            Some(d) => out.push_str(&d.offset(i as i64).to_string()),
            None => out.push_str(&(i + 1).to_string()),
        }
        for v in sys.y.row(i).iter().chain(sys.z.row(i).iter()) {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CalibratedConstants;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};

    /// Panel whose values encode (column, index) so row placement is checkable.
    fn coded_panel(n: usize) -> Dataset {
        let start: QuarterIndex = "1967Q2".parse().unwrap();
        let mk = |base: f64| (0..n).map(|t| base + t as f64).collect::<Vec<_>>();
        Dataset::new(
            start,
            vec![("delta_i".into(), mk(0.0)), ("r_p".into(), mk(1000.0)), ("u".into(), mk(2000.0))],
        )
        .unwrap()
    }

    #[test]
    fn baseline_iac_row_count_matches_enumeration() {
        // 212 raw quarters, one consumed by differencing
        let data = coded_panel(211);
        let model = Model::iac(CalibratedConstants::default());
        let inst = InstrumentSpec::baseline(&model);
        let sys = build_design(&data, &model, &inst).unwrap();

        let offsets: Vec<i64> = model
            .regressors()
            .iter()
            .map(|r| r.offset as i64)
            .chain(inst.terms.iter().map(|t| -(t.lag as i64)))
            .collect();
        let usable = (0..211i64).filter(|t| offsets.iter().all(|o| (0..211).contains(&(t + o)))).count();
        assert_eq!(sys.t(), usable);
        assert_eq!(sys.t(), 212 - 2 - 2 - 1);
        assert_eq!(sys.first_date.unwrap().to_string(), "1967Q4");

        // first row is t = 2: Δi_t, Δi_{t-1}, Δi_{t+1}, Δi_{t+2}, r_t, r_{t-1}, u_t, u_{t+1}
        let row: Vec<f64> = sys.y.row(0).iter().copied().collect();
        assert_eq!(row, vec![2.0, 1.0, 3.0, 4.0, 1002.0, 1001.0, 2002.0, 2003.0]);
        let zrow: Vec<f64> = sys.z.row(0).iter().copied().collect();
        assert_eq!(zrow, vec![1.0, 1.0, 1000.0, 2001.0]);
        assert_eq!(sys.instrument_labels, ["const", "delta_i:1", "r_p:2", "u:1"]);
    }

    #[test]
    fn cac_rejects_first_lag() {
        let model = Model::cac(CalibratedConstants::default());
        let inst = InstrumentSpec::new(vec![InstrumentTerm::new("delta_i", 1)]);
        let err = build_design(&coded_panel(50), &model, &inst).unwrap_err();
        assert!(matches!(err, Error::InstrumentNotExogenous { lag: 1, .. }), "{err}");
        // r_p needs one extra lag
        let inst = InstrumentSpec::new(vec![InstrumentTerm::new("r_p", 2)]);
        assert!(build_design(&coded_panel(50), &model, &inst).is_err());
        let ok = build_design(&coded_panel(50), &model, &InstrumentSpec::baseline(&model)).unwrap();
        assert_eq!(ok.instrument_labels, ["const", "delta_i:2", "r_p:3", "u:2"]);
        assert_eq!(ok.y.ncols(), 9);
    }

    #[test]
    fn semi_baseline_dimensions() {
        let model = Model::semi(CalibratedConstants::default(), 0.3);
        let sys = build_design(&coded_panel(80), &model, &InstrumentSpec::baseline(&model)).unwrap();
        assert_eq!((sys.kz(), sys.kx(), sys.kz() - sys.kx()), (4, 1, 3));
    }

    #[test]
    fn two_lag_spec_and_empty_sample() {
        let model = Model::iac(CalibratedConstants::default());
        let inst = InstrumentSpec::lags(&model, 2);
        let labels: Vec<String> = inst.terms.iter().map(|t| t.to_string()).collect();
        assert_eq!(labels, ["delta_i:1", "delta_i:2", "r_p:2", "r_p:3", "u:1", "u:2"]);
        assert!(matches!(build_design(&coded_panel(6), &model, &inst), Err(Error::EmptySample(_))));
        let missing = InstrumentSpec::baseline(&model).with_external(&["oil"]);
        assert!(matches!(build_design(&coded_panel(40), &model, &missing), Err(Error::MissingSeries(_))));
    }

    fn random_system(seed: u64) -> MomentSystem {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let t = 30;
        let y = DMatrix::from_fn(t, 8, |_, _| rng.gen_range(-1.0..1.0));
        let z = DMatrix::from_fn(t, 3, |_, _| rng.gen_range(-1.0..1.0));
        MomentSystem::from_parts(Model::iac(CalibratedConstants::default()), y, z).unwrap()
    }

    #[test]
    fn moments_match_brute_force() {
        let sys = random_system(7);
        let b = DVector::from_fn(8, |i, _| 0.3 * i as f64 - 1.0);
        let d = DVector::from_element(1, 0.25);
        let (eps, f) = residuals_and_moments(&sys, &b, &d).unwrap();
        for t in 0..sys.t() {
            let mut e = -0.25;
            for j in 0..8 {
                e += sys.y[(t, j)] * b[j];
            }
            assert_abs_diff_eq!(eps[t], e, epsilon = 1e-13);
            for k in 0..sys.kz() {
                assert_abs_diff_eq!(f[(t, k)], e * sys.z[(t, k)], epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn selector_and_zero_residual() {
        let mut sys = random_system(8);
        let e1 = DVector::from_fn(8, |i, _| if i == 0 { 1.0 } else { 0.0 });
        let (eps, _) = residuals_and_moments(&sys, &e1, &DVector::zeros(1)).unwrap();
        assert_eq!(eps, sys.y.column(0).into_owned());

        // make Y b = X d exactly
        let b = DVector::from_fn(8, |i, _| if i < 2 { 1.0 } else { 0.0 });
        for t in 0..sys.t() {
            sys.y[(t, 1)] = 2.0 - sys.y[(t, 0)];
        }
        let (eps, f) = residuals_and_moments(&sys, &b, &DVector::from_element(1, 2.0)).unwrap();
        assert!(eps.iter().all(|v| v.abs() < 1e-15));
        assert!(f.iter().all(|v| v.abs() < 1e-15));

        assert!(residuals_and_moments(&sys, &DVector::zeros(3), &DVector::zeros(1)).is_err());
    }
}
