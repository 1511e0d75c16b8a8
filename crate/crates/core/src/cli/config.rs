//! Run configuration: a TOML file with `[data]`, `[model]`, `[instruments]`,
//! `[inference]`, `[grid]`, `[estimate]`, `[misspec]` and `[output]` sections.
//! Every key is optional except where a subcommand needs it; see the README
//! for the full grammar.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::confidence::{Axis, GridSpec};
use crate::data::{ExternalKind, InvestmentMeasure, QuarterIndex, TransformSpec};
use crate::error::{Error, Result};
use crate::inference::{Bandwidth, HacConfig, Kernel, QllMode, SplitSpec, Statistic, TestConfig};
use crate::misspec::MisspecConfig;
use crate::model::{CalibratedConstants, InstrumentSpec, InstrumentTerm, Model, ModelKind};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub data: DataSection,
    pub model: ModelSection,
    pub instruments: InstrumentSection,
    pub inference: InferenceSection,
    pub grid: GridSection,
    pub estimate: EstimateSection,
    pub misspec: MisspecConfig,
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataSection {
    /// A ready-made panel (`date,delta_i,r_p,u,...`). Takes precedence over raw inputs.
    pub panel: Option<PathBuf>,
    /// Directory holding `<name>.csv` for each raw series (quarterly `YYYYQn`
    /// or monthly `YYYY-MM[-DD]` dates).
    pub raw_dir: Option<PathBuf>,
    /// Per-series path overrides, keyed by raw name (`fpi`, `ffr`, ...).
    pub series: BTreeMap<String, PathBuf>,
    /// External instrument inputs keyed by kind (`oil`, `vxo`, `mp_shock`, `mil_news`).
    pub external: BTreeMap<String, PathBuf>,
    /// Download raw series that have no local file from FRED (needs `FRED_API_KEY`).
    pub fred: bool,
    /// FRED host override, e.g. a local mirror.
    pub fred_url: Option<String>,
    /// Inclusive `[start, end]` quarters.
    pub sample: Option<[QuarterIndex; 2]>,
    pub investment_measure: InvestmentMeasure,
    pub rate_scale: f64,
}

impl Default for DataSection {
    fn default() -> Self {
        let t = TransformSpec::default();
        Self {
            panel: None,
            raw_dir: None,
            series: BTreeMap::new(),
            external: BTreeMap::new(),
            fred: false,
            fred_url: None,
            sample: None,
            investment_measure: t.investment_measure,
            rate_scale: t.rate_scale,
        }
    }
}

impl DataSection {
    pub fn transform_spec(&self) -> TransformSpec {
        TransformSpec {
            investment_measure: self.investment_measure,
            rate_scale: self.rate_scale,
            sample: self.sample.map(|[a, b]| (a, b)),
        }
    }

    pub fn external_kinds(&self) -> Result<Vec<(ExternalKind, PathBuf)>> {
        self.external
            .iter()
            .map(|(k, p)| Ok((parse_external_kind(k)?, p.clone())))
            .collect()
    }
}

fn parse_external_kind(s: &str) -> Result<ExternalKind> {
    serde_json::from_value(serde_json::Value::String(s.to_owned())).map_err(|_| {
        Error::InvalidParameter(format!("unknown external instrument `{s}` (oil, vxo, mp_shock or mil_news)"))
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    pub kind: ModelKind,
    pub beta: f64,
    pub delta: f64,
    /// Fixed `ρ` of the semi-structural model.
    pub rho: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        let c = CalibratedConstants::default();
        Self { kind: ModelKind::IAC, beta: c.beta, delta: c.delta, rho: 0.0 }
    }
}

impl ModelSection {
    pub fn build(&self) -> Result<Model> {
        let c = CalibratedConstants::from_calibration(self.beta, self.delta)?;
        let m = match self.kind {
            ModelKind::IAC => Model::iac(c),
            ModelKind::CAC => Model::cac(c),
            ModelKind::SEMI => Model::semi(c, self.rho),
        };
        if self.kind == ModelKind::SEMI && !(0.0..1.0).contains(&self.rho) {
            return Err(Error::InvalidParameter(format!("rho must lie in [0,1), got {}", self.rho)));
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InstrumentSection {
    /// Consecutive admissible lags of each endogenous variable.
    pub lags: usize,
    /// Explicit `column:lag` terms; replaces `lags` when given.
    pub terms: Option<Vec<String>>,
    /// Contemporaneous external instrument columns.
    pub external: Vec<String>,
}

impl Default for InstrumentSection {
    fn default() -> Self {
        Self { lags: 1, terms: None, external: Vec::new() }
    }
}

impl InstrumentSection {
    pub fn build(&self, model: &Model) -> Result<InstrumentSpec> {
        let base = match &self.terms {
            Some(t) => InstrumentSpec::new(t.iter().map(|s| s.parse()).collect::<Result<Vec<InstrumentTerm>>>()?),
            None => {
                if self.lags == 0 {
                    return Err(Error::InvalidParameter("instruments.lags must be at least 1".into()));
                }
                InstrumentSpec::lags(model, self.lags)
            }
        };
        let ext: Vec<&str> = self.external.iter().map(String::as_str).collect();
        let spec = base.with_external(&ext);
        spec.validate(&model.residual_spec())?;
        Ok(spec)
    }
}

/// HAC bandwidth as written in the config: `"auto"` or a nonnegative integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BandwidthSetting(pub Bandwidth);

impl Serialize for BandwidthSetting {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0 {
            Bandwidth::Auto => s.serialize_str("auto"),
            Bandwidth::Fixed(b) => s.serialize_u64(b as u64),
        }
    }
}

impl<'de> Deserialize<'de> for BandwidthSetting {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(b) if b >= 0 => Ok(Self(Bandwidth::Fixed(b as usize))),
            Raw::Str(s) if s == "auto" => Ok(Self(Bandwidth::Auto)),
            _ => Err(serde::de::Error::custom("bandwidth must be \"auto\" or a nonnegative integer")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QllFallback {
    #[default]
    None,
    SupSplit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InferenceSection {
    pub statistic: Statistic,
    pub level: f64,
    pub bandwidth: BandwidthSetting,
    pub qll_fallback: QllFallback,
    pub split_first_fraction: f64,
    pub split_gap: usize,
}

impl Default for InferenceSection {
    fn default() -> Self {
        let t = TestConfig::default();
        Self {
            statistic: t.statistic,
            level: t.level,
            bandwidth: BandwidthSetting(t.hac.bandwidth),
            qll_fallback: QllFallback::None,
            split_first_fraction: t.split.first_fraction,
            split_gap: t.split.gap,
        }
    }
}

impl InferenceSection {
    pub fn test_config(&self) -> TestConfig {
        TestConfig {
            statistic: self.statistic,
            level: self.level,
            hac: HacConfig { kernel: Kernel::Bartlett, bandwidth: self.bandwidth.0 },
            split: SplitSpec { first_fraction: self.split_first_fraction, gap: self.split_gap },
            qll_mode: match self.qll_fallback {
                QllFallback::None => QllMode::Canonical,
                QllFallback::SupSplit => QllMode::SupSplit,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    /// Lattice axes; the model's default lattice when empty.
    pub axes: Vec<Axis>,
    pub extra_points: Vec<Vec<f64>>,
    /// Append the published (κ, ζ) calibrations at every `ρ` of the lattice
    /// (mapped to `(varphi, phi)` for the semi-structural model).
    pub literature_points: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EstimateSection {
    /// Parameter point tested by `estimate`.
    pub theta: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

/// 1-based line of byte offset `pos`.
fn line_of(text: &str, pos: usize) -> usize {
    text[..pos.min(text.len())].matches('\n').count() + 1
}

/// Line where `key` is assigned inside `[section]` (or a dotted sub-table of it);
/// 1 when it cannot be found, e.g. for defaulted values.
fn locate(text: &str, section: &str, key: &str) -> usize {
    let mut current = String::new();
    let mut section_line = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(h) = line.strip_prefix('[') {
            current = h.trim_start_matches('[').trim_end_matches(']').trim().to_owned();
            if current == section && section_line.is_none() {
                section_line = Some(i + 1);
            }
            continue;
        }
        let in_section = current == section || current.starts_with(&format!("{section}."));
        if in_section {
            if let Some((k, _)) = line.split_once('=') {
                if k.trim().trim_matches('"') == key {
                    return i + 1;
                }
            }
        }
    }
    section_line.unwrap_or(1)
}

/// Adds a "did you mean" hint to serde's unknown-field message.
fn suggest(message: &str) -> String {
    if !message.contains("unknown field") {
        return message.to_owned();
    }
    let quoted: Vec<&str> = message.split('`').skip(1).step_by(2).collect();
    let Some((unknown, candidates)) = quoted.split_first() else {
        return message.to_owned();
    };
    let best = candidates
        .iter()
        .map(|c| (strsim::jaro_winkler(unknown, c), *c))
        .filter(|(s, _)| *s > 0.8)
        .max_by(|a, b| a.0.total_cmp(&b.0));
    match best {
        Some((_, c)) => format!("unknown key `{unknown}`; did you mean `{c}`?"),
        None => format!("unknown key `{unknown}`; expected one of {}", candidates.iter().map(|c| format!("`{c}`")).collect::<Vec<_>>().join(", ")),
    }
}

impl RunConfig {
    /// Parses TOML text; relative paths are resolved against `base_dir`.
    /// `origin` is used in error messages.
    pub fn from_str_at(text: &str, origin: &Path, base_dir: &Path) -> Result<Self> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config {
            path: origin.into(),
            line: e.span().map(|s| line_of(text, s.start)).unwrap_or(1),
            message: suggest(e.message()),
        })?;
        cfg.resolve_paths(base_dir);
        cfg.validate().map_err(|(section, key, message)| Error::Config {
            path: origin.into(),
            line: locate(text, section, key),
            message: format!("{section}.{key}: {message}"),
        })?;
        Ok(cfg)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(p) = self.data.panel.as_mut() {
            fix(p);
        }
        if let Some(p) = self.data.raw_dir.as_mut() {
            fix(p);
        }
        self.data.series.values_mut().for_each(fix);
        self.data.external.values_mut().for_each(fix);
        fix(&mut self.output.dir);
    }

    /// Checks constraints and referenced files; errors name the offending key.
    fn validate(&self) -> std::result::Result<(), (&'static str, &'static str, String)> {
        let inf = &self.inference;
        if !(inf.level > 0.0 && inf.level < 1.0) {
            return Err(("inference", "level", format!("must lie in (0,1), got {}", inf.level)));
        }
        if !(inf.split_first_fraction > 0.0 && inf.split_first_fraction < 1.0) {
            return Err(("inference", "split_first_fraction", format!("must lie in (0,1), got {}", inf.split_first_fraction)));
        }
        if let Err(e) = self.model.build() {
            let key = if self.model.kind == ModelKind::SEMI && !(0.0..1.0).contains(&self.model.rho) { "rho" } else { "beta" };
            return Err(("model", key, e.to_string()));
        }
        if let Err(e) = self.data.transform_spec().validate() {
            let key = if self.data.rate_scale > 0.0 { "sample" } else { "rate_scale" };
            return Err(("data", key, e.to_string()));
        }
        if let Err(e) = self.data.external_kinds() {
            return Err(("data", "external", e.to_string()));
        }
        let model = self.model.build().expect("checked above");
        if let Err(e) = self.instruments.build(&model) {
            let key = if self.instruments.terms.is_some() { "terms" } else { "lags" };
            return Err(("instruments", key, e.to_string()));
        }
        if let Err(e) = self.misspec.validate() {
            return Err(("misspec", "gamma", e.to_string()));
        }
        if let Some(p) = &self.data.panel {
            if !p.is_file() {
                return Err(("data", "panel", format!("file not found: {}", p.display())));
            }
        }
        if let Some(p) = &self.data.raw_dir {
            if !p.is_dir() {
                return Err(("data", "raw_dir", format!("directory not found: {}", p.display())));
            }
        }
        for p in self.data.series.values().chain(self.data.external.values()) {
            if !p.is_file() {
                let key = if self.data.series.values().any(|q| q == p) { "series" } else { "external" };
                return Err(("data", key, format!("file not found: {}", p.display())));
            }
        }
        if let Some(theta) = &self.estimate.theta {
            if theta.len() != model.n_params() {
                return Err(("estimate", "theta", format!("{:?} needs {} parameters {:?}", model.kind, model.n_params(), model.param_names())));
            }
        }
        if let Err(e) = self.grid_spec() {
            return Err(("grid", "axes", e.to_string()));
        }
        Ok(())
    }

    pub fn model(&self) -> Result<Model> {
        self.model.build()
    }

    pub fn instruments(&self) -> Result<InstrumentSpec> {
        self.instruments.build(&self.model()?)
    }

    pub fn test_config(&self) -> TestConfig {
        self.inference.test_config()
    }

    /// The grid to invert: configured or default axes, then configured extra
    /// points, then literature calibrations if requested.
    pub fn grid_spec(&self) -> Result<GridSpec> {
        let model = self.model()?;
        let mut spec = if self.grid.axes.is_empty() {
            GridSpec::default_for(model.kind)
        } else {
            GridSpec::new(self.grid.axes.clone())
        };
        spec = spec.with_extra_points(self.grid.extra_points.clone());
        if self.grid.literature_points {
            let extra = literature_extra_points(&model, &spec)?;
            spec = spec.with_extra_points(extra);
        }
        spec.validate_for(&model)?;
        Ok(spec)
    }

    /// JSON rendering of the effective configuration embedded in outputs.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }

    /// TOML rendering of the effective configuration.
    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}

fn literature_extra_points(model: &Model, spec: &GridSpec) -> Result<Vec<Vec<f64>>> {
    use crate::model::literature::calibration_points;
    match model.kind {
        ModelKind::IAC => {
            let rhos = spec.axes.first().map(Axis::values).transpose()?.unwrap_or_default();
            Ok(calibration_points(&rhos))
        }
        ModelKind::SEMI => calibration_points(&[model.semi_rho])
            .into_iter()
            .map(|p| {
                let (varphi, phi) = crate::model::map_structural_to_semi(p[1], p[2], &model.constants)?;
                Ok(vec![varphi, phi])
            })
            .collect(),
        ModelKind::CAC => Err(Error::InvalidParameter(
            "literature_points needs the IAC or semi-structural model; the calibrations are (κ, ζ) pairs".into(),
        )),
    }
}

/// Reads and validates a config file.
pub fn parse_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    RunConfig::from_str_at(&text, path, base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
        let p = dir.join(name);
        std::fs::File::create(&p).unwrap().write_all(text.as_bytes()).unwrap();
        p
    }

    fn config_err(dir: &Path, text: &str) -> (usize, String) {
        let p = write(dir, "run.toml", text);
        match parse_config(&p).unwrap_err() {
            Error::Config { line, message, path } => {
                assert_eq!(path, p);
                (line, message)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn minimal_config_fills_defaults() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "panel.csv", "date,delta_i\n1967Q1,0\n");
        let p = write(dir.path(), "run.toml", "[data]\npanel = \"panel.csv\"\n[model]\nkind = \"IAC\"\n");
        let cfg = parse_config(&p).unwrap();
        assert_eq!(cfg.model.beta, 0.99);
        assert_eq!(cfg.model.delta, 0.025);
        assert_eq!(cfg.inference.level, 0.90);
        assert_eq!(cfg.inference.bandwidth, BandwidthSetting(Bandwidth::Auto));
        assert_eq!(cfg.inference.split_first_fraction, 0.45);
        assert_eq!(cfg.inference.split_gap, 3);
        assert_eq!(cfg.data.rate_scale, 400.0);
        assert_eq!(cfg.data.panel.as_deref(), Some(dir.path().join("panel.csv").as_path()));
        assert_eq!(cfg.output.dir, dir.path().join("out"));
        assert_eq!(cfg.grid_spec().unwrap().lattice_size(), 20 * 40 * 20);
    }

    #[test]
    fn level_out_of_range_names_line() {
        let dir = tempfile::tempdir().unwrap();
        let (line, msg) = config_err(dir.path(), "[model]\nkind = \"IAC\"\n\n[inference]\nstatistic = \"S\"\nlevel = 1.5\n");
        assert_eq!(line, 6);
        assert!(msg.contains("level"), "{msg}");
    }

    #[test]
    fn unknown_key_suggests_nearest() {
        let dir = tempfile::tempdir().unwrap();
        let (line, msg) = config_err(dir.path(), "[inference]\nlevel = 0.9\nbandwith = 4\n");
        assert_eq!(line, 3);
        assert!(msg.contains("did you mean `bandwidth`"), "{msg}");
    }

    #[test]
    fn type_mismatch_names_line() {
        let dir = tempfile::tempdir().unwrap();
        let (line, _) = config_err(dir.path(), "[model]\nbeta = \"high\"\n");
        assert_eq!(line, 2);
        let (line, msg) = config_err(dir.path(), "[inference]\nbandwidth = \"wide\"\n");
        assert_eq!(line, 2);
        assert!(msg.contains("auto"), "{msg}");
    }

    #[test]
    fn missing_panel_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let (line, msg) = config_err(dir.path(), "[data]\npanel = \"nope.csv\"\n");
        assert_eq!(line, 2);
        assert!(msg.contains("nope.csv"), "{msg}");
    }

    #[test]
    fn bandwidth_and_statistic_forms() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "a.toml", "[inference]\nbandwidth = 5\nstatistic = \"qLL\"\nqll_fallback = \"sup_split\"\n");
        let cfg = parse_config(&p).unwrap();
        let t = cfg.test_config();
        assert_eq!(t.hac.bandwidth, Bandwidth::Fixed(5));
        assert_eq!(t.statistic, Statistic::Qll);
        assert_eq!(t.qll_mode, QllMode::SupSplit);
    }

    #[test]
    fn cac_rejects_lag_one_terms() {
        let dir = tempfile::tempdir().unwrap();
        let (line, msg) = config_err(dir.path(), "[model]\nkind = \"CAC\"\n[instruments]\nterms = [\"delta_i:1\"]\n");
        assert_eq!(line, 4);
        assert!(msg.contains("delta_i"), "{msg}");
    }

    #[test]
    fn literature_points_are_appended() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            dir.path(),
            "g.toml",
            "[grid]\nliterature_points = true\n[[grid.axes]]\nname = \"rho\"\nlower = 0.0\nupper = 0.5\npoints = 2\n\
             [[grid.axes]]\nname = \"kappa\"\nlower = 1.0\nupper = 2.0\npoints = 2\n\
             [[grid.axes]]\nname = \"zeta\"\nlower = 1.0\nupper = 2.0\npoints = 2\n",
        );
        let spec = parse_config(&p).unwrap().grid_spec().unwrap();
        assert_eq!(spec.lattice_size(), 8);
        assert_eq!(spec.extra_points.len(), 16);
    }

    #[test]
    fn effective_config_round_trips() {
        let cfg = RunConfig::default();
        let back: RunConfig = toml::from_str(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
    }
}
