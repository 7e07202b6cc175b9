//! JSON run configuration, one schema per command.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use loewner_core::chains::{ChainCriteriaParams, RadiusSchedule};
use loewner_core::evolution::SolverSettings;
use loewner_core::expr::{parse, Expr};
use loewner_core::herglotz::HerglotzField;
use loewner_core::numeric::{Domain, Grid, HoloMap};
use loewner_core::qcext::Rect;
use loewner_core::Complex64;
use serde::Deserialize;

use crate::CliError;

/// A number or an `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexValue {
    pub fn value(self) -> Complex64 {
        match self {
            ComplexValue::Real(x) => Complex64::new(x, 0.0),
            ComplexValue::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

/// Explicit sample times or an evenly spaced schedule with `steps` intervals.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum TimeSpec {
    List(Vec<f64>),
    Range { start: f64, end: f64, steps: usize },
}

impl TimeSpec {
    pub fn times(&self) -> Result<Vec<f64>, CliError> {
        let ts = match self {
            TimeSpec::List(v) => v.clone(),
            TimeSpec::Range { start, end, steps } => {
                if *steps == 0 {
                    return Err(CliError::config("times.steps must be positive"));
                }
                (0..=*steps)
                    .map(|i| start + (end - start) * i as f64 / *steps as f64)
                    .collect()
            }
        };
        if ts.is_empty() || ts.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(CliError::config("times must be finite, non-negative and non-empty"));
        }
        if ts.windows(2).any(|w| w[1] < w[0]) {
            return Err(CliError::config("times must be non-decreasing"));
        }
        Ok(ts)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub max_step: Option<f64>,
    pub max_steps: Option<usize>,
}

impl SolverConfig {
    pub fn settings(&self) -> SolverSettings {
        let d = SolverSettings::default();
        SolverSettings {
            rtol: self.rtol.unwrap_or(d.rtol),
            atol: self.atol.unwrap_or(d.atol),
            max_step: self.max_step.unwrap_or(d.max_step),
            max_steps: self.max_steps.unwrap_or(d.max_steps),
        }
    }
}

pub type ParamMap = BTreeMap<String, ComplexValue>;

/// Parses expressions against a parameter map and tracks which names were used.
pub struct Binder<'a> {
    params: &'a ParamMap,
    values: BTreeMap<String, Complex64>,
    used: BTreeSet<String>,
}

impl<'a> Binder<'a> {
    pub fn new(params: &'a ParamMap) -> Self {
        let values = params.iter().map(|(k, v)| (k.clone(), v.value())).collect();
        Binder {
            params,
            values,
            used: BTreeSet::new(),
        }
    }

    pub fn expr(&mut self, src: &str) -> Result<Expr, CliError> {
        let e = parse(src)?;
        let names = e.parameters();
        if let Some(missing) = names.iter().find(|n| !self.params.contains_key(*n)) {
            return Err(CliError::config(format!("unbound parameter `{missing}` in `{src}`")));
        }
        self.used.extend(names);
        Ok(e.bind(&self.values))
    }

    pub fn map(&mut self, src: &str, domain: Domain) -> Result<HoloMap, CliError> {
        let e = self.expr(src)?;
        Ok(HoloMap::from_expr(domain, &e)?.with_label(src))
    }

    pub fn field(&mut self, spec: &FieldSpec) -> Result<HerglotzField, CliError> {
        let (src, bps, strip) = match spec {
            FieldSpec::Expr(s) => (s.as_str(), Vec::new(), None),
            FieldSpec::Full(f) => (f.expr.as_str(), f.breakpoints.clone(), f.strip),
        };
        let e = self.expr(src)?;
        let mut p = HerglotzField::from_expr(&e)?.with_breakpoints(bps).with_label(src);
        if let Some([c1, c2]) = strip {
            p = p.with_strip(c1, c2);
        }
        Ok(p)
    }

    /// Fails when a supplied parameter is referenced by no expression.
    pub fn finish(self) -> Result<(), CliError> {
        match self.params.keys().find(|k| !self.used.contains(*k)) {
            Some(k) => Err(CliError::config(format!("parameter `{k}` is not used by any expression"))),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    pub expr: String,
    #[serde(default)]
    pub breakpoints: Vec<f64>,
    pub strip: Option<[f64; 2]>,
}

/// A field given either as a bare expression or with metadata.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum FieldSpec {
    Expr(String),
    Full(FieldConfig),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    pub field: FieldSpec,
    #[serde(default)]
    pub params: ParamMap,
    pub points: Vec<ComplexValue>,
    #[serde(default)]
    pub start: f64,
    pub times: TimeSpec,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default = "yes")]
    pub plot: bool,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphaConfig {
    pub field: FieldSpec,
    #[serde(default)]
    pub params: ParamMap,
    pub times: TimeSpec,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default = "yes")]
    pub plot: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    BeckerPommerenke,
    Schwarzian,
    Translation,
    Exponential,
    Starlike,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtensionMethod {
    /// Extension of a Loewner chain built from `function`.
    Chain,
    /// Extension of the evolution family of `field`.
    Evolution,
    /// `h(iy) + ωx` from a disk containing `h′(H)`.
    HalfplaneLinear,
    /// Reflection formula built from `h`, `h′` and `h″/h′`.
    Schwarzian,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiskConfig {
    pub center: ComplexValue,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtendConfig {
    pub method: ExtensionMethod,
    /// Chain construction for `method = chain`.
    pub construction: Option<Construction>,
    pub function: Option<String>,
    /// Second function for the starlike construction.
    pub starlike_f: Option<String>,
    pub field: Option<FieldSpec>,
    #[serde(default)]
    pub params: ParamMap,
    pub omega: Option<ComplexValue>,
    pub disk: Option<DiskConfig>,
    /// Chain time, or the end time `t` of `φ_{s,t}`.
    #[serde(default)]
    pub t: f64,
    #[serde(default)]
    pub s: f64,
    #[serde(default)]
    pub rho: f64,
    /// Target dilatation; defaults to the bound implied by the construction.
    pub k: Option<f64>,
    pub grid: Option<Grid>,
    /// Grid lines drawn in the image plot, per axis.
    #[serde(default = "default_lines")]
    pub lines: usize,
    pub seam_ys: Option<Vec<f64>>,
    pub eps_schedule: Option<Vec<f64>>,
    pub injectivity_grid: Option<Grid>,
    pub rect: Option<Rect>,
    #[serde(default)]
    pub solver: SolverConfig,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriteriaConfig {
    /// Function on the right half-plane.
    pub function: Option<String>,
    /// Function on the unit disk for `zf-over-f`.
    pub disk_function: Option<String>,
    /// `ψ` on the unit disk for `psi-prime`.
    pub psi: Option<String>,
    /// Auxiliary `f` for `ab`.
    pub f: Option<String>,
    #[serde(default)]
    pub params: ParamMap,
    /// Criteria to run; defaults to those applicable to the given functions.
    pub criteria: Option<Vec<String>>,
    /// Demanded `k` per criterion (or `K` for `zf-over-f`).
    #[serde(default)]
    pub targets: BTreeMap<String, f64>,
    /// Shift `a` for `qc2`.
    pub a: Option<ComplexValue>,
    /// Hyperbolic disk for `qc2` and `ab`.
    pub hyperbolic_disk: Option<DiskConfig>,
    pub grid: Option<Grid>,
    pub disk_grid: Option<Grid>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseSelection {
    pub id: String,
    #[serde(default)]
    pub params: ParamMap,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GalleryConfig {
    /// Cases to run; all cases with defaults when absent.
    pub cases: Option<Vec<CaseSelection>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    pub construction: Construction,
    pub function: String,
    pub starlike_f: Option<String>,
    #[serde(default)]
    pub params: ParamMap,
    pub omega: Option<ComplexValue>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub a: Option<f64>,
    pub times: Option<Vec<f64>>,
    pub grid: Option<Grid>,
    pub schedule: Option<RadiusSchedule>,
}

impl ChainConfig {
    pub fn criteria_params(&self) -> ChainCriteriaParams {
        let d = ChainCriteriaParams::default();
        ChainCriteriaParams {
            c1: self.c1.unwrap_or(d.c1),
            c2: self.c2.unwrap_or(d.c2),
            a: self.a.unwrap_or(d.a),
            times: self.times.clone().unwrap_or(d.times),
            grid: self.grid.unwrap_or(d.grid),
            schedule: self.schedule.unwrap_or(d.schedule),
        }
    }
}

fn yes() -> bool {
    true
}

fn default_lines() -> usize {
    13
}

/// Reads a config document. A `command` key, if present, must match.
pub fn load<T: for<'de> Deserialize<'de>>(path: &Path, command: &str) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let mut value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    if let Some(obj) = value.as_object_mut() {
        if let Some(c) = obj.remove("command") {
            if c.as_str() != Some(command) {
                return Err(CliError::config(format!("config is for command {c}, not \"{command}\"")));
            }
        }
    }
    serde_json::from_value(value).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_values() {
        let v: ParamMap = serde_json::from_str(r#"{"a": 2, "b": [1, -0.5]}"#).unwrap();
        assert_eq!(v["a"].value(), Complex64::new(2.0, 0.0));
        assert_eq!(v["b"].value(), Complex64::new(1.0, -0.5));
    }

    #[test]
    fn time_specs() {
        let t: TimeSpec = serde_json::from_str(r#"{"start": 0, "end": 1, "steps": 4}"#).unwrap();
        assert_eq!(t.times().unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let t: TimeSpec = serde_json::from_str("[0, 2, 1]").unwrap();
        assert!(t.times().is_err());
    }

    #[test]
    fn binder_tracks_parameters() {
        let params: ParamMap = serde_json::from_str(r#"{"a": 2, "b": 1}"#).unwrap();
        let mut b = Binder::new(&params);
        let e = b.expr("z + a").unwrap();
        assert_eq!(e.eval_zt(Complex64::new(1.0, 0.0), 0.0).unwrap(), Complex64::new(3.0, 0.0));
        assert!(b.expr("z + c").is_err());
        assert!(b.finish().is_err());
    }

    #[test]
    fn unknown_fields_rejected() {
        let r: Result<EvolveConfig, _> =
            serde_json::from_str(r#"{"field": "1", "points": [1], "times": [0, 1], "bogus": 1}"#);
        assert!(r.is_err());
    }
}
