//! Parameterized reconstructions of worked examples, each with closed-form
//! expectations that `run` checks numerically.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chains::{pde_residual, LoewnerChain};
use crate::criteria::{derivative_disk_k, necessary_bound_check, qc2_check};
use crate::error::{Error, Result};
use crate::evolution::EvolutionFamily;
use crate::expr::parse;
use crate::herglotz::HerglotzField;
use crate::numeric::{cauchy_derivative, schwarzian, Domain, EuclideanDisk, Grid, HoloMap, Layout};
use crate::qcext::{beltrami, PlanarMap, Rect};

pub type Params = BTreeMap<String, Complex64>;
type CheckFn = Arc<dyn Fn() -> Result<f64> + Send + Sync>;

/// One accepted parameter.
#[derive(Debug, Clone, Serialize)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: Complex64,
    pub real: bool,
    pub description: &'static str,
}

/// How an expectation was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    /// Stated in the source material.
    Published,
    /// Worked out independently (closed-form ODE solution, disk arithmetic).
    Derived,
    /// Identity or consistency check.
    Trivial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    /// `|achieved − expected| ≤ tolerance`.
    Close,
    /// `achieved ≤ expected + tolerance`.
    AtMost,
    /// `achieved ≥ expected − tolerance`.
    AtLeast,
}

#[derive(Clone)]
pub struct Expectation {
    pub quantity: String,
    pub expected: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub basis: Basis,
    check: CheckFn,
}

impl fmt::Debug for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Expectation")
            .field("quantity", &self.quantity)
            .field("expected", &self.expected)
            .field("tolerance", &self.tolerance)
            .field("comparison", &self.comparison)
            .field("basis", &self.basis)
            .finish()
    }
}

impl Expectation {
    fn new<F>(quantity: impl Into<String>, expected: f64, tolerance: f64, comparison: Comparison, basis: Basis, check: F) -> Self
    where
        F: Fn() -> Result<f64> + Send + Sync + 'static,
    {
        Expectation {
            quantity: quantity.into(),
            expected,
            tolerance,
            comparison,
            basis,
            check: Arc::new(check),
        }
    }

    pub fn evaluate(&self) -> ExpectationResult {
        let (achieved, message) = match (self.check)() {
            Ok(v) => (v, None),
            Err(e) => (f64::NAN, Some(e.to_string())),
        };
        let error = match self.comparison {
            Comparison::Close => (achieved - self.expected).abs(),
            Comparison::AtMost => (achieved - self.expected).max(0.0),
            Comparison::AtLeast => (self.expected - achieved).max(0.0),
        };
        ExpectationResult {
            quantity: self.quantity.clone(),
            expected: self.expected,
            achieved,
            error,
            tolerance: self.tolerance,
            comparison: self.comparison,
            basis: self.basis,
            pass: achieved.is_finite() && error <= self.tolerance,
            message,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpectationResult {
    pub quantity: String,
    pub expected: f64,
    pub achieved: f64,
    pub error: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub basis: Basis,
    pub pass: bool,
    pub message: Option<String>,
}

/// Objects a case constructs, by name.
#[derive(Clone, Default)]
pub struct CaseObjects {
    pub maps: Vec<(String, HoloMap)>,
    pub chains: Vec<(String, LoewnerChain)>,
    pub fields: Vec<(String, HerglotzField)>,
    pub planar: Vec<(String, PlanarMap)>,
}

impl fmt::Debug for CaseObjects {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = |v: Vec<&String>| v.into_iter().cloned().collect::<Vec<_>>();
        f.debug_struct("CaseObjects")
            .field("maps", &names(self.maps.iter().map(|m| &m.0).collect()))
            .field("chains", &names(self.chains.iter().map(|m| &m.0).collect()))
            .field("fields", &names(self.fields.iter().map(|m| &m.0).collect()))
            .field("planar", &names(self.planar.iter().map(|m| &m.0).collect()))
            .finish()
    }
}

#[derive(Debug, Clone)]
pub struct GalleryCase {
    pub id: &'static str,
    pub description: &'static str,
    pub params: Params,
    pub domain: Domain,
    pub objects: CaseObjects,
    pub expectations: Vec<Expectation>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseReport {
    pub id: String,
    pub params: BTreeMap<String, [f64; 2]>,
    pub results: Vec<ExpectationResult>,
    pub pass: bool,
}

struct CaseDef {
    id: &'static str,
    description: &'static str,
    params: &'static [(&'static str, f64, f64, bool, &'static str)],
    build: fn(&Params) -> Result<GalleryCase>,
}

const CASES: &[CaseDef] = &[
    CaseDef {
        id: "ellipse-radial",
        description: "disk chain a(t)z/(1−b(t)z²) onto nested ellipses; Schwarzian of φ_(0,2k) at 0",
        params: &[("k", 0.3, 0.0, true, "ellipse parameter in (0,1)")],
        build: build_ellipse,
    },
    CaseDef {
        id: "ex-h-rational",
        description: "h(z) = z − a/(1+az): bounded h′ and 1/h′ while the second-derivative test fails",
        params: &[("a", 2.0, 0.0, true, "positive real constant")],
        build: build_rational,
    },
    CaseDef {
        id: "sqrt-shift",
        description: "h(z) = √((z+1)² + α) and its hyperbolic-disk condition",
        params: &[("alpha", 1.0, 0.0, false, "complex shift with |α| < 2 + Re α")],
        build: build_sqrt_shift,
    },
    CaseDef {
        id: "power-inverse",
        description: "h(z) = 1/z^(1+k): sharpness of the 3/Re z bound",
        params: &[("k", 0.3, 0.0, true, "exponent offset in [0,1)")],
        build: build_power_inverse,
    },
    CaseDef {
        id: "range-counterexamples",
        description: "chains −t + log(z+1) and z − arctan t whose ranges are not all of ℂ",
        params: &[],
        build: build_ranges,
    },
];

/// Case identifiers with one-line descriptions.
pub fn list_cases() -> Vec<(&'static str, &'static str)> {
    CASES.iter().map(|c| (c.id, c.description)).collect()
}

fn case_def(id: &str) -> Result<&'static CaseDef> {
    CASES
        .iter()
        .find(|c| c.id == id)
        .ok_or_else(|| Error::Argument(format!("unknown gallery case '{id}'")))
}

/// Accepted parameters of a case.
pub fn schema(id: &str) -> Result<Vec<ParamSpec>> {
    Ok(case_def(id)?
        .params
        .iter()
        .map(|&(name, re, im, real, description)| ParamSpec {
            name,
            default: Complex64::new(re, im),
            real,
            description,
        })
        .collect())
}

/// Builds a case, filling omitted parameters with defaults.
pub fn build(id: &str, params: &Params) -> Result<GalleryCase> {
    let def = case_def(id)?;
    let spec = schema(id)?;
    for name in params.keys() {
        if !spec.iter().any(|s| s.name == name) {
            return Err(Error::Argument(format!("case '{id}' has no parameter '{name}'")));
        }
    }
    let mut full = Params::new();
    for s in &spec {
        let v = params.get(s.name).copied().unwrap_or(s.default);
        if !v.is_finite() || (s.real && v.im != 0.0) {
            return Err(Error::Argument(format!("parameter '{}' must be a finite{} number, got {v}", s.name, if s.real { " real" } else { "" })));
        }
        full.insert(s.name.to_string(), v);
    }
    (def.build)(&full)
}

/// Evaluates every expectation of the case.
pub fn run(case: &GalleryCase) -> CaseReport {
    let results: Vec<ExpectationResult> = case.expectations.par_iter().map(|e| e.evaluate()).collect();
    CaseReport {
        id: case.id.to_string(),
        params: case.params.iter().map(|(k, v)| (k.clone(), [v.re, v.im])).collect(),
        pass: results.iter().all(|r| r.pass),
        results,
    }
}

fn real_param(params: &Params, name: &str) -> f64 {
    params[name].re
}

fn case(id: &str, params: &Params, domain: Domain, objects: CaseObjects, expectations: Vec<Expectation>) -> Result<GalleryCase> {
    let def = case_def(id)?;
    Ok(GalleryCase {
        id: def.id,
        description: def.description,
        params: params.clone(),
        domain,
        objects,
        expectations,
    })
}

fn map_from(src: &str, params: &Params) -> Result<HoloMap> {
    let e = parse(src)?.bind(params);
    HoloMap::from_expr(Domain::RightHalfPlane, &e)
}

/// Cauchy-quadrature `|h″/h′|` at `z`, independent of symbolic derivatives.
fn cauchy_ratio(h: &HoloMap, z: Complex64) -> Result<f64> {
    let r = 0.25 * z.re;
    let d1 = cauchy_derivative(h, z, 1, r, 128)?;
    let d2 = cauchy_derivative(h, z, 2, r, 128)?;
    Ok((d2 / d1).norm())
}

fn ellipse_coeffs(k: f64, t: f64) -> (f64, f64) {
    (1.0 + t / (1.0 - k), (-k).max(k - t))
}

/// `f_t(z) = a z/(1 − b z²)` with its quadratic inverse.
pub fn ellipse_map(k: f64, t: f64) -> HoloMap {
    let (a, b) = ellipse_coeffs(k, t);
    HoloMap::new(Domain::UnitDisk, move |z| Ok(a * z / (1.0 - b * z * z)))
        .with_inverse(move |w| Ok(2.0 * w / (a + (a * a + 4.0 * b * w * w).sqrt())))
        .with_label(format!("{a}z/(1 - {b}z^2)"))
}

/// Exterior extension `g_t(ζ) = (ζ − b·ζ̄)/a` inside the closed disk and
/// `1/f_t(1/ζ)` outside.
pub fn ellipse_exterior(k: f64, t: f64) -> PlanarMap {
    let (a, b) = ellipse_coeffs(k, t);
    PlanarMap::new(Rect { x: [-3.0, 3.0], y: [-3.0, 3.0] }, vec![], move |z: Complex64| {
        if z.norm() <= 1.0 {
            Ok((z - b * z.conj()) / a)
        } else {
            let u = 1.0 / z;
            Ok((1.0 - b * u * u) / (a * u))
        }
    })
}

fn build_ellipse(params: &Params) -> Result<GalleryCase> {
    let k = real_param(params, "k");
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::Argument(format!("k must lie in (0,1), got {k}")));
    }
    let f0 = ellipse_map(k, 0.0);
    let f2k = ellipse_map(k, 2.0 * k);
    let phi = {
        let (f0, f2k) = (f0.clone(), f2k.clone());
        HoloMap::new(Domain::UnitDisk, move |z| f2k.inverse(f0.eval(z)?).expect("analytic inverse")).with_label("φ_(0,2k)")
    };
    let s_expected = 12.0 * k * (1.0 + k * k) / ((1.0 + k) * (1.0 + k));
    let mut ex = Vec::new();
    {
        let phi = phi.clone();
        ex.push(Expectation::new(
            "Sφ_(0,2k)(0)",
            s_expected,
            1e-6,
            Comparison::Close,
            Basis::Published,
            move || Ok(schwarzian(&phi, Complex64::new(0.0, 0.0))?.re),
        ));
    }
    {
        let phi = phi.clone();
        ex.push(Expectation::new(
            "|Sφ_(0,2k)(0)|/6 − k (positive: any extension of φ needs k′ > k)",
            0.0,
            0.0,
            Comparison::AtLeast,
            Basis::Published,
            move || Ok(schwarzian(&phi, Complex64::new(0.0, 0.0))?.norm() / 6.0 - k),
        ));
    }
    let disk_grid = Grid::new([0.05, 0.9], [0.0, 2.0 * std::f64::consts::PI], 12, 16, Layout::Polar)?;
    let mut planar = Vec::new();
    for t in [0.0, 0.5 * k, 2.0 * k, 1.0] {
        let g = ellipse_exterior(k, t);
        let b = ellipse_coeffs(k, t).1.abs();
        let pts = disk_grid.points();
        let g1 = g.clone();
        ex.push(Expectation::new(
            format!("max ||μ_g| − |b(t)|| inside the disk, t = {t}"),
            0.0,
            1e-6,
            Comparison::AtMost,
            Basis::Published,
            move || {
                pts.iter()
                    .map(|&z| Ok((beltrami(&g1, z, 1e-4)?.norm() - b).abs()))
                    .try_fold(0.0f64, |m, v: Result<f64>| Ok(m.max(v?)))
            },
        ));
        let f = ellipse_map(k, t);
        ex.push(Expectation::new(
            format!("max |(ζ − b ζ̄)/a − 1/f_t(1/ζ)| on |ζ| = 1, t = {t}"),
            0.0,
            1e-10,
            Comparison::AtMost,
            Basis::Derived,
            move || {
                let (a, b) = ellipse_coeffs(k, t);
                (0..64)
                    .map(|j| {
                        let z = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / 64.0);
                        // f_t(1/ζ) needs 1/ζ in the open disk; approach from outside
                        let zz = z * (1.0 + 1e-12);
                        Ok(((z - b * z.conj()) / a - 1.0 / f.eval(1.0 / zz)?).norm())
                    })
                    .try_fold(0.0f64, |m, v: Result<f64>| Ok(m.max(v?)))
            },
        ));
        planar.push((format!("g_{t}"), g));
    }
    {
        let f = ellipse_map(k, 1.0);
        ex.push(Expectation::new(
            "max |f_t⁻¹(f_t(z)) − z| on a disk grid, t = 1",
            0.0,
            1e-12,
            Comparison::AtMost,
            Basis::Trivial,
            move || {
                Grid::disk_default()
                    .points()
                    .iter()
                    .map(|&z| Ok((f.inverse(f.eval(z)?).expect("analytic inverse")? - z).norm()))
                    .try_fold(0.0f64, |m, v: Result<f64>| Ok(m.max(v?)))
            },
        ));
    }
    let objects = CaseObjects {
        maps: vec![("f_0".into(), f0), ("f_2k".into(), f2k), ("phi_0_2k".into(), phi)],
        planar,
        ..Default::default()
    };
    case("ellipse-radial", params, Domain::UnitDisk, objects, ex)
}

fn build_rational(params: &Params) -> Result<GalleryCase> {
    let a = real_param(params, "a");
    if !(a > 0.0) {
        return Err(Error::Argument(format!("a must be positive, got {a}")));
    }
    let h = map_from("z - a/(1+a*z)", params)?;
    let mut ex = Vec::new();
    {
        let h = h.clone();
        ex.push(Expectation::new(
            "|h″/h′| at z = 1/a",
            a.powi(3) / (4.0 + a * a),
            1e-8,
            Comparison::Close,
            Basis::Published,
            move || cauchy_ratio(&h, Complex64::new(1.0 / a, 0.0)),
        ));
    }
    {
        let h = h.clone();
        ex.push(Expectation::new(
            "2 Re z |h″/h′| at z = 1/a (≥ 1 exactly when a ≥ 2)",
            2.0 * a * a / (4.0 + a * a),
            1e-8,
            Comparison::Close,
            Basis::Derived,
            move || Ok(2.0 / a * cauchy_ratio(&h, Complex64::new(1.0 / a, 0.0))?),
        ));
    }
    // h′(H) = 1 + a²·{w² : |w − ½| < ½}, whose convex hull reaches Re = 1 − a²/8
    let admissible = a * a < 8.0;
    let grid = Grid::half_plane_default();
    {
        let h = h.clone();
        let grid = grid.clone();
        ex.push(Expectation::new(
            "a disk around sampled h′ avoids 0 (1 = yes; expected exactly when a < 2√2)",
            if admissible { 1.0 } else { 0.0 },
            0.0,
            Comparison::Close,
            Basis::Derived,
            move || {
                let r = derivative_disk_k(&h, &grid)?;
                Ok(if r.admissible && r.k_min < 1.0 { 1.0 } else { 0.0 })
            },
        ));
    }
    {
        let h = h.clone();
        let grid = grid.clone();
        ex.push(Expectation::new(
            "sampled min Re h′ (not below 1 − a²/8)",
            1.0 - a * a / 8.0,
            1e-12,
            Comparison::AtLeast,
            Basis::Derived,
            move || {
                grid.points()
                    .iter()
                    .map(|&z| h.derivative(z, 1).map(|d| d.re))
                    .try_fold(f64::INFINITY, |m, v| v.map(|v| m.min(v)))
            },
        ));
    }
    {
        let h = h.clone();
        let grid = grid.clone();
        ex.push(Expectation::new(
            "sampled max |h′| (bounded by 1 + a²)",
            1.0 + a * a,
            1e-12,
            Comparison::AtMost,
            Basis::Published,
            move || {
                grid.points()
                    .iter()
                    .map(|&z| h.derivative(z, 1).map(|d| d.norm()))
                    .try_fold(0.0f64, |m, v| v.map(|v| m.max(v)))
            },
        ));
    }
    {
        let h = h.clone();
        ex.push(Expectation::new(
            "sampled min |h′| (bounded away from 0)",
            0.0,
            0.0,
            Comparison::AtLeast,
            Basis::Published,
            move || {
                let m = grid
                    .points()
                    .iter()
                    .map(|&z| h.derivative(z, 1).map(|d| d.norm()))
                    .try_fold(f64::INFINITY, |m, v| v.map(|v| m.min(v)))?;
                if m > 0.0 { Ok(m) } else { Err(Error::Hypothesis("h' vanishes on the grid".into())) }
            },
        ));
    }
    let objects = CaseObjects {
        maps: vec![("h".into(), h)],
        ..Default::default()
    };
    case("ex-h-rational", params, Domain::RightHalfPlane, objects, ex)
}

/// `K = √((2 + Re α + |α|)/(2 + Re α − |α|))`.
pub fn sqrt_shift_dilatation(alpha: Complex64) -> f64 {
    let s = 2.0 + alpha.re;
    ((s + alpha.norm()) / (s - alpha.norm())).sqrt()
}

/// Branch points `−1 ± √(−α)` of `√((z+1)² + α)`.
pub fn sqrt_shift_branch_points(alpha: Complex64) -> [Complex64; 2] {
    let r = (-alpha).sqrt();
    [r - 1.0, -r - 1.0]
}

fn build_sqrt_shift(params: &Params) -> Result<GalleryCase> {
    let alpha = params["alpha"];
    let by_modulus = alpha.norm() < 2.0 + alpha.re;
    let by_branch = sqrt_shift_branch_points(alpha).iter().all(|b| b.re < 0.0);
    if !(by_modulus && by_branch) {
        return Err(Error::Argument(format!(
            "α = {alpha} needs |α| < 2 + Re α so no branch point lies in the closed half-plane"
        )));
    }
    let h = map_from("sqrt((z+1)^2 + alpha)", params)?;
    // (h/h′) − z = 1 + α/(z+1) fills the Euclidean disk about 1 + α/2 of radius |α|/2
    let image = EuclideanDisk::new(1.0 + 0.5 * alpha, 0.5 * alpha.norm())?;
    let d = image
        .to_hyperbolic()
        .ok_or_else(|| Error::Argument(format!("image disk for α = {alpha} leaves H")))?;
    let big_k = sqrt_shift_dilatation(alpha);
    let mut ex = vec![Expectation::new(
        "K from the hyperbolic radius of the image disk, e^(2R)",
        big_k,
        1e-10,
        Comparison::Close,
        Basis::Published,
        move || Ok((2.0 * d.radius).exp()),
    )];
    {
        let h = h.clone();
        ex.push(Expectation::new(
            "qc2 hyperbolic overshoot (h/h′ − z in D)",
            0.0,
            1e-10,
            Comparison::AtMost,
            Basis::Published,
            move || {
                let r = qc2_check(&h, Complex64::new(0.0, 0.0), &d, &Grid::half_plane_default())?;
                if !r.admissible {
                    return Err(Error::Hypothesis("h/h' - z leaves H".into()));
                }
                Ok(r.margin)
            },
        ));
    }
    {
        let h = h.clone();
        ex.push(Expectation::new(
            "max |h(z)² − (z+1)² − α| on the default grid",
            0.0,
            1e-9,
            Comparison::AtMost,
            Basis::Trivial,
            move || {
                Grid::half_plane_default()
                    .points()
                    .iter()
                    .filter(|z| z.norm() < 1e3)
                    .map(|&z| {
                        let v = h.eval(z)?;
                        let w = (z + 1.0) * (z + 1.0) + alpha;
                        Ok((v * v - w).norm() / (1.0 + w.norm()))
                    })
                    .try_fold(0.0f64, |m, v: Result<f64>| Ok(m.max(v?)))
            },
        ));
    }
    let objects = CaseObjects {
        maps: vec![("h".into(), h)],
        ..Default::default()
    };
    case("sqrt-shift", params, Domain::RightHalfPlane, objects, ex)
}

fn build_power_inverse(params: &Params) -> Result<GalleryCase> {
    let k = real_param(params, "k");
    if !(0.0..1.0).contains(&k) {
        return Err(Error::Argument(format!("k must lie in [0,1), got {k}")));
    }
    let h = map_from("z^(-(1+k))", params)?;
    let mut ex = Vec::new();
    {
        let h = h.clone();
        ex.push(Expectation::new(
            "|h″(1)/h′(1)|",
            2.0 + k,
            1e-8,
            Comparison::Close,
            Basis::Published,
            move || cauchy_ratio(&h, Complex64::new(1.0, 0.0)),
        ));
    }
    {
        let h = h.clone();
        ex.push(Expectation::new(
            "sampled sup Re z |h″/h′| / 3 (at most 1: consistent with univalence)",
            1.0,
            0.0,
            Comparison::AtMost,
            Basis::Published,
            move || Ok(necessary_bound_check(&h, None, &Grid::half_plane_default())?.k_min),
        ));
    }
    {
        let h = h.clone();
        ex.push(Expectation::new(
            "sup Re z |h″/h′| / 3 on the real axis exceeds k (no k-q.c. extension fixing ∞)",
            k,
            0.0,
            Comparison::AtLeast,
            Basis::Published,
            move || {
                let g = Grid::new([0.5, 2.0], [0.0, 0.0], 7, 1, Layout::LogX)?;
                let r = necessary_bound_check(&h, Some(k), &g)?;
                Ok(r.k_min - 1e-12)
            },
        ));
    }
    let objects = CaseObjects {
        maps: vec![("h".into(), h)],
        ..Default::default()
    };
    case("power-inverse", params, Domain::RightHalfPlane, objects, ex)
}

/// Closed-form Loewner ranges: `|Im w| < π/2` for `−t + log(z+1)` and
/// `Re w > −π/2` for `z − arctan t`.
pub fn counterexample_range_contains(which: usize, w: Complex64) -> bool {
    match which {
        1 => w.im.abs() < std::f64::consts::FRAC_PI_2,
        _ => w.re > -std::f64::consts::FRAC_PI_2,
    }
}

fn build_ranges(params: &Params) -> Result<GalleryCase> {
    let p1 = HerglotzField::from_expr(&parse("z + 1")?)?;
    let p2 = HerglotzField::from_expr(&parse("1/(1+t^2)")?)?;
    let c1 = LoewnerChain::new(Domain::RightHalfPlane, |t, z| Ok((z + 1.0).ln() - t), p1.clone())
        .with_dt(|_, _| Ok(Complex64::new(-1.0, 0.0)))
        .with_dz(|_, z| Ok(1.0 / (z + 1.0)))
        .with_label("-t + log(z+1)");
    let c2 = LoewnerChain::new(Domain::RightHalfPlane, |t, z| Ok(z - t.atan()), p2.clone())
        .with_dt(|t, _| Ok(Complex64::new(-1.0 / (1.0 + t * t), 0.0)))
        .with_dz(|_, _| Ok(Complex64::new(1.0, 0.0)))
        .with_label("z - arctan t");
    let probes = [Complex64::new(0.5, 0.0), Complex64::new(2.0, -3.0), Complex64::new(0.1, 5.0)];
    let times = [0.0, 0.5, 2.0, 7.0];
    let mut ex = Vec::new();
    for (name, c) in [("−t + log(z+1)", c1.clone()), ("z − arctan t", c2.clone())] {
        ex.push(Expectation::new(
            format!("max PDE residual of {name}"),
            0.0,
            1e-7,
            Comparison::AtMost,
            Basis::Trivial,
            move || {
                let mut m: f64 = 0.0;
                for &t in &times {
                    for &z in &probes {
                        m = m.max(pde_residual(&c, z, t, 1e-4)?);
                    }
                }
                Ok(m)
            },
        ));
    }
    let e1 = Arc::new(EvolutionFamily::new(p1.clone()));
    {
        let e1 = e1.clone();
        let expected = (10f64.exp() / (2.0 * 10f64.exp() - 1.0)).ln();
        ex.push(Expectation::new(
            "α(10) for p = z + 1",
            expected,
            1e-6,
            Comparison::Close,
            Basis::Derived,
            move || e1.alpha_diagnostic(10.0),
        ));
    }
    ex.push(Expectation::new(
        "min α(t), t ∈ [0, 20], for p = z + 1 (bounded below by log ½)",
        0.5f64.ln(),
        1e-6,
        Comparison::AtLeast,
        Basis::Derived,
        move || {
            (0..=20)
                .map(|t| e1.alpha_diagnostic(t as f64))
                .try_fold(f64::INFINITY, |m, v| v.map(|v| m.min(v)))
        },
    ));
    // iπ is outside the first range: f_t⁻¹(iπ) = e^(iπ+t) − 1 has Re < 0 for all t
    ex.push(Expectation::new(
        "max over t of Re f_t⁻¹(iπ) for −t + log(z+1) (negative: iπ is never attained)",
        0.0,
        0.0,
        Comparison::AtMost,
        Basis::Derived,
        || {
            let w = Complex64::new(0.0, std::f64::consts::PI);
            Ok((0..=400).map(|j| ((w + j as f64 * 0.1).exp() - 1.0).re).fold(f64::NEG_INFINITY, f64::max))
        },
    ));
    ex.push(Expectation::new(
        "max over t of Re f_t⁻¹(−2) for z − arctan t (negative: −2 is never attained)",
        0.0,
        0.0,
        Comparison::AtMost,
        Basis::Derived,
        || Ok((0..=400).map(|j| -2.0 + (j as f64 * 0.25).atan()).fold(f64::NEG_INFINITY, f64::max)),
    ));
    for (which, c) in [(1usize, c1.clone()), (2, c2.clone())] {
        ex.push(Expectation::new(
            format!("fraction of sampled f_t(z) outside the closed-form range of chain {which}"),
            0.0,
            0.0,
            Comparison::AtMost,
            Basis::Derived,
            move || {
                let g = Grid::new([1e-2, 1e2], [-20.0, 20.0], 12, 12, Layout::LogX)?;
                let mut outside = 0usize;
                let mut n = 0usize;
                for &t in &[0.0, 1.0, 10.0] {
                    for z in g.points() {
                        n += 1;
                        if !counterexample_range_contains(which, c.eval(t, z)?) {
                            outside += 1;
                        }
                    }
                }
                Ok(outside as f64 / n as f64)
            },
        ));
    }
    let objects = CaseObjects {
        chains: vec![("f1".into(), c1), ("f2".into(), c2)],
        fields: vec![("p1".into(), p1), ("p2".into(), p2)],
        ..Default::default()
    };
    case("range-counterexamples", params, Domain::RightHalfPlane, objects, ex)
}
