//! Quasiconformal extensions across the imaginary axis as planar maps,
//! with Beltrami, injectivity, and seam diagnostics.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chains::LoewnerChain;
use crate::error::{Error, Result};
use crate::evolution::EvolutionFamily;
use crate::numeric::{
    min_enclosing_disk, min_ratio_disk, pre_schwarzian, schwarzian, tends_to_infinity, Domain, EuclideanDisk, Grid,
    HoloMap, Layout,
};

pub type PlaneFn = Arc<dyn Fn(Complex64) -> Result<Complex64> + Send + Sync>;

/// Default offset used to approximate boundary values on `iℝ`.
pub const BOUNDARY_EPS: f64 = 1e-4;
/// Default slack on `sup |μ| ≤ k`.
pub const DILATATION_TOL: f64 = 1e-3;

/// Closed axis-parallel rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x: [f64; 2],
    pub y: [f64; 2],
}

impl Rect {
    pub fn new(x: [f64; 2], y: [f64; 2]) -> Result<Self> {
        if !(x[0] < x[1] && y[0] < y[1]) || !x.iter().chain(y.iter()).all(|v| v.is_finite()) {
            return Err(Error::Argument(format!("malformed rectangle {x:?} × {y:?}")));
        }
        Ok(Rect { x, y })
    }

    pub fn contains(&self, z: Complex64) -> bool {
        let tol = 1e-12 * (1.0 + z.norm());
        z.re >= self.x[0] - tol && z.re <= self.x[1] + tol && z.im >= self.y[0] - tol && z.im <= self.y[1] + tol
    }
}

impl Default for Rect {
    fn default() -> Self {
        Rect {
            x: [-4.0, 4.0],
            y: [-4.0, 4.0],
        }
    }
}

/// Shared options for the extension constructors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtensionOptions {
    pub rect: Rect,
    /// Boundary-evaluation offset.
    pub eps: f64,
    /// Build even when a sampled hypothesis fails.
    pub force: bool,
}

impl Default for ExtensionOptions {
    fn default() -> Self {
        ExtensionOptions {
            rect: Rect::default(),
            eps: BOUNDARY_EPS,
            force: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtensionKind {
    Chain,
    Evolution,
    HalfplaneLinear,
    Schwarzian,
    LogLift,
    Custom,
}

/// Outcome of a sampled hypothesis test made at construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisCheck {
    pub holds: bool,
    pub detail: String,
}

/// A piecewise-defined map of a rectangle in ℂ.
#[derive(Clone)]
pub struct PlanarMap {
    eval: PlaneFn,
    rect: Rect,
    seams: Vec<f64>,
    kind: ExtensionKind,
    right: String,
    left: String,
    rho: f64,
    eps: f64,
    hypothesis: Option<HypothesisCheck>,
    analytic_mu: Option<PlaneFn>,
}

impl fmt::Debug for PlanarMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PlanarMap")
            .field("kind", &self.kind)
            .field("rect", &self.rect)
            .field("seams", &self.seams)
            .field("right", &self.right)
            .field("left", &self.left)
            .field("rho", &self.rho)
            .field("eps", &self.eps)
            .field("hypothesis", &self.hypothesis)
            .finish()
    }
}

impl PlanarMap {
    pub fn new<F>(rect: Rect, seams: Vec<f64>, eval: F) -> Self
    where
        F: Fn(Complex64) -> Result<Complex64> + Send + Sync + 'static,
    {
        PlanarMap {
            eval: Arc::new(eval),
            rect,
            seams,
            kind: ExtensionKind::Custom,
            right: "custom".into(),
            left: "custom".into(),
            rho: 0.0,
            eps: BOUNDARY_EPS,
            hypothesis: None,
            analytic_mu: None,
        }
    }

    fn describe(mut self, kind: ExtensionKind, right: impl Into<String>, left: impl Into<String>) -> Self {
        self.kind = kind;
        self.right = right.into();
        self.left = left.into();
        self
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if !self.rect.contains(z) {
            return Err(Error::DomainViolation {
                point: z,
                radius: 0.0,
                domain: format!("rectangle {:?} × {:?}", self.rect.x, self.rect.y),
            });
        }
        let v = (self.eval)(z)?;
        if !v.is_finite() {
            return Err(Error::Evaluation {
                point: z,
                reason: "extension value is not finite".into(),
            });
        }
        Ok(v)
    }

    pub fn rect(&self) -> Rect {
        self.rect
    }

    /// Vertical lines `x = s` where the construction switches branch.
    pub fn seams(&self) -> &[f64] {
        &self.seams
    }

    pub fn kind(&self) -> ExtensionKind {
        self.kind
    }

    /// Human-readable descriptions of the `Re z ≥ 0` and `Re z < 0` sides.
    pub fn sides(&self) -> (&str, &str) {
        (&self.right, &self.left)
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn hypothesis(&self) -> Option<&HypothesisCheck> {
        self.hypothesis.as_ref()
    }

    /// Closed-form Beltrami coefficient, when the construction has one.
    pub fn analytic_mu(&self, z: Complex64) -> Option<Result<Complex64>> {
        self.analytic_mu.as_ref().map(|m| m(z))
    }
}

/// `2g(ε + iy) − g(2ε + iy)`, a second-order approximation of `g(iy)`.
fn boundary_value<G>(g: G, y: f64, eps: f64) -> Result<Complex64>
where
    G: Fn(Complex64) -> Result<Complex64>,
{
    Ok(2.0 * g(Complex64::new(eps, y))? - g(Complex64::new(2.0 * eps, y))?)
}

fn check_offsets(rho: f64, eps: f64) -> Result<()> {
    if !(rho >= 0.0 && rho.is_finite()) {
        return Err(Error::Argument(format!("regularization ρ = {rho} must be >= 0")));
    }
    if !(eps > 0.0) {
        return Err(Error::Argument(format!("boundary offset ε = {eps} must be > 0")));
    }
    Ok(())
}

/// `F(x+iy) = f_t(x+ρ+iy)` for `x > 0` and `F(x+iy) = f_{t−x}(ρ+iy)` for
/// `x ≤ 0`. With `ρ = 0` the boundary values come from [`boundary_value`].
pub fn extend_chain(c: &LoewnerChain, t: f64, rho: f64, opts: &ExtensionOptions) -> Result<PlanarMap> {
    check_offsets(rho, opts.eps)?;
    if !(t >= 0.0) {
        return Err(Error::Argument(format!("chain time {t} must be >= 0")));
    }
    if !c.domain().is_half_plane() {
        return Err(Error::DomainMismatch {
            expected: Domain::RightHalfPlane.to_string(),
            found: c.domain().to_string(),
        });
    }
    let ch = c.clone();
    let eps = opts.eps;
    let mut m = PlanarMap::new(opts.rect, vec![0.0], move |z| {
        if z.re > 0.0 {
            return ch.eval(t, z + rho);
        }
        let s = t - z.re;
        if rho > 0.0 {
            ch.eval(s, Complex64::new(rho, z.im))
        } else {
            boundary_value(|w| ch.eval(s, w), z.im, eps)
        }
    })
    .describe(
        ExtensionKind::Chain,
        format!("f_t(z + ρ), t = {t}"),
        "f_{t−x}(ρ + iy)",
    );
    m.rho = rho;
    m.eps = eps;
    Ok(m)
}

/// Extension of `φ_{s,t}`: `φ_{s,t}(z + ρ)` on the right, `φ_{s−x,t}(ρ + iy)`
/// for `−(t−s) < x ≤ 0`, and `ρ + iy + t − s + x` further left.
pub fn extend_evolution(
    e: &Arc<EvolutionFamily>,
    s: f64,
    t: f64,
    rho: f64,
    opts: &ExtensionOptions,
) -> Result<PlanarMap> {
    check_offsets(rho, opts.eps)?;
    if !(0.0 <= s && s <= t) {
        return Err(Error::Argument(format!("need 0 <= s <= t, got {s}, {t}")));
    }
    let e = e.clone();
    let eps = opts.eps;
    let span = t - s;
    let seams = if span > 0.0 { vec![0.0, -span] } else { vec![0.0] };
    let mut m = PlanarMap::new(opts.rect, seams, move |z| {
        if z.re > 0.0 {
            return e.evolve(s, t, z + rho);
        }
        let a = -z.re;
        if a > span {
            let base = if rho > 0.0 { rho } else { 0.0 };
            return Ok(Complex64::new(base, z.im) + span - a);
        }
        let g = |w: Complex64| e.evolve(s + a, t, w);
        if rho > 0.0 {
            g(Complex64::new(rho, z.im))
        } else {
            boundary_value(g, z.im, eps)
        }
    })
    .describe(
        ExtensionKind::Evolution,
        format!("φ_(s,t)(z + ρ), s = {s}, t = {t}"),
        "φ_(s−x,t)(ρ + iy), then translation",
    );
    m.rho = rho;
    m.eps = eps;
    Ok(m)
}

fn membership_tolerance(disk: &EuclideanDisk) -> f64 {
    1e-9 * (1.0 + disk.center.norm())
}

/// `h̃(x+iy) = h(iy) + ωx` for `x ≤ 0` with `ω = √(w1 w2)` from the
/// extremal-modulus points of `B ⊇ h′(H)`.
pub fn extend_halfplane_linear(h: &HoloMap, b: &EuclideanDisk, opts: &ExtensionOptions) -> Result<PlanarMap> {
    check_offsets(0.0, opts.eps)?;
    let omega = b
        .geometric_center()
        .filter(|_| b.excludes_origin())
        .ok_or_else(|| Error::Hypothesis(format!("disk {b:?} contains 0")))?;
    let probe = Grid::new([1e-3, 1e3], [-50.0, 50.0], 40, 40, Layout::LogX)?;
    let tol = membership_tolerance(b);
    let worst = probe
        .points()
        .par_iter()
        .map(|&z| h.derivative(z, 1).map(|d| (b.margin(d), z)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold((f64::NEG_INFINITY, Complex64::new(0.0, 0.0)), |a, v| if v.0 > a.0 { v } else { a });
    let holds = worst.0 <= tol;
    let detail = format!("max distance of h′ outside B is {:e} at {}", worst.0.max(0.0), worst.1);
    if !holds && !opts.force {
        return Err(Error::Hypothesis(format!("h′(H) ⊄ B: {detail}")));
    }
    let eps = opts.eps;
    let (h1, h2) = (h.clone(), h.clone());
    let mut m = PlanarMap::new(opts.rect, vec![0.0], move |z| {
        if z.re > 0.0 {
            h1.eval(z)
        } else {
            Ok(boundary_value(|w| h1.eval(w), z.im, eps)? + omega * z.re)
        }
    })
    .describe(ExtensionKind::HalfplaneLinear, "h(z)", format!("h(iy) + ωx, ω = {omega}"));
    m.eps = eps;
    m.hypothesis = Some(HypothesisCheck { holds, detail });
    m.analytic_mu = Some(Arc::new(move |z| {
        if z.re > 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let d = boundary_value(|w| h2.derivative(w, 1), z.im, eps)?;
        Ok((omega - d) / (omega + d))
    }));
    Ok(m)
}

/// The linear extension's `ω` for a disk.
pub fn linear_extension_omega(b: &EuclideanDisk) -> Option<Complex64> {
    b.geometric_center().filter(|_| b.excludes_origin())
}

/// Sampled `sup 2(Re z)² |Sh(z)|` over a probe grid.
fn sampled_nehari_k(h: &HoloMap) -> Result<(f64, Complex64)> {
    let probe = Grid::new([1e-2, 1e2], [-20.0, 20.0], 30, 30, Layout::LogX)?;
    let vals = probe
        .points()
        .par_iter()
        .map(|&z| schwarzian(h, z).map(|s| (2.0 * z.re * z.re * s.norm(), z)))
        .collect::<Result<Vec<_>>>()?;
    Ok(vals
        .into_iter()
        .fold((0.0, Complex64::new(0.0, 0.0)), |a, v| if v.0 > a.0 { v } else { a }))
}

/// For `Re z < 0`: `h(z*) + 2h′(z*) Re z / (1 − Ph(z*) Re z)`, `z* = −z̄`.
pub fn extend_schwarzian(h: &HoloMap, opts: &ExtensionOptions) -> Result<PlanarMap> {
    check_offsets(0.0, opts.eps)?;
    let (k, at) = sampled_nehari_k(h)?;
    let grows = tends_to_infinity(h)?;
    let holds = k < 1.0 && grows;
    let detail = format!(
        "sampled sup 2(Re z)²|Sh| = {k} at {at}; h(x) → ∞ along the real axis: {grows}"
    );
    if !holds && !opts.force {
        return Err(Error::Hypothesis(detail));
    }
    let h1 = h.clone();
    let mut m = PlanarMap::new(opts.rect, vec![0.0], move |z| {
        if z.re > 0.0 {
            return h1.eval(z);
        }
        let zs = Complex64::new(-z.re, z.im);
        if z.re == 0.0 {
            return h1.eval(zs);
        }
        let p = pre_schwarzian(&h1, zs)?;
        let den = 1.0 - p * z.re;
        if den.norm() <= 1e-14 {
            return Err(Error::Pole {
                point: z,
                reason: "1 − Ph(z*)·Re z vanishes".into(),
            });
        }
        Ok(h1.eval(zs)? + 2.0 * h1.derivative(zs, 1)? * z.re / den)
    })
    .describe(ExtensionKind::Schwarzian, "h(z)", "h(z*) + 2h′(z*)Re z/(1 − Ph(z*)Re z)");
    m.hypothesis = Some(HypothesisCheck { holds, detail });
    Ok(m)
}

/// `h = −log f(e^{−z})` extended linearly, together with the descent to the
/// `w`-plane.
#[derive(Clone, Debug)]
pub struct LogLift {
    /// The extension in `ζ = −log w` coordinates.
    pub lifted: PlanarMap,
    /// Fitted disk containing `z f′/f`.
    pub disk: EuclideanDisk,
    pub big_k: f64,
    pub k: f64,
    /// `max |h̃(ζ + 2πi) − h̃(ζ) − 2πi|` over the lifted rectangle samples.
    pub period_residual: f64,
}

impl LogLift {
    /// `f̃(w) = exp(−h̃(−log w))` for `w ≠ 0`.
    pub fn descended(&self, w: Complex64) -> Result<Complex64> {
        if w.norm() == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok((-(self.lifted.eval)(-w.ln())?).exp())
    }
}

/// Extension of a disk map with `z f′/f ∈ B`: lift to H,
/// extend linearly, and descend using the `2πi`-periodicity.
pub fn extend_log_lift(f: &HoloMap, b: &EuclideanDisk, k_bound: f64, opts: &ExtensionOptions) -> Result<LogLift> {
    if f.domain() != Domain::UnitDisk {
        return Err(Error::DomainMismatch {
            expected: Domain::UnitDisk.to_string(),
            found: f.domain().to_string(),
        });
    }
    let origin = Complex64::new(0.0, 0.0);
    let f0 = f.eval(origin)?;
    if f0.norm() > 1e-12 {
        return Err(Error::Hypothesis(format!("f(0) = {f0} is not 0")));
    }
    if f.derivative(origin, 1)?.norm() <= 1e-12 {
        return Err(Error::Hypothesis("f′(0) vanishes".into()));
    }
    let big_k = b.modulus_ratio_root();
    let tol = membership_tolerance(b);
    let probe = Grid::disk_default();
    let worst = probe
        .points()
        .par_iter()
        .map(|&w| -> Result<f64> {
            let v = f.eval(w)?;
            if v.norm() == 0.0 {
                return Err(Error::Hypothesis(format!("f vanishes at {w} ≠ 0")));
            }
            Ok(b.margin(w * f.derivative(w, 1)? / v))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let in_disk = worst <= tol;
    let bounded = big_k <= k_bound * (1.0 + 1e-12);
    if !(in_disk && bounded) && !opts.force {
        return Err(Error::Hypothesis(format!(
            "z f′/f leaves B by {worst:e} or K = {big_k} exceeds {k_bound}"
        )));
    }
    // h(z) = z − log g(e^{−z}) with g(w) = f(w)/w, continuous through w = 0
    let g = {
        let f = f.clone();
        move |w: Complex64| -> Result<Complex64> {
            if w.norm() < 1e-8 {
                // g(w) = f′(0) + f″(0) w/2 + …
                return Ok(f.derivative(Complex64::new(0.0, 0.0), 1)? + 0.5 * w * f.derivative(Complex64::new(0.0, 0.0), 2)?);
            }
            Ok(f.eval(w)? / w)
        }
    };
    let g1 = g.clone();
    let f1 = f.clone();
    let h = HoloMap::new(Domain::RightHalfPlane, move |z| Ok(z - g1((-z).exp())?.ln())).with_derivative(1, move |z| {
        let w = (-z).exp();
        if w.norm() < 1e-8 {
            return Ok(Complex64::new(1.0, 0.0));
        }
        Ok(w * f1.derivative(w, 1)? / f1.eval(w)?)
    });
    let rect = Rect::new(opts.rect.x, [-3.0 * std::f64::consts::PI, 3.0 * std::f64::consts::PI])?;
    let lifted = extend_halfplane_linear(
        &h,
        b,
        &ExtensionOptions {
            rect,
            force: true,
            ..*opts
        },
    )?
    .describe(ExtensionKind::LogLift, "−log f(e^{−z})", "h(iy) + ωx");
    let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    let xs: Vec<f64> = (0..9).map(|i| rect.x[0] + (rect.x[1] - rect.x[0]) * i as f64 / 8.0).collect();
    let ys: Vec<f64> = (0..17).map(|j| -std::f64::consts::PI + 2.0 * std::f64::consts::PI * j as f64 / 16.0).collect();
    let mut period_residual: f64 = 0.0;
    for &x in &xs {
        for &y in &ys {
            let z = Complex64::new(x, y);
            let r = ((lifted.eval)(z + two_pi_i)? - (lifted.eval)(z)? - two_pi_i).norm();
            period_residual = period_residual.max(r);
        }
    }
    if period_residual > 1e-8 {
        return Err(Error::Consistency(format!(
            "lifted extension is not 2πi-periodic (residual {period_residual:e})"
        )));
    }
    Ok(LogLift {
        lifted,
        disk: *b,
        big_k,
        k: (big_k - 1.0) / (big_k + 1.0),
        period_residual,
    })
}

/// Fits the least-`K` disk around sampled `z f′/f` on the default disk grid,
/// falling back to the smallest disk when every enclosing disk meets 0.
pub fn fit_log_derivative_disk(f: &HoloMap) -> Result<EuclideanDisk> {
    let samples = Grid::disk_default()
        .points()
        .par_iter()
        .map(|&w| Ok(w * f.derivative(w, 1)? / f.eval(w)?))
        .collect::<Result<Vec<_>>>()?;
    match min_ratio_disk(&samples)? {
        Some(d) => Ok(d),
        None => min_enclosing_disk(&samples),
    }
}

/// Default finite-difference step at `z`.
pub fn default_step(z: Complex64) -> f64 {
    1e-4 * (1.0 + z.norm())
}

/// `μ = (F_x + iF_y)/(F_x − iF_y)` from central differences.
pub fn beltrami(f: &PlanarMap, z: Complex64, step: f64) -> Result<Complex64> {
    if !(step > 0.0) {
        return Err(Error::Argument(format!("step must be positive, got {step}")));
    }
    for &s in &f.seams {
        if z.re - step <= s && s <= z.re + step {
            return Err(Error::Stencil { point: z, step, seam: s });
        }
    }
    let hx = Complex64::new(step, 0.0);
    let hy = Complex64::new(0.0, step);
    let fx = (f.eval(z + hx)? - f.eval(z - hx)?) / (2.0 * step);
    let fy = (f.eval(z + hy)? - f.eval(z - hy)?) / (2.0 * step);
    let i = Complex64::new(0.0, 1.0);
    let den = fx - i * fy;
    let scale = fx.norm() + fy.norm();
    if den.norm() <= 1e-14 * scale || scale == 0.0 {
        return Err(Error::Degenerate { point: z });
    }
    Ok((fx + i * fy) / den)
}

#[derive(Debug, Clone, Serialize)]
pub struct DilatationSample {
    pub z: Complex64,
    pub value: Complex64,
    pub mu: Complex64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DilatationReport {
    pub samples: Vec<DilatationSample>,
    pub sup_abs_mu: f64,
    pub worst_point: Option<Complex64>,
    pub violations: Vec<Complex64>,
    /// Points skipped because the stencil met a seam or left the rectangle.
    pub skipped: usize,
    pub failures: Vec<String>,
    pub k_target: f64,
    pub tolerance: f64,
    /// Fixed step, or `None` for the default `1e−4·(1+|z|)`.
    pub step: Option<f64>,
    pub pass: bool,
    pub note: &'static str,
}

impl DilatationReport {
    pub const CSV_HEADER: &'static str = "x,y,reF,imF,reMu,imMu,absMu";

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.samples.len() + 1));
        out.push_str(Self::CSV_HEADER);
        out.push('\n');
        for s in &self.samples {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                s.z.re,
                s.z.im,
                s.value.re,
                s.value.im,
                s.mu.re,
                s.mu.im,
                s.mu.norm()
            ));
        }
        out
    }
}

/// Sampled `sup |μ|` over `grid`, skipping stencils that meet a seam.
pub fn dilatation_report(f: &PlanarMap, grid: &Grid, k_target: f64, step: Option<f64>) -> DilatationReport {
    dilatation_report_with_tol(f, grid, k_target, step, DILATATION_TOL)
}

pub fn dilatation_report_with_tol(
    f: &PlanarMap,
    grid: &Grid,
    k_target: f64,
    step: Option<f64>,
    tol: f64,
) -> DilatationReport {
    let pts = grid.points();
    enum Outcome {
        Ok(DilatationSample),
        Skip,
        Fail(String),
    }
    let outcomes: Vec<Outcome> = pts
        .par_iter()
        .map(|&z| {
            let h = step.unwrap_or_else(|| default_step(z));
            let stencil = [z + h, z - h, z + Complex64::new(0.0, h), z - Complex64::new(0.0, h)];
            if !stencil.iter().all(|&w| f.rect.contains(w)) {
                return Outcome::Skip;
            }
            match beltrami(f, z, h) {
                Ok(mu) => match f.eval(z) {
                    Ok(value) => Outcome::Ok(DilatationSample { z, value, mu }),
                    Err(e) => Outcome::Fail(format!("{z}: {e}")),
                },
                Err(Error::Stencil { .. }) => Outcome::Skip,
                Err(e) => Outcome::Fail(format!("{z}: {e}")),
            }
        })
        .collect();
    let mut samples = Vec::new();
    let mut skipped = 0;
    let mut failures = Vec::new();
    for o in outcomes {
        match o {
            Outcome::Ok(s) => samples.push(s),
            Outcome::Skip => skipped += 1,
            Outcome::Fail(m) => failures.push(m),
        }
    }
    let mut sup: f64 = 0.0;
    let mut worst = None;
    let mut violations = Vec::new();
    for s in &samples {
        let m = s.mu.norm();
        if m > sup {
            sup = m;
            worst = Some(s.z);
        }
        if m > k_target + tol {
            violations.push(s.z);
        }
    }
    DilatationReport {
        pass: failures.is_empty() && !samples.is_empty() && sup <= k_target + tol,
        samples,
        sup_abs_mu: sup,
        worst_point: worst,
        violations,
        skipped,
        failures,
        k_target,
        tolerance: tol,
        step,
        note: "grid supremum of |μ| is a sampled surrogate for the essential supremum",
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InjectivityReport {
    pub samples: usize,
    pub min_ratio: f64,
    pub scale: f64,
    pub worst_pair: Option<(Complex64, Complex64)>,
    pub failures: usize,
    pub pass: bool,
}

/// Pairwise separation `min |F(a) − F(b)|/|a − b|` over the grid.
pub fn injectivity_check(f: &PlanarMap, grid: &Grid) -> InjectivityReport {
    let pts = grid.points();
    let vals: Vec<Option<Complex64>> = pts.par_iter().map(|&z| f.eval(z).ok()).collect();
    let failures = vals.iter().filter(|v| v.is_none()).count();
    let good: Vec<(Complex64, Complex64)> = pts
        .iter()
        .zip(&vals)
        .filter_map(|(&z, v)| v.map(|w| (z, w)))
        .collect();
    let (min_ratio, max_ratio, pair) = (0..good.len())
        .into_par_iter()
        .map(|i| {
            let mut lo = (f64::INFINITY, None);
            let mut hi: f64 = 0.0;
            for j in (i + 1)..good.len() {
                let r = (good[i].1 - good[j].1).norm() / (good[i].0 - good[j].0).norm();
                if r < lo.0 {
                    lo = (r, Some((good[i].0, good[j].0)));
                }
                hi = hi.max(r);
            }
            (lo.0, hi, lo.1)
        })
        .reduce(
            || (f64::INFINITY, 0.0, None),
            |a, b| {
                let (lo, pair) = if b.0 < a.0 { (b.0, b.2) } else { (a.0, a.2) };
                (lo, a.1.max(b.1), pair)
            },
        );
    InjectivityReport {
        samples: good.len(),
        min_ratio,
        scale: max_ratio,
        worst_pair: pair,
        failures,
        pass: failures == 0 && good.len() >= 2 && min_ratio > 1e-10 * max_ratio,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SeamReport {
    pub eps: Vec<f64>,
    /// `max |F(s+ε+iy) − F(s−ε+iy)|` per `ε`.
    pub raw_residuals: Vec<f64>,
    /// Jump between one-sided linear extrapolations to the seam.
    pub residuals: Vec<f64>,
    pub scale: f64,
    pub pass: bool,
}

/// Continuity across every seam of `F`. The jump is estimated as
/// `|(2F(s+ε) − F(s+2ε)) − (2F(s−ε) − F(s−2ε))|`, which vanishes to second
/// order for a continuous piecewise-smooth map.
pub fn seam_check(f: &PlanarMap, ys: &[f64], eps_schedule: &[f64]) -> Result<SeamReport> {
    if eps_schedule.is_empty() || ys.is_empty() {
        return Err(Error::Argument("seam check needs y samples and an ε schedule".into()));
    }
    let mut raw = Vec::with_capacity(eps_schedule.len());
    let mut jumps = Vec::with_capacity(eps_schedule.len());
    let mut scale: f64 = 1.0;
    for &e in eps_schedule {
        let mut r: f64 = 0.0;
        let mut j: f64 = 0.0;
        for &s in &f.seams {
            for &y in ys {
                let at = |dx: f64| f.eval(Complex64::new(s + dx, y));
                let (p1, p2, m1, m2) = (at(e)?, at(2.0 * e)?, at(-e)?, at(-2.0 * e)?);
                scale = scale.max(p1.norm()).max(m1.norm());
                r = r.max((p1 - m1).norm());
                j = j.max(((2.0 * p1 - p2) - (2.0 * m1 - m2)).norm());
            }
        }
        raw.push(r);
        jumps.push(j);
    }
    let converged = |v: f64| v <= 1e-12 * scale;
    let decreasing = jumps.windows(2).all(|w| w[1] < w[0] || (converged(w[0]) && converged(w[1])));
    let last = *jumps.last().unwrap();
    Ok(SeamReport {
        eps: eps_schedule.to_vec(),
        raw_residuals: raw,
        pass: decreasing && last <= 1e-4 * scale,
        residuals: jumps,
        scale,
    })
}
