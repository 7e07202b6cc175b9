//! Closed-form Loewner chains `f_t` with their Herglotz fields, PDE
//! residuals, and sampled radii of univalence.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::herglotz::HerglotzField;
use crate::numeric::{
    cauchy_derivative, checked_first_derivative, Domain, EuclideanDisk, Grid, HoloMap,
    HyperbolicDisk, Layout, CAUCHY_POINTS,
};

pub type ChainFn = Arc<dyn Fn(f64, Complex64) -> Result<Complex64> + Send + Sync>;

/// Which construction produced a chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    BeckerPommerenke,
    Schwarzian,
    Translation,
    Exponential,
    StarlikeInfinity,
    Custom,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::BeckerPommerenke => "becker-pommerenke",
            Provenance::Schwarzian => "schwarzian",
            Provenance::Translation => "translation",
            Provenance::Exponential => "exponential",
            Provenance::StarlikeInfinity => "starlike-infinity",
            Provenance::Custom => "custom",
        })
    }
}

/// A family `t ↦ f_t` in closed form together with its Herglotz field.
#[derive(Clone)]
pub struct LoewnerChain {
    eval: ChainFn,
    dt: Option<ChainFn>,
    dz: Option<ChainFn>,
    field: HerglotzField,
    provenance: Provenance,
    domain: Domain,
    label: String,
    warnings: Vec<String>,
}

impl fmt::Debug for LoewnerChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LoewnerChain")
            .field("provenance", &self.provenance)
            .field("label", &self.label)
            .field("domain", &self.domain)
            .field("analytic_dt", &self.dt.is_some())
            .field("warnings", &self.warnings)
            .finish()
    }
}

impl LoewnerChain {
    pub fn new<F>(domain: Domain, eval: F, field: HerglotzField) -> Self
    where
        F: Fn(f64, Complex64) -> Result<Complex64> + Send + Sync + 'static,
    {
        LoewnerChain {
            eval: Arc::new(eval),
            dt: None,
            dz: None,
            field,
            provenance: Provenance::Custom,
            domain,
            label: "<closure>".into(),
            warnings: Vec::new(),
        }
    }

    pub fn with_dt<F>(mut self, f: F) -> Self
    where
        F: Fn(f64, Complex64) -> Result<Complex64> + Send + Sync + 'static,
    {
        self.dt = Some(Arc::new(f));
        self
    }

    pub fn with_dz<F>(mut self, f: F) -> Self
    where
        F: Fn(f64, Complex64) -> Result<Complex64> + Send + Sync + 'static,
    {
        self.dz = Some(Arc::new(f));
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    fn with_provenance(mut self, p: Provenance) -> Self {
        self.provenance = p;
        self
    }

    pub fn with_warning(mut self, w: impl Into<String>) -> Self {
        self.warnings.push(w.into());
        self
    }

    pub fn field(&self) -> &HerglotzField {
        &self.field
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Failed hypothesis probes recorded at construction.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn has_analytic_dt(&self) -> bool {
        self.dt.is_some()
    }

    /// `f_t(z)`.
    pub fn eval(&self, t: f64, z: Complex64) -> Result<Complex64> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::Argument(format!("chain time {t} must be finite and >= 0")));
        }
        if !self.domain.contains(z) {
            return Err(Error::DomainViolation {
                point: z,
                radius: 0.0,
                domain: self.domain.to_string(),
            });
        }
        let v = (self.eval)(t, z)?;
        if !v.is_finite() {
            return Err(Error::Evaluation {
                point: z,
                reason: format!("chain value at t = {t} is not finite"),
            });
        }
        Ok(v)
    }

    /// Analytic `∂f_t/∂t` when the constructor supplies one.
    pub fn dt(&self, t: f64, z: Complex64) -> Option<Result<Complex64>> {
        self.dt.as_ref().map(|d| d(t, z))
    }

    /// `f_t′(z)`.
    pub fn dz(&self, t: f64, z: Complex64) -> Result<Complex64> {
        match &self.dz {
            Some(d) => d(t, z),
            None => self.at_time(t).derivative(z, 1),
        }
    }

    /// `f_t` as a holomorphic map.
    pub fn at_time(&self, t: f64) -> HoloMap {
        let c = self.clone();
        let mut m = HoloMap::new(self.domain, move |z| c.eval(t, z));
        if let Some(d) = &self.dz {
            let d = d.clone();
            m = m.with_derivative(1, move |z| d(t, z));
        }
        m.with_label(format!("{} at t = {t}", self.label))
    }
}

fn require_half_plane(h: &HoloMap) -> Result<()> {
    if h.domain() != Domain::RightHalfPlane {
        return Err(Error::DomainMismatch {
            expected: Domain::RightHalfPlane.to_string(),
            found: h.domain().to_string(),
        });
    }
    Ok(())
}

fn nonzero(v: Complex64, at: Complex64, what: &str) -> Result<Complex64> {
    if v.norm() <= 1e-300 || !v.is_finite() {
        return Err(Error::Pole {
            point: at,
            reason: format!("{what} vanishes"),
        });
    }
    Ok(v)
}

/// `h_t(z) = h(z+t) − 2t h′(z+t)` with `p = (h′ + 2t h″)/(h′ − 2t h″)` at `z+t`.
pub fn chain_becker_pommerenke(h: &HoloMap) -> Result<LoewnerChain> {
    require_half_plane(h)?;
    let (h1, h2, h3, h4, h5) = (h.clone(), h.clone(), h.clone(), h.clone(), h.clone());
    let field = HerglotzField::new(move |z, t| {
        let w = z + t;
        let d1 = checked_first_derivative(&h1, w)?;
        let d2 = h1.derivative(w, 2)?;
        Ok((d1 + 2.0 * t * d2) / nonzero(d1 - 2.0 * t * d2, w, "h′ − 2t h″")?)
    })
    .with_dz(move |z, t| {
        let w = z + t;
        let d1 = checked_first_derivative(&h2, w)?;
        let d2 = h2.derivative(w, 2)?;
        let d3 = h2.derivative(w, 3)?;
        let (a, b) = (d1 + 2.0 * t * d2, d1 - 2.0 * t * d2);
        let (da, db) = (d2 + 2.0 * t * d3, d2 - 2.0 * t * d3);
        let b = nonzero(b, w, "h′ − 2t h″")?;
        Ok((da * b - a * db) / (b * b))
    })
    .with_label(format!("becker-pommerenke field of {}", h.label()));
    Ok(LoewnerChain::new(
        Domain::RightHalfPlane,
        move |t, z| {
            let w = z + t;
            Ok(h3.eval(w)? - 2.0 * t * checked_first_derivative(&h3, w)?)
        },
        field,
    )
    .with_dt(move |t, z| {
        let w = z + t;
        Ok(-h4.derivative(w, 1)? - 2.0 * t * h4.derivative(w, 2)?)
    })
    .with_dz(move |t, z| {
        let w = z + t;
        Ok(h5.derivative(w, 1)? - 2.0 * t * h5.derivative(w, 2)?)
    })
    .with_provenance(Provenance::BeckerPommerenke)
    .with_label(format!("becker-pommerenke({})", h.label())))
}

/// `(h′, P, S)` at `w`, with `P = h″/h′` and `S = P′ − P²/2`.
fn schwarzian_data(h: &HoloMap, w: Complex64) -> Result<(Complex64, Complex64, Complex64)> {
    let d1 = checked_first_derivative(h, w)?;
    let p = h.derivative(w, 2)? / d1;
    let s = h.derivative(w, 3)? / d1 - 1.5 * p * p;
    Ok((d1, p, s))
}

/// `h_t(z) = h(w) − 2t h′(w)/(1 + t Ph(w))`, `w = z+t`, with
/// `p = (1 − 2t² Sh(w))/(1 + 2t² Sh(w))`.
pub fn chain_schwarzian(h: &HoloMap) -> Result<LoewnerChain> {
    require_half_plane(h)?;
    let (h1, h2, h3) = (h.clone(), h.clone(), h.clone());
    let field = HerglotzField::new(move |z, t| {
        let w = z + t;
        let (_, _, s) = schwarzian_data(&h1, w)?;
        let q = 2.0 * t * t * s;
        Ok((1.0 - q) / nonzero(1.0 + q, w, "1 + 2t² Sh")?)
    })
    .with_label(format!("schwarzian field of {}", h.label()));
    Ok(LoewnerChain::new(
        Domain::RightHalfPlane,
        move |t, z| {
            let w = z + t;
            let d1 = checked_first_derivative(&h2, w)?;
            let p = h2.derivative(w, 2)? / d1;
            let den = nonzero(1.0 + t * p, w, "1 + t·Ph(z+t)")?;
            Ok(h2.eval(w)? - 2.0 * t * d1 / den)
        },
        field,
    )
    .with_dz(move |t, z| {
        let w = z + t;
        let (d1, p, s) = schwarzian_data(&h3, w)?;
        let den = nonzero(1.0 + t * p, w, "1 + t·Ph(z+t)")?;
        Ok(d1 * (1.0 + 2.0 * t * t * s) / (den * den))
    })
    .with_provenance(Provenance::Schwarzian)
    .with_label(format!("schwarzian({})", h.label())))
}

/// `h_t = h − ω t` with `p = ω/h′`.
pub fn chain_translation(h: &HoloMap, omega: Complex64) -> Result<LoewnerChain> {
    require_half_plane(h)?;
    if omega.norm() == 0.0 || !omega.is_finite() {
        return Err(Error::Argument(format!("translation speed must be non-zero, got {omega}")));
    }
    let (h1, h2, h3, h4) = (h.clone(), h.clone(), h.clone(), h.clone());
    let field = HerglotzField::new(move |z, _| Ok(omega / checked_first_derivative(&h1, z)?))
        .with_dz(move |z, _| {
            let d1 = checked_first_derivative(&h2, z)?;
            Ok(-omega * h2.derivative(z, 2)? / (d1 * d1))
        })
        .time_independent(true)
        .with_label(format!("{omega}/({})′", h.label()));
    Ok(LoewnerChain::new(Domain::RightHalfPlane, move |t, z| Ok(h3.eval(z)? - omega * t), field)
        .with_dt(move |_, _| Ok(-omega))
        .with_dz(move |_, z| h4.derivative(z, 1))
        .with_provenance(Provenance::Translation)
        .with_label(format!("translation({}, {omega})", h.label())))
}

fn probe_grid() -> Grid {
    Grid::new([1e-2, 1e2], [-20.0, 20.0], 16, 16, Layout::LogX).expect("static grid")
}

/// `h_t = e^{−t} h` with `p = h/h′`.
///
/// The membership `h/h′ − z ∈ H` is probed on a coarse grid; failures are
/// recorded as warnings rather than errors.
pub fn chain_exponential(h: &HoloMap) -> Result<LoewnerChain> {
    require_half_plane(h)?;
    let (h1, h2, h3, h4, h5) = (h.clone(), h.clone(), h.clone(), h.clone(), h.clone());
    let field = HerglotzField::new(move |z, _| {
        let v = h1.eval(z)?;
        if v.norm() == 0.0 {
            return Err(Error::Hypothesis(format!("h vanishes at {z}")));
        }
        Ok(v / checked_first_derivative(&h1, z)?)
    })
    .with_dz(move |z, _| {
        let d1 = checked_first_derivative(&h2, z)?;
        Ok(1.0 - h2.eval(z)? * h2.derivative(z, 2)? / (d1 * d1))
    })
    .time_independent(true)
    .with_label(format!("{0}/({0})′", h.label()));
    let mut chain = LoewnerChain::new(
        Domain::RightHalfPlane,
        move |t, z| Ok((-t).exp() * h3.eval(z)?),
        field,
    )
    .with_dt(move |t, z| Ok(-(-t).exp() * h4.eval(z)?))
    .with_dz(move |t, z| Ok((-t).exp() * h5.derivative(z, 1)?))
    .with_provenance(Provenance::Exponential)
    .with_label(format!("exponential({})", h.label()));
    let probes = probe_grid().points();
    let bad = probes.par_iter().find_map_any(|&z| {
        let ok = (|| -> Result<bool> {
            let v = h.eval(z)?;
            Ok(v.norm() > 0.0 && (v / checked_first_derivative(h, z)? - z).re > 0.0)
        })();
        match ok {
            Ok(true) => None,
            _ => Some(z),
        }
    });
    if let Some(z) = bad {
        chain = chain.with_warning(format!("h/h′ − z is not in H at {z}"));
    }
    Ok(chain)
}

/// `h_t = h − (e^t − 1)/f` with `p = 1/q`,
/// `q = e^{−t} h′ f + (1 − e^{−t}) f′/f`.
pub fn chain_starlike_infinity(h: &HoloMap, f: &HoloMap) -> Result<LoewnerChain> {
    require_half_plane(h)?;
    require_half_plane(f)?;
    let f_nonzero = |f: &HoloMap, z: Complex64| -> Result<Complex64> {
        let v = f.eval(z)?;
        if v.norm() == 0.0 {
            return Err(Error::Hypothesis(format!("f vanishes at {z}")));
        }
        Ok(v)
    };
    let q_parts = {
        let (h, f) = (h.clone(), f.clone());
        move |z: Complex64, t: f64| -> Result<(Complex64, Complex64)> {
            let fv = f_nonzero(&f, z)?;
            let (hd1, fd1) = (h.derivative(z, 1)?, f.derivative(z, 1)?);
            let e = (-t).exp();
            let q = e * hd1 * fv + (1.0 - e) * fd1 / fv;
            if q.norm() == 0.0 {
                return Err(Error::Hypothesis(format!("q vanishes at {z}, t = {t}")));
            }
            let dq = e * (h.derivative(z, 2)? * fv + hd1 * fd1)
                + (1.0 - e) * (f.derivative(z, 2)? / fv - fd1 * fd1 / (fv * fv));
            Ok((q, dq))
        }
    };
    let q2 = q_parts.clone();
    let field = HerglotzField::new(move |z, t| Ok(1.0 / q_parts(z, t)?.0))
        .with_dz(move |z, t| {
            let (q, dq) = q2(z, t)?;
            Ok(-dq / (q * q))
        })
        .with_label(format!("starlike field of ({}, {})", h.label(), f.label()));
    let (h1, f1, f2, h3, f3) = (h.clone(), f.clone(), f.clone(), h.clone(), f.clone());
    Ok(LoewnerChain::new(
        Domain::RightHalfPlane,
        move |t, z| Ok(h1.eval(z)? - t.exp_m1() / f_nonzero(&f1, z)?),
        field,
    )
    .with_dt(move |t, z| Ok(-t.exp() / f_nonzero(&f2, z)?))
    .with_dz(move |t, z| {
        let fv = f_nonzero(&f3, z)?;
        Ok(h3.derivative(z, 1)? + t.exp_m1() * f3.derivative(z, 1)? / (fv * fv))
    })
    .with_provenance(Provenance::StarlikeInfinity)
    .with_label(format!("starlike-infinity({}, {})", h.label(), f.label())))
}

/// `|∂f_t/∂t + f_t′(z) p(z,t)|`. The time derivative is analytic when the
/// chain has one, otherwise a central difference with step `dt_step`
/// (one-sided second order near `t = 0`); `f_t′` comes from Cauchy
/// quadrature.
pub fn pde_residual(c: &LoewnerChain, z: Complex64, t: f64, dt_step: f64) -> Result<f64> {
    pde_residual_impl(c, z, t, dt_step, false)
}

/// As [`pde_residual`] but always differencing in `t`.
pub fn pde_residual_numeric(c: &LoewnerChain, z: Complex64, t: f64, dt_step: f64) -> Result<f64> {
    pde_residual_impl(c, z, t, dt_step, true)
}

fn pde_residual_impl(c: &LoewnerChain, z: Complex64, t: f64, h: f64, numeric: bool) -> Result<f64> {
    if !c.domain.is_half_plane() {
        return Err(Error::DomainMismatch {
            expected: Domain::RightHalfPlane.to_string(),
            found: c.domain.to_string(),
        });
    }
    if !(h > 0.0) {
        return Err(Error::Argument(format!("time step must be positive, got {h}")));
    }
    let ft = match (numeric, c.dt(t, z)) {
        (false, Some(d)) => d?,
        _ if t >= h => (c.eval(t + h, z)? - c.eval(t - h, z)?) / (2.0 * h),
        _ => (-3.0 * c.eval(t, z)? + 4.0 * c.eval(t + h, z)? - c.eval(t + 2.0 * h, z)?) / (2.0 * h),
    };
    let slice = c.at_time(t);
    let fz = cauchy_derivative(&slice, z, 1, slice.default_radius(z), CAUCHY_POINTS)?;
    Ok((ft + fz * c.field.eval(z, t)?).norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    Euclidean,
    Hyperbolic,
}

/// Geometric radius schedule `r0·2^j`, `j = 0..steps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusSchedule {
    pub r0: f64,
    pub steps: usize,
    pub samples: usize,
}

impl Default for RadiusSchedule {
    fn default() -> Self {
        RadiusSchedule {
            r0: 1e-3,
            steps: 13,
            samples: 256,
        }
    }
}

impl RadiusSchedule {
    pub fn radii(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.steps).map(move |j| self.r0 * 2f64.powi(j as i32))
    }
}

/// Quasi-uniform (sunflower) sample of a Euclidean disk.
pub fn sunflower(disk: &EuclideanDisk, n: usize) -> Vec<Complex64> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let r = disk.radius * ((i as f64 + 0.5) / n as f64).sqrt();
            disk.center + Complex64::from_polar(r, golden * i as f64)
        })
        .collect()
}

/// Sampled injectivity on a disk: pairwise separation plus Newton
/// refinement of the closest-looking pairs.
fn injective_on(f: &HoloMap, disk: &EuclideanDisk, n: usize) -> bool {
    let pts = sunflower(disk, n);
    let vals: Vec<Complex64> = match pts.iter().map(|&a| f.eval(a)).collect::<Result<_>>() {
        Ok(v) => v,
        Err(_) => return false,
    };
    let ders: Vec<Complex64> = match pts.par_iter().map(|&a| f.derivative(a, 1)).collect::<Result<_>>() {
        Ok(v) => v,
        Err(_) => return false,
    };
    let mut scale: f64 = 0.0;
    let mut min_ratio = f64::INFINITY;
    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let ratio = (vals[i] - vals[j]).norm() / (pts[i] - pts[j]).norm();
            scale = scale.max(ratio);
            min_ratio = min_ratio.min(ratio);
            let local = ders[i].norm().max(ders[j].norm());
            let q = ratio / local.max(f64::MIN_POSITIVE);
            if q < 0.25 {
                candidates.push((q, i, j));
            }
        }
    }
    if !(min_ratio > 1e-10 * scale) {
        return false;
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
    candidates.truncate(32);
    let sep = 1e-6 * disk.radius.max(f64::MIN_POSITIVE);
    for &(_, i, j) in &candidates {
        for (src, start) in [(i, j), (j, i)] {
            let target = vals[src];
            let mut x = pts[start];
            for _ in 0..40 {
                let (fx, dx) = match (f.eval(x), f.derivative(x, 1)) {
                    (Ok(a), Ok(b)) => (a, b),
                    _ => break,
                };
                let g = fx - target;
                if g.norm() <= 1e-12 * (1.0 + target.norm()) {
                    if (x - disk.center).norm() <= disk.radius && (x - pts[src]).norm() > sep {
                        return false;
                    }
                    break;
                }
                if dx.norm() == 0.0 {
                    break;
                }
                x -= g / dx;
                if !f.domain().contains(x) || (x - disk.center).norm() > 1.5 * disk.radius {
                    break;
                }
            }
        }
    }
    true
}

/// Largest radius of the schedule on whose disk about `z` the samples show
/// no collision. Disks that leave the domain are not tested. Returns 0 when
/// even the smallest disk fails.
pub fn univalence_radius(f: &HoloMap, z: Complex64, metric: Metric, schedule: &RadiusSchedule) -> f64 {
    let mut best = 0.0;
    for r in schedule.radii() {
        let disk = match metric {
            Metric::Euclidean => match EuclideanDisk::new(z, r) {
                Ok(d) => d,
                Err(_) => break,
            },
            Metric::Hyperbolic => match HyperbolicDisk::new(z, r) {
                Ok(d) => d.to_euclidean(),
                Err(_) => break,
            },
        };
        if f.domain().boundary_distance(disk.center) <= disk.radius {
            break;
        }
        if !injective_on(f, &disk, schedule.samples) {
            break;
        }
        best = r;
    }
    best
}

/// Pass/fail with a signed margin (positive means satisfied).
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub pass: bool,
    pub margin: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainCriteriaParams {
    pub c1: f64,
    pub c2: f64,
    pub a: f64,
    pub times: Vec<f64>,
    pub grid: Grid,
    /// Hyperbolic radius schedule; Euclidean radii are scaled by `Re z`.
    pub schedule: RadiusSchedule,
}

impl Default for ChainCriteriaParams {
    fn default() -> Self {
        ChainCriteriaParams {
            c1: 0.5,
            c2: 2.0,
            a: 0.5,
            times: vec![0.0, 1.0, 2.0, 4.0],
            grid: Grid::new([1e-2, 1e2], [-10.0, 10.0], 12, 12, Layout::LogX).expect("static grid"),
            schedule: RadiusSchedule {
                r0: 1e-2,
                steps: 10,
                samples: 128,
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct UnivalenceSample {
    pub t: f64,
    /// `min R_u(h_t, z)/Re z` over probes with `Re z > a + C1 t`.
    pub euclidean_ratio: f64,
    /// `min R_u^hyp(h_t, z)` over the same probes.
    pub hyperbolic_radius: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainCriteriaReport {
    pub provenance: Provenance,
    pub strip_lower: Verdict,
    pub strip_upper: Verdict,
    pub continuity: Verdict,
    pub univalence: Verdict,
    pub univalence_samples: Vec<UnivalenceSample>,
    pub pass: bool,
}

/// Sampled surrogates for the chain hypotheses: strip containment of `p`,
/// continuity of `(z,t) ↦ f_t(z)`, and the radius-of-univalence growth.
pub fn chain_criteria_report(c: &LoewnerChain, params: &ChainCriteriaParams) -> ChainCriteriaReport {
    let points = params.grid.points();
    let samples: Vec<(Complex64, f64)> = params
        .times
        .iter()
        .flat_map(|&t| points.iter().map(move |&z| (z, t)))
        .collect();

    let res: Vec<Option<f64>> = samples
        .par_iter()
        .map(|&(z, t)| c.field.eval(z, t).ok().map(|v| v.re))
        .collect();
    let failures = res.iter().filter(|r| r.is_none()).count();
    let min_re = res.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    let max_re = res.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
    let strip_lower = Verdict {
        pass: failures == 0 && min_re > params.c1,
        margin: min_re - params.c1,
        detail: format!("min Re p = {min_re} against C1 = {}; {failures} failed samples", params.c1),
    };
    let strip_upper = Verdict {
        pass: failures == 0 && max_re < params.c2,
        margin: params.c2 - max_re,
        detail: format!("max Re p = {max_re} against C2 = {}", params.c2),
    };

    // continuity moduli at shrinking increments
    let probes: Vec<(Complex64, f64)> = samples.iter().step_by((samples.len() / 64).max(1)).copied().collect();
    let deltas = [1e-2, 1e-3, 1e-4];
    let moduli: Vec<Option<f64>> = deltas
        .iter()
        .map(|&d| {
            probes
                .par_iter()
                .map(|&(z, t)| -> Result<f64> {
                    let base = c.eval(t, z)?;
                    let scale = 1.0 + base.norm();
                    Ok(((c.eval(t + d, z)? - base).norm() + (c.eval(t, z + d)? - base).norm()) / scale)
                })
                .collect::<Result<Vec<f64>>>()
                .ok()
                .map(|v| v.into_iter().fold(0.0, f64::max))
        })
        .collect();
    let continuity = match moduli.iter().copied().collect::<Option<Vec<f64>>>() {
        None => Verdict {
            pass: false,
            margin: f64::NEG_INFINITY,
            detail: "chain evaluation failed at a probe".into(),
        },
        Some(m) => {
            let decreasing = m.windows(2).all(|w| w[1] <= w[0]);
            let last = m[m.len() - 1];
            let settled = last <= 1e-12 || last <= 0.05 * m[0];
            Verdict {
                pass: decreasing && settled,
                margin: m[0] - last,
                detail: format!("moduli {m:?} at increments {deltas:?}"),
            }
        }
    };

    let mut usamples = Vec::new();
    for &t in &params.times {
        let x0 = params.a + params.c1 * t;
        let probes: Vec<Complex64> = [1.5, 4.0, 16.0]
            .iter()
            .flat_map(|&m| [-1.0, 0.0, 1.0].map(|s| Complex64::new(x0 * m, 0.5 * s * x0 * m)))
            .collect();
        let f = c.at_time(t);
        let eu = RadiusSchedule {
            r0: 2f64.powi(-(params.schedule.steps as i32 - 1)),
            ..params.schedule
        };
        let pairs: Vec<(f64, f64)> = probes
            .par_iter()
            .map(|&z| {
                let scaled = RadiusSchedule { r0: eu.r0 * z.re, ..eu };
                (
                    univalence_radius(&f, z, Metric::Euclidean, &scaled) / z.re,
                    univalence_radius(&f, z, Metric::Hyperbolic, &params.schedule),
                )
            })
            .collect();
        usamples.push(UnivalenceSample {
            t,
            euclidean_ratio: pairs.iter().map(|p| p.0).fold(f64::INFINITY, f64::min),
            hyperbolic_radius: pairs.iter().map(|p| p.1).fold(f64::INFINITY, f64::min),
        });
    }
    let worst = usamples.iter().map(|u| u.euclidean_ratio).fold(f64::INFINITY, f64::min);
    let univalence = Verdict {
        pass: worst > 0.0,
        margin: worst,
        detail: "sampled lower bound of inf R_u(h_t, z)/Re z over the schedule".into(),
    };
    let pass = strip_lower.pass && strip_upper.pass && continuity.pass && univalence.pass;
    ChainCriteriaReport {
        provenance: c.provenance,
        strip_lower,
        strip_upper,
        continuity,
        univalence,
        univalence_samples: usamples,
        pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::herglotz::membership_report;
    use crate::numeric::{Region, UkRegion};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn map(src: &str) -> HoloMap {
        HoloMap::from_expr(Domain::RightHalfPlane, &parse(src).unwrap()).unwrap()
    }

    fn grid40() -> Grid {
        Grid::new([1e-2, 1e2], [-20.0, 20.0], 40, 40, Layout::LogX).unwrap()
    }

    #[test]
    fn becker_pommerenke_identity_and_power() {
        let ch = chain_becker_pommerenke(&map("z")).unwrap();
        assert_eq!(ch.provenance().to_string(), "becker-pommerenke");
        let z = c(0.7, -0.2);
        assert!((ch.eval(1.5, z).unwrap() - (z - 1.5)).norm() < 1e-14);
        assert!((ch.field().eval(z, 1.5).unwrap() - 1.0).norm() < 1e-14);

        let ch = chain_becker_pommerenke(&map("(z+1)^0.8")).unwrap();
        assert!((ch.field().eval(c(1.0, 1.0), 0.0).unwrap() - 1.0).norm() < 1e-14);
        let uk = Region::Uk(UkRegion::new(0.4).unwrap());
        let r = membership_report(ch.field(), &uk, &grid40(), &[0.1, 1.0, 10.0]);
        assert!(r.pass, "{r:?}");
        assert!(pde_residual(&ch, c(1.0, 1.0), 0.5, 1e-4).unwrap() <= 1e-7);
    }

    #[test]
    fn schwarzian_chain() {
        let ch = chain_schwarzian(&map("3*z + 2")).unwrap();
        let z = c(0.4, 1.0);
        assert!((ch.field().eval(z, 2.0).unwrap() - 1.0).norm() < 1e-14);
        assert!((ch.eval(2.0, z).unwrap() - (3.0 * (z + 2.0) + 2.0 - 12.0)).norm() < 1e-12);

        let ch = chain_schwarzian(&map("log(z)")).unwrap();
        assert!((ch.field().eval(c(2.0, 1.0), 0.0).unwrap() - 1.0).norm() < 1e-14);
        for &t in &[0.0, 0.5, 1.0, 2.0] {
            for z in [c(0.5, 0.0), c(1.0, 2.0), c(3.0, -1.0)] {
                let r = pde_residual(&ch, z, t, 1e-4).unwrap();
                assert!(r <= 1e-7, "t={t} z={z}: {r}");
            }
        }
        // agrees with the Becker–Pommerenke chain at t = 0
        let bp = chain_becker_pommerenke(&map("log(z)")).unwrap();
        let z = c(0.8, 0.3);
        assert_eq!(ch.eval(0.0, z).unwrap(), bp.eval(0.0, z).unwrap());
    }

    #[test]
    fn schwarzian_pole_is_reported() {
        // 1 + t·Ph(z+t) = 1 − 2t/(z+t) vanishes at z = t
        let ch = chain_schwarzian(&map("1/z")).unwrap();
        assert!(matches!(ch.eval(1.0, c(1.0, 0.0)), Err(Error::Pole { .. })));
    }

    #[test]
    fn central_difference_is_second_order() {
        let ch = chain_schwarzian(&map("log(z)")).unwrap();
        assert!(!ch.has_analytic_dt());
        let z = c(0.7, 0.4);
        let r1 = pde_residual(&ch, z, 1.0, 1e-2).unwrap();
        let r2 = pde_residual(&ch, z, 1.0, 5e-3).unwrap();
        let ratio = r1 / r2;
        assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
    }

    #[test]
    fn translation_chain() {
        let ch = chain_translation(&map("z"), c(1.0, 0.0)).unwrap();
        assert!(pde_residual(&ch, c(1.0, 1.0), 0.3, 1e-3).unwrap() < 1e-14);
        let k: f64 = 0.5;
        let cc = 2.0 * k / (1.0 + k * k);
        let h = map(&format!("z + {cc}*exp(-z)"));
        let omega = c((1.0 - cc * cc).sqrt(), 0.0);
        let ch = chain_translation(&h, omega).unwrap();
        let uk = Region::Uk(UkRegion::new(k).unwrap());
        let r = membership_report(ch.field(), &uk, &grid40(), &[0.0]);
        assert!(r.pass, "{r:?}");
        assert!(chain_translation(&h, c(0.0, 0.0)).is_err());
    }

    #[test]
    fn exponential_chain_flags_hypothesis() {
        let ch = chain_exponential(&map("z")).unwrap();
        assert!(!ch.warnings().is_empty());
        let ch = chain_exponential(&map("sqrt((z+1)^2 + 1)")).unwrap();
        assert!(ch.warnings().is_empty(), "{:?}", ch.warnings());
        for z in [c(0.5, 0.5), c(2.0, -1.0)] {
            assert!(pde_residual(&ch, z, 0.7, 1e-4).unwrap() <= 1e-7);
        }
    }

    #[test]
    fn starlike_chain() {
        let f = map("z + 1");
        let h = map("log(z + 1)");
        let ch = chain_starlike_infinity(&h, &f).unwrap();
        let z = c(0.6, 0.9);
        assert_eq!(ch.eval(0.0, z).unwrap(), h.eval(z).unwrap());
        for &t in &[0.0, 0.5, 3.0] {
            assert!(pde_residual(&ch, z, t, 1e-4).unwrap() <= 1e-7);
            assert!(ch.field().eval(z, t).unwrap().re > 0.0);
        }
        let bad = chain_starlike_infinity(&h, &map("z - 1")).unwrap();
        assert!(matches!(bad.eval(0.5, c(1.0, 0.0)), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn disk_chains_are_rejected() {
        let field = HerglotzField::constant(c(1.0, 0.0));
        let ch = LoewnerChain::new(Domain::UnitDisk, |t, z| Ok((1.0 + t) * z), field);
        assert!(matches!(pde_residual(&ch, c(0.1, 0.0), 0.0, 1e-3), Err(Error::DomainMismatch { .. })));
        assert!(matches!(chain_becker_pommerenke(&HoloMap::from_fn(Domain::UnitDisk, |z| z)), Err(Error::DomainMismatch { .. })));
    }

    #[test]
    fn univalence_radii() {
        let s = RadiusSchedule::default();
        let id = map("z");
        let largest_inside = s.radii().filter(|&r| r < 1.0).fold(0.0, f64::max);
        assert_eq!(univalence_radius(&id, c(1.0, 0.0), Metric::Euclidean, &s), largest_inside);
        let sq = map("z^2");
        assert_eq!(univalence_radius(&sq, c(1.0, 0.0), Metric::Euclidean, &s), largest_inside);
        assert_eq!(univalence_radius(&id, c(1.0, 0.0), Metric::Hyperbolic, &s), s.radii().last().unwrap());

        let ex = map("exp(z)");
        let z = c(1.0, 3.0);
        let r = univalence_radius(&ex, z, Metric::Hyperbolic, &s);
        assert!(r > 0.0 && r < s.radii().last().unwrap());
        let disk = HyperbolicDisk::new(z, r).unwrap().to_euclidean();
        assert!(disk.radius < std::f64::consts::PI, "{disk:?}");
        let next = HyperbolicDisk::new(z, 2.0 * r).unwrap().to_euclidean();
        assert!(next.radius >= std::f64::consts::PI, "{next:?}");
    }

    #[test]
    fn chain_report_examples() {
        let k: f64 = 0.5;
        let cc = 2.0 * k / (1.0 + k * k);
        let h = map(&format!("z + {cc}*exp(-z)"));
        let omega = c((1.0 - cc * cc).sqrt(), 0.0);
        let ch = chain_translation(&h, omega).unwrap();
        // p = ω/h′ with h′ ∈ disk(1, c): Re p between ω/(1+c) and ω/(1−c)
        let params = ChainCriteriaParams {
            c1: 0.9 * omega.re / (1.0 + cc),
            c2: 1.1 * omega.re / (1.0 - cc),
            ..Default::default()
        };
        let r = chain_criteria_report(&ch, &params);
        assert!(r.pass, "{r:#?}");

        let p2 = HerglotzField::from_fn(|_, t| c(1.0 / (1.0 + t * t), 0.0));
        let ch2 = LoewnerChain::new(Domain::RightHalfPlane, |t, z| Ok(z - t.atan()), p2);
        let params = ChainCriteriaParams {
            c1: 0.1,
            c2: 2.0,
            times: vec![0.0, 1.0, 5.0, 10.0],
            ..Default::default()
        };
        let r = chain_criteria_report(&ch2, &params);
        assert!(!r.strip_lower.pass && r.strip_upper.pass);

        let p1 = HerglotzField::from_fn(|z, _| z + 1.0);
        let ch1 = LoewnerChain::new(Domain::RightHalfPlane, |t, z: Complex64| Ok((z + 1.0).ln() - t), p1);
        let r = chain_criteria_report(&ch1, &ChainCriteriaParams { c1: 0.5, c2: 10.0, ..Default::default() });
        assert!(r.strip_lower.pass && !r.strip_upper.pass);
    }
}
