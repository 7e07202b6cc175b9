//! Time-dependent Herglotz fields `p(z, t)` on the right half-plane and the
//! transformations that normalize them.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{Expr, Var};
use crate::numeric::{
    angular_limit_at_infinity, default_ray_samples, Domain, Grid, HoloMap, Region, UkRegion,
};
use crate::quadrature::{adaptive_simpson, CumulativeIntegral, QUAD_TOL};

pub type FieldFn = Arc<dyn Fn(Complex64, f64) -> Result<Complex64> + Send + Sync>;
pub type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Tolerance on `Re p ≥ 0`.
pub const HF3_TOL: f64 = 1e-12;
/// Pass threshold for region membership margins.
pub const MEMBERSHIP_TOL: f64 = 1e-10;

/// A Herglotz field with optional analytic data attached.
#[derive(Clone)]
pub struct HerglotzField {
    eval: FieldFn,
    dz: Option<FieldFn>,
    angular: Option<TimeFn>,
    breakpoints: Vec<f64>,
    strip: Option<(f64, f64)>,
    target: Option<Region>,
    time_independent: bool,
    label: String,
}

impl fmt::Debug for HerglotzField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HerglotzField")
            .field("label", &self.label)
            .field("analytic_dz", &self.dz.is_some())
            .field("angular_declared", &self.angular.is_some())
            .field("breakpoints", &self.breakpoints)
            .field("strip", &self.strip)
            .field("time_independent", &self.time_independent)
            .finish()
    }
}

impl HerglotzField {
    pub fn new<F>(eval: F) -> Self
    where
        F: Fn(Complex64, f64) -> Result<Complex64> + Send + Sync + 'static,
    {
        HerglotzField {
            eval: Arc::new(eval),
            dz: None,
            angular: None,
            breakpoints: Vec::new(),
            strip: None,
            target: None,
            time_independent: false,
            label: "<closure>".into(),
        }
    }

    pub fn from_fn<F>(f: F) -> Self
    where
        F: Fn(Complex64, f64) -> Complex64 + Send + Sync + 'static,
    {
        Self::new(move |z, t| Ok(f(z, t)))
    }

    /// `p ≡ c`.
    pub fn constant(c: Complex64) -> Self {
        let mut p = Self::from_fn(move |_, _| c)
            .with_dz(|_, _| Ok(Complex64::new(0.0, 0.0)))
            .with_angular_derivative(|_| 0.0)
            .with_label(format!("{c}"));
        p.time_independent = true;
        p
    }

    /// Field from an expression in `z` and `t` with parameters already bound.
    pub fn from_expr(expr: &Expr) -> Result<Self> {
        if let Some(name) = expr.parameters().into_iter().next() {
            return Err(Error::UnboundParameter(name));
        }
        let e = expr.clone();
        let d = expr.differentiate(Var::Z);
        let mut p = Self::new(move |z, t| e.eval_zt(z, t))
            .with_dz(move |z, t| d.eval_zt(z, t))
            .with_label(expr.to_string());
        p.time_independent = !expr.depends_on(Var::T);
        Ok(p)
    }

    pub fn with_dz<F>(mut self, f: F) -> Self
    where
        F: Fn(Complex64, f64) -> Result<Complex64> + Send + Sync + 'static,
    {
        self.dz = Some(Arc::new(f));
        self
    }

    /// Declares `p′(∞, t)` in closed form.
    pub fn with_angular_derivative<F>(mut self, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.angular = Some(Arc::new(f));
        self
    }

    /// Times where the field may jump; integration never steps across them.
    pub fn with_breakpoints(mut self, mut b: Vec<f64>) -> Self {
        b.retain(|x| x.is_finite() && *x > 0.0);
        b.sort_by(f64::total_cmp);
        b.dedup();
        self.breakpoints = b;
        self
    }

    /// Declares that `C1 < Re p < C2`.
    pub fn with_strip(mut self, c1: f64, c2: f64) -> Self {
        self.strip = Some((c1, c2));
        self
    }

    pub fn with_target(mut self, region: Region) -> Self {
        self.target = Some(region);
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn time_independent(mut self, flag: bool) -> Self {
        self.time_independent = flag;
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn strip(&self) -> Option<(f64, f64)> {
        self.strip
    }

    pub fn target(&self) -> Option<Region> {
        self.target
    }

    pub fn is_time_independent(&self) -> bool {
        self.time_independent
    }

    pub fn has_analytic_dz(&self) -> bool {
        self.dz.is_some()
    }

    pub fn declared_angular_derivative(&self, t: f64) -> Option<f64> {
        self.angular.as_ref().map(|f| f(t))
    }

    pub fn eval(&self, z: Complex64, t: f64) -> Result<Complex64> {
        let v = (self.eval)(z, t)?;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Evaluation {
                point: z,
                reason: format!("field value {v} at t = {t} is not finite"),
            });
        }
        Ok(v)
    }

    /// `∂p/∂z`, analytic when declared, otherwise by Cauchy quadrature.
    pub fn dz(&self, z: Complex64, t: f64) -> Result<Complex64> {
        match &self.dz {
            Some(d) => d(z, t),
            None => self.slice(t).derivative(z, 1),
        }
    }

    /// `z ↦ p(z, t)` as a holomorphic map on H.
    pub fn slice(&self, t: f64) -> HoloMap {
        let eval = self.eval.clone();
        let mut m = HoloMap::new(Domain::RightHalfPlane, move |z| eval(z, t));
        if let Some(d) = &self.dz {
            let d = d.clone();
            m = m.with_derivative(1, move |z| d(z, t));
        }
        m.with_label(format!("{} at t = {t}", self.label))
    }
}

/// Outcome of [`validate`].
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub samples: usize,
    pub non_finite: usize,
    pub min_re: f64,
    pub min_re_point: Option<(Complex64, f64)>,
    pub hf3_pass: bool,
    pub strip: Option<StripReport>,
    pub pass: bool,
}

/// Contraction check for fields declared to map into `{C1 < Re w < C2}`.
#[derive(Debug, Clone, Serialize)]
pub struct StripReport {
    pub c1: f64,
    pub c2: f64,
    pub kappa: f64,
    /// Largest sampled `|p′| Re z / Re p`.
    pub worst_ratio: f64,
    pub contained: bool,
    pub pass: bool,
}

/// `sup λ_H / λ_Π` over the strip `Π = {C1 < Re z < C2}`, which is `< 1`.
pub fn strip_kappa(c1: f64, c2: f64) -> Result<f64> {
    if !(c1 > 0.0 && c2 > c1 && c2.is_finite()) {
        return Err(Error::Argument(format!("strip needs 0 < C1 < C2 < ∞, got ({c1}, {c2})")));
    }
    let w = c2 - c1;
    let ratio = |x: f64| w * (std::f64::consts::PI * (x - c1) / w).sin() / (std::f64::consts::PI * x);
    // coarse scan then golden-section refinement around the best cell
    let n = 2000;
    let mut best = (0.0, c1);
    for i in 1..n {
        let x = c1 + w * i as f64 / n as f64;
        let r = ratio(x);
        if r > best.0 {
            best = (r, x);
        }
    }
    let (mut lo, mut hi) = ((best.1 - w / n as f64).max(c1), (best.1 + w / n as f64).min(c2));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let a = hi - g * (hi - lo);
        let b = lo + g * (hi - lo);
        if ratio(a) > ratio(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    Ok(ratio(0.5 * (lo + hi)).max(best.0))
}

/// Samples the Herglotz conditions on `grid × times`.
pub fn validate(p: &HerglotzField, grid: &Grid, times: &[f64]) -> ValidationReport {
    let points = grid.points();
    let kappa = p.strip.and_then(|(a, b)| strip_kappa(a, b).ok());
    let samples: Vec<(Complex64, f64)> = times
        .iter()
        .flat_map(|&t| points.iter().map(move |&z| (z, t)))
        .collect();

    struct Acc {
        non_finite: usize,
        min_re: f64,
        min_at: Option<(Complex64, f64)>,
        worst_ratio: f64,
        contained: bool,
    }
    let strip = p.strip;
    let per: Vec<Acc> = samples
        .par_iter()
        .map(|&(z, t)| {
            let mut acc = Acc {
                non_finite: 0,
                min_re: f64::INFINITY,
                min_at: None,
                worst_ratio: 0.0,
                contained: true,
            };
            match p.eval(z, t) {
                Err(_) => acc.non_finite = 1,
                Ok(v) => {
                    acc.min_re = v.re;
                    acc.min_at = Some((z, t));
                    if let Some((c1, c2)) = strip {
                        acc.contained = v.re >= c1 - HF3_TOL && v.re <= c2 + HF3_TOL;
                        match p.dz(z, t) {
                            Ok(d) if v.re > 0.0 => acc.worst_ratio = d.norm() * z.re / v.re,
                            _ => acc.worst_ratio = f64::INFINITY,
                        }
                    }
                }
            }
            acc
        })
        .collect();

    let mut non_finite = 0;
    let mut min_re = f64::INFINITY;
    let mut min_at = None;
    let mut worst_ratio: f64 = 0.0;
    let mut contained = true;
    for a in per {
        non_finite += a.non_finite;
        if a.min_re < min_re {
            min_re = a.min_re;
            min_at = a.min_at;
        }
        worst_ratio = worst_ratio.max(a.worst_ratio);
        contained &= a.contained;
    }
    let hf3_pass = non_finite == 0 && min_re >= -HF3_TOL;
    let strip = match (strip, kappa) {
        (Some((c1, c2)), Some(kappa)) => Some(StripReport {
            c1,
            c2,
            kappa,
            worst_ratio,
            contained,
            // sampled Cauchy derivatives carry ~1e-10 relative noise
            pass: contained && worst_ratio <= kappa * (1.0 + 1e-8),
        }),
        _ => None,
    };
    let pass = hf3_pass && strip.as_ref().map_or(true, |s| s.pass);
    ValidationReport {
        samples: samples.len(),
        non_finite,
        min_re,
        min_re_point: min_at,
        hf3_pass,
        strip,
        pass,
    }
}

/// `p′(∞, t)`: declared value or the angular limit of `p(z, t)/z`.
pub fn angular_derivative_infinity(p: &HerglotzField, t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::Argument(format!("time {t} is negative")));
    }
    if let Some(v) = p.declared_angular_derivative(t) {
        return Ok(v.max(0.0));
    }
    let est = angular_limit_at_infinity(&p.slice(t), &default_ray_samples())?;
    let v = est.value.re;
    // a genuine Herglotz field has a non-negative real limit
    if v < -1e-6 * (1.0 + est.error) {
        return Err(Error::Hypothesis(format!(
            "angular derivative at infinity is negative ({v}) at t = {t}"
        )));
    }
    Ok(v.max(0.0))
}

/// The running integral `λ(t) = ∫_0^t p′(∞, ξ) dξ`.
#[derive(Clone)]
pub struct Lambda {
    table: Option<Arc<CumulativeIntegral<TimeIntegrand>>>,
}

type TimeIntegrand = Box<dyn Fn(f64) -> Result<f64> + Send + Sync>;

impl Lambda {
    pub fn zero() -> Self {
        Lambda { table: None }
    }

    pub fn is_zero(&self) -> bool {
        self.table.is_none()
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        match &self.table {
            None => Ok(0.0),
            Some(c) => c.eval(t),
        }
    }
}

fn declared_zero(p: &HerglotzField, horizon: f64) -> bool {
    match &p.angular {
        None => false,
        Some(f) => {
            let n = 64;
            (0..=n).all(|i| f(horizon * i as f64 / n as f64) == 0.0)
        }
    }
}

/// `p̃(z,t) = e^{−λ(t)} p(e^{λ(t)} z, t) − p′(∞,t) z` on `[0, horizon]`.
///
/// The result declares angular derivative zero, so a second application
/// returns it unchanged.
pub fn normalize_at_infinity(p: &HerglotzField, horizon: f64) -> Result<(HerglotzField, Lambda)> {
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(Error::Argument(format!("horizon {horizon} must be finite and >= 0")));
    }
    if declared_zero(p, horizon) {
        return Ok((p.clone(), Lambda::zero()));
    }
    let pa = p.clone();
    let integrand: TimeIntegrand = Box::new(move |t| angular_derivative_infinity(&pa, t));
    let table = CumulativeIntegral::new(integrand, horizon, 64, &p.breakpoints)?;
    let lambda = Lambda {
        table: Some(Arc::new(table)),
    };

    let (l1, p1) = (lambda.clone(), p.clone());
    let (l2, p2) = (lambda.clone(), p.clone());
    let mut out = HerglotzField::new(move |z, t| {
        let l = l1.eval(t)?;
        let a = angular_derivative_infinity(&p1, t)?;
        Ok((-l).exp() * p1.eval(l.exp() * z, t)? - a * z)
    })
    .with_dz(move |z, t| {
        let l = l2.eval(t)?;
        let a = angular_derivative_infinity(&p2, t)?;
        Ok(p2.dz(l.exp() * z, t)? - a)
    })
    .with_angular_derivative(|_| 0.0)
    .with_breakpoints(p.breakpoints.clone())
    .with_label(format!("normalized({})", p.label));
    out.target = p.target;
    Ok((out, lambda))
}

/// Result of [`reparametrize_unbounded`].
#[derive(Clone)]
pub struct Reparametrized {
    pub field: HerglotzField,
    /// `T = u(horizon)`; the field is identically 1 from there on.
    pub tail_start: f64,
}

/// `p̂(z, ξ) = α(t)[p(z + i v(t), t) − i β(t)]` at `t = u⁻¹(ξ)`, with
/// `u = ∫ 1/α`, `v = ∫ β`, and `p̂ ≡ 1` for `ξ ≥ u(horizon)`.
///
/// `k` is recorded as the target region `U(k)` of the result.
pub fn reparametrize_unbounded(
    p: &HerglotzField,
    alpha: TimeFn,
    beta: TimeFn,
    k: f64,
    horizon: f64,
) -> Result<Reparametrized> {
    let region = UkRegion::new(k)?;
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::Argument(format!("horizon {horizon} must be finite and > 0")));
    }
    let a = alpha.clone();
    let inv_alpha: TimeIntegrand = Box::new(move |t| {
        let v = a(t);
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Argument(format!("alpha({t}) = {v} is not positive; u is not monotone")));
        }
        Ok(1.0 / v)
    });
    let u = Arc::new(CumulativeIntegral::new(inv_alpha, horizon, 256, &p.breakpoints)?);
    let b = beta.clone();
    let beta_int: TimeIntegrand = Box::new(move |t| Ok(b(t)));
    let v = Arc::new(CumulativeIntegral::new(beta_int, horizon, 256, &p.breakpoints)?);
    let tail = u.total();

    let mut breakpoints: Vec<f64> = p
        .breakpoints
        .iter()
        .filter(|&&b| b < horizon)
        .map(|&b| u.eval(b))
        .collect::<Result<_>>()?;
    breakpoints.push(tail);

    let inner = {
        let (p, u, v, alpha, beta) = (p.clone(), u.clone(), v.clone(), alpha.clone(), beta.clone());
        move |z: Complex64, xi: f64, derivative: bool| -> Result<Complex64> {
            if xi >= tail {
                return Ok(Complex64::new(if derivative { 0.0 } else { 1.0 }, 0.0));
            }
            let t = u.invert(xi, 1e-12)?;
            let shift = Complex64::new(0.0, v.eval(t)?);
            let a = alpha(t);
            if derivative {
                Ok(a * p.dz(z + shift, t)?)
            } else {
                Ok(a * (p.eval(z + shift, t)? - Complex64::new(0.0, beta(t))))
            }
        }
    };
    let (f1, f2) = (inner.clone(), inner);
    let field = HerglotzField::new(move |z, xi| f1(z, xi, false))
        .with_dz(move |z, xi| f2(z, xi, true))
        .with_breakpoints(breakpoints)
        .with_target(Region::Uk(region))
        .with_label(format!("reparametrized({})", p.label));
    Ok(Reparametrized {
        field,
        tail_start: tail,
    })
}

/// Worst membership violation of sampled field values.
#[derive(Debug, Clone, Serialize)]
pub struct MembershipReport {
    pub samples: usize,
    pub non_finite: usize,
    /// Largest signed distance to the region; non-positive means inside.
    pub worst_margin: f64,
    pub worst_point: Option<(Complex64, f64)>,
    pub worst_value: Option<Complex64>,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn membership_report(
    p: &HerglotzField,
    region: &Region,
    grid: &Grid,
    times: &[f64],
) -> MembershipReport {
    let points = grid.points();
    let samples: Vec<(Complex64, f64)> = times
        .iter()
        .flat_map(|&t| points.iter().map(move |&z| (z, t)))
        .collect();
    let results: Vec<Option<(f64, Complex64)>> = samples
        .par_iter()
        .map(|&(z, t)| p.eval(z, t).ok().map(|w| (region.margin(w), w)))
        .collect();
    let mut worst = f64::NEG_INFINITY;
    let mut at = None;
    let mut value = None;
    let mut non_finite = 0;
    for (s, r) in samples.iter().zip(results) {
        match r {
            None => non_finite += 1,
            Some((m, w)) => {
                if m > worst || m.is_nan() {
                    worst = if m.is_nan() { f64::INFINITY } else { m };
                    at = Some(*s);
                    value = Some(w);
                }
            }
        }
    }
    MembershipReport {
        samples: samples.len(),
        non_finite,
        worst_margin: worst,
        worst_point: at,
        worst_value: value,
        tolerance: MEMBERSHIP_TOL,
        pass: non_finite == 0 && worst <= MEMBERSHIP_TOL,
    }
}

/// `∫_a^b p′(∞, ξ) dξ` without tabulation.
pub fn integrate_angular_derivative(p: &HerglotzField, a: f64, b: f64) -> Result<f64> {
    adaptive_simpson(|t| angular_derivative_infinity(p, t), a, b, QUAD_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn field(src: &str) -> HerglotzField {
        HerglotzField::from_expr(&parse(src).unwrap()).unwrap()
    }

    fn small_grid() -> Grid {
        Grid::new([1e-2, 1e2], [-10.0, 10.0], 12, 12, crate::numeric::Layout::LogX).unwrap()
    }

    #[test]
    fn validation_examples() {
        let r = validate(&HerglotzField::constant(c(1.0, 0.0)), &small_grid(), &[0.0, 1.0]);
        assert!(r.pass);
        assert_eq!(r.min_re, 1.0);

        let r = validate(&field("z + 1"), &small_grid(), &[0.0, 2.0]);
        assert!(r.pass && r.strip.is_none());

        let r = validate(&HerglotzField::constant(c(-1.0, 0.0)), &small_grid(), &[0.0]);
        assert!(!r.hf3_pass && !r.pass);
        assert_eq!(r.min_re, -1.0);
    }

    #[test]
    fn strip_contraction() {
        // p(z) = 1 + 0.3 (z−1)/(z+1) maps H into the strip 0.7 < Re w < 1.3
        let p = field("1 + 0.3*(z-1)/(z+1)").with_strip(0.7, 1.3);
        let r = validate(&p, &small_grid(), &[0.0]);
        let s = r.strip.unwrap();
        assert!(s.kappa > 0.0 && s.kappa < 1.0);
        assert!(s.contained && s.pass, "{s:?}");
        // a field that escapes the declared strip is caught
        let bad = field("z + 1").with_strip(0.5, 2.0);
        assert!(!validate(&bad, &small_grid(), &[0.0]).pass);
    }

    #[test]
    fn kappa_matches_brute_force() {
        let (c1, c2) = (0.5, 3.0);
        let k = strip_kappa(c1, c2).unwrap();
        let w = c2 - c1;
        let brute = (1..200_000)
            .map(|i| {
                let x = c1 + w * i as f64 / 200_000.0;
                w * (std::f64::consts::PI * (x - c1) / w).sin() / (std::f64::consts::PI * x)
            })
            .fold(0.0, f64::max);
        assert!((k - brute).abs() < 1e-9 && k >= brute);
        assert!(strip_kappa(0.0, 1.0).is_err());
    }

    #[test]
    fn angular_derivatives() {
        let p = HerglotzField::constant(c(2.0, 1.0));
        assert_eq!(angular_derivative_infinity(&p, 0.0).unwrap(), 0.0);
        // undeclared constant goes through the limit machinery
        let q = HerglotzField::from_fn(|_, _| c(2.0, 1.0));
        assert!(angular_derivative_infinity(&q, 0.0).unwrap() < 1e-12);
        let p = field("z + 1");
        assert!((angular_derivative_infinity(&p, 0.0).unwrap() - 1.0).abs() < 1e-9);
        let p = field("2*z + 1/(z+1)");
        assert!((angular_derivative_infinity(&p, 3.0).unwrap() - 2.0).abs() < 1e-9);
        assert!(angular_derivative_infinity(&p, -1.0).is_err());
    }

    #[test]
    fn normalization_examples() {
        // p′(∞) = 0 is a fixed point
        let p = HerglotzField::constant(c(1.0, 2.0));
        let (q, l) = normalize_at_infinity(&p, 5.0).unwrap();
        assert!(l.is_zero());
        assert_eq!(q.eval(c(1.0, 1.0), 2.0).unwrap(), c(1.0, 2.0));

        let (q, l) = normalize_at_infinity(&field("z + 1"), 5.0).unwrap();
        for &t in &[0.0, 0.5, 2.0, 4.5] {
            assert!((l.eval(t).unwrap() - t).abs() < 1e-9);
            for z in [c(0.3, 1.0), c(4.0, -2.0)] {
                let v = q.eval(z, t).unwrap();
                assert!((v - c((-t).exp(), 0.0)).norm() < 1e-8, "{v} at t={t}");
            }
        }

        let (q, l) = normalize_at_infinity(&field("2*z"), 3.0).unwrap();
        assert!((l.eval(1.5).unwrap() - 3.0).abs() < 1e-9);
        assert!(q.eval(c(2.0, 1.0), 1.5).unwrap().norm() < 1e-8);
    }

    #[test]
    fn normalization_is_idempotent() {
        let p = field("(1 + t)*z + 1/(z+1) + 0.5");
        let (q1, _) = normalize_at_infinity(&p, 2.0).unwrap();
        let (q2, l2) = normalize_at_infinity(&q1, 2.0).unwrap();
        assert!(l2.is_zero());
        for &(z, t) in &[(c(1.0, 0.5), 0.3), (c(0.2, -3.0), 1.7)] {
            assert!((q1.eval(z, t).unwrap() - q2.eval(z, t).unwrap()).norm() < 1e-10);
        }
    }

    #[test]
    fn identity_reparametrization() {
        let p = field("1 + 0.3*(z-1)/(z+1) + 0.1*i*t");
        let r = reparametrize_unbounded(&p, Arc::new(|_| 1.0), Arc::new(|_| 0.0), 0.5, 3.0).unwrap();
        assert!((r.tail_start - 3.0).abs() < 1e-12);
        for &(z, t) in &[(c(1.0, 1.0), 0.0), (c(0.5, -2.0), 1.3), (c(3.0, 0.0), 2.9)] {
            let a = p.eval(z, t).unwrap();
            let b = r.field.eval(z, t).unwrap();
            assert!((a - b).norm() < 1e-12, "{a} vs {b}");
        }
        assert_eq!(r.field.eval(c(1.0, 0.0), 3.5).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn constant_reparametrizes_to_one() {
        let cc = c(2.0, 0.7);
        let p = HerglotzField::constant(cc);
        let r = reparametrize_unbounded(
            &p,
            Arc::new(move |_| 1.0 / cc.re),
            Arc::new(move |_| cc.im),
            0.0,
            4.0,
        )
        .unwrap();
        assert!((r.tail_start - 8.0).abs() < 1e-10);
        for &xi in &[0.0, 1.0, 7.9, 9.0] {
            let v = r.field.eval(c(1.0, 2.0), xi).unwrap();
            assert!((v - 1.0).norm() < 1e-12);
        }
        let m = membership_report(&r.field, &Region::Uk(UkRegion::new(0.0).unwrap()), &small_grid(), &[0.5, 3.0]);
        assert!(m.pass);
    }

    #[test]
    fn doubled_speed_matches_formula() {
        let p = field("1 + 0.3*(z-1)/(z+1) + 0.2*i*t");
        let beta = |t: f64| 0.1 * t.sin();
        let r = reparametrize_unbounded(&p, Arc::new(|_| 2.0), Arc::new(beta), 0.5, 4.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let xi: f64 = rng.gen_range(0.0..2.0);
            let z = c(rng.gen_range(0.1..3.0), rng.gen_range(-3.0..3.0));
            let t = 2.0 * xi;
            let v = 0.1 * (1.0 - t.cos());
            let oracle = 2.0 * (p.eval(z + c(0.0, v), t).unwrap() - c(0.0, beta(t)));
            assert!((r.field.eval(z, xi).unwrap() - oracle).norm() < 1e-9);
        }
    }

    #[test]
    fn non_monotone_u_rejected() {
        let p = HerglotzField::constant(c(1.0, 0.0));
        let err = reparametrize_unbounded(&p, Arc::new(|t| 1.0 - t), Arc::new(|_| 0.0), 0.5, 2.0);
        assert!(matches!(err, Err(Error::Argument(_))));
    }

    #[test]
    fn membership_examples() {
        let g = small_grid();
        let p = HerglotzField::constant(c(1.0, 0.0));
        let r = membership_report(&p, &Region::Uk(UkRegion::new(0.3).unwrap()), &g, &[0.0]);
        assert!(r.pass && (r.worst_margin + 0.3).abs() < 1e-15);

        let p = field("z + 1");
        for k in [0.0, 0.5, 0.9] {
            let r = membership_report(&p, &Region::Uk(UkRegion::new(k).unwrap()), &g, &[0.0]);
            assert!(!r.pass);
        }
    }
}
