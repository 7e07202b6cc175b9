//! Evolution families `φ_{s,t}` from the chordal Loewner–Kufarev ODE
//! `dw/dτ = p(w, τ)`, integrated with the Dormand–Prince 5(4) pair.

use std::collections::HashMap;
use std::sync::Mutex;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::herglotz::HerglotzField;

/// Quantum of the memoization lattice in `s` and `t`.
pub const CACHE_QUANTUM: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            rtol: 1e-9,
            atol: 1e-12,
            max_step: f64::INFINITY,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CacheMode {
    /// Results on the `(s, t)` lattice are memoized behind a mutex.
    Synchronized,
    Disabled,
}

type CacheKey = (i64, i64, u64, u64, bool);

/// The two-parameter family attached to a Herglotz field.
pub struct EvolutionFamily {
    field: HerglotzField,
    settings: SolverSettings,
    cache: Option<Mutex<HashMap<CacheKey, (Complex64, Complex64)>>>,
}

impl std::fmt::Debug for EvolutionFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EvolutionFamily")
            .field("field", &self.field)
            .field("settings", &self.settings)
            .field("cache", &self.cache_mode())
            .finish()
    }
}

impl Clone for EvolutionFamily {
    fn clone(&self) -> Self {
        EvolutionFamily::with_settings(self.field.clone(), self.settings, self.cache_mode())
    }
}

// Dormand–Prince tableau
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Clone, Copy)]
struct State {
    w: Complex64,
    d: Complex64,
}

impl std::ops::Add for State {
    type Output = State;
    fn add(self, o: State) -> State {
        State { w: self.w + o.w, d: self.d + o.d }
    }
}

impl std::ops::Mul<State> for f64 {
    type Output = State;
    fn mul(self, s: State) -> State {
        State { w: self * s.w, d: self * s.d }
    }
}

fn on_lattice(x: f64) -> Option<i64> {
    let q = x / CACHE_QUANTUM;
    let r = q.round();
    ((q - r).abs() <= 1e-6 && r.abs() < 9e15).then_some(r as i64)
}

impl EvolutionFamily {
    pub fn new(field: HerglotzField) -> Self {
        Self::with_settings(field, SolverSettings::default(), CacheMode::Synchronized)
    }

    pub fn with_settings(field: HerglotzField, settings: SolverSettings, cache: CacheMode) -> Self {
        EvolutionFamily {
            field,
            settings,
            cache: match cache {
                CacheMode::Synchronized => Some(Mutex::new(HashMap::new())),
                CacheMode::Disabled => None,
            },
        }
    }

    pub fn field(&self) -> &HerglotzField {
        &self.field
    }

    pub fn settings(&self) -> SolverSettings {
        self.settings
    }

    pub fn cache_mode(&self) -> CacheMode {
        if self.cache.is_some() {
            CacheMode::Synchronized
        } else {
            CacheMode::Disabled
        }
    }

    pub fn cache_len(&self) -> usize {
        self.cache.as_ref().map_or(0, |c| c.lock().unwrap().len())
    }

    pub fn clear_cache(&self) {
        if let Some(c) = &self.cache {
            c.lock().unwrap().clear();
        }
    }

    /// `φ_{s,t}(z)`.
    pub fn evolve(&self, s: f64, t: f64, z: Complex64) -> Result<Complex64> {
        Ok(self.run(s, t, z, false)?.0)
    }

    /// `(φ_{s,t}(z), ∂φ_{s,t}/∂z)` integrated together.
    pub fn evolve_jet(&self, s: f64, t: f64, z: Complex64) -> Result<(Complex64, Complex64)> {
        self.run(s, t, z, true)
    }

    /// Jets at each of the increasing `times`, all starting from `(s, z)`.
    pub fn trajectory(&self, s: f64, z: Complex64, times: &[f64]) -> Result<Vec<(Complex64, Complex64)>> {
        let mut out = Vec::with_capacity(times.len());
        let (mut tau, mut w, mut d) = (s, z, Complex64::new(1.0, 0.0));
        for &t in times {
            if t < tau {
                return Err(Error::Argument(format!("trajectory times must increase from {s}")));
            }
            let (w1, d1) = self.run(tau, t, w, true)?;
            w = w1;
            d *= d1;
            tau = t;
            out.push((w, d));
        }
        Ok(out)
    }

    fn run(&self, s: f64, t: f64, z: Complex64, jet: bool) -> Result<(Complex64, Complex64)> {
        if !(s >= 0.0 && t >= s && t.is_finite()) {
            return Err(Error::Argument(format!("need 0 <= s <= t, got s = {s}, t = {t}")));
        }
        if !(z.re > 0.0 && z.im.is_finite()) {
            return Err(Error::DomainViolation {
                point: z,
                radius: 0.0,
                domain: "H".into(),
            });
        }
        let one = Complex64::new(1.0, 0.0);
        if s == t {
            return Ok((z, one));
        }
        let key = match (&self.cache, on_lattice(s), on_lattice(t)) {
            (Some(_), Some(a), Some(b)) => Some((a, b, z.re.to_bits(), z.im.to_bits(), jet)),
            _ => None,
        };
        if let (Some(k), Some(c)) = (key, &self.cache) {
            if let Some(v) = c.lock().unwrap().get(&k) {
                return Ok(*v);
            }
        }
        let mut knots = vec![s];
        knots.extend(self.field.breakpoints().iter().copied().filter(|&b| b > s && b < t));
        knots.push(t);
        let mut y = State { w: z, d: one };
        for seg in knots.windows(2) {
            y = self.integrate_segment(seg[0], seg[1], y, z.re, jet)?;
        }
        let out = (y.w, if jet { y.d } else { one });
        if let (Some(k), Some(c)) = (key, &self.cache) {
            c.lock().unwrap().insert(k, out);
        }
        Ok(out)
    }

    fn rhs(&self, y: State, tau: f64, jet: bool) -> Result<State> {
        if !(y.w.re > 0.0) {
            return Err(Error::Integration { time: tau, value: y.w });
        }
        let w = self.field.eval(y.w, tau)?;
        let d = if jet { self.field.dz(y.w, tau)? * y.d } else { Complex64::new(0.0, 0.0) };
        Ok(State { w, d })
    }

    fn error_norm(&self, y0: State, y1: State, err: State, jet: bool) -> f64 {
        let sc = |a: Complex64, b: Complex64| self.settings.atol + self.settings.rtol * a.norm().max(b.norm());
        let ew = err.w.norm() / sc(y0.w, y1.w);
        if jet {
            let ed = err.d.norm() / sc(y0.d, y1.d);
            ((ew * ew + ed * ed) / 2.0).sqrt()
        } else {
            ew
        }
    }

    fn integrate_segment(&self, a: f64, b: f64, mut y: State, re0: f64, jet: bool) -> Result<State> {
        // stage times are kept strictly inside segments bounded by breakpoints
        let delta = 1e-13 * b.abs().max(1.0);
        let clamp = |tau: f64| tau.clamp(a + delta, b - delta).max(a).min(b);
        let len = b - a;
        let mut tau = a;
        let mut k0 = self.rhs(y, clamp(tau), jet)?;
        let mut h = {
            // Hairer's starting-step heuristic, simplified
            let d0 = y.w.norm().max(1e-5);
            let d1 = k0.w.norm().max(1e-10);
            let tol = self.settings.rtol.max(1e-12);
            (0.01 * d0 / d1).min(tol.powf(0.2) * d0 / d1 * 10.0).min(len)
        }
        .min(self.settings.max_step);
        let mut steps = 0usize;
        while tau < b {
            steps += 1;
            if steps > self.settings.max_steps {
                return Err(Error::Stiffness { time: tau, step: h });
            }
            let last = tau + h >= b - 1e-14 * len;
            if last {
                h = b - tau;
            }
            if h <= 1e-14 * tau.abs().max(1.0) {
                return Err(Error::Stiffness { time: tau, step: h });
            }
            let attempt = (|| -> Result<(State, State, State)> {
                let mut k = [k0; 7];
                for i in 1..7 {
                    let mut yi = y;
                    for j in 0..i {
                        if A[i][j] != 0.0 {
                            yi = yi + (h * A[i][j]) * k[j];
                        }
                    }
                    k[i] = self.rhs(yi, clamp(tau + C[i] * h), jet)?;
                }
                let mut y1 = y;
                for j in 0..6 {
                    if A[6][j] != 0.0 {
                        y1 = y1 + (h * A[6][j]) * k[j];
                    }
                }
                let mut err = State { w: Complex64::new(0.0, 0.0), d: Complex64::new(0.0, 0.0) };
                for j in 0..7 {
                    if E[j] != 0.0 {
                        err = err + (h * E[j]) * k[j];
                    }
                }
                Ok((y1, err, k[6]))
            })();
            let (y1, err, k_last) = match attempt {
                Ok(v) => v,
                // a stage left H: retry with a smaller step
                Err(Error::Integration { .. }) => {
                    h *= 0.25;
                    continue;
                }
                Err(e) => return Err(e),
            };
            let en = self.error_norm(y, y1, err, jet);
            if en <= 1.0 {
                tau = if last { b } else { tau + h };
                y = y1;
                k0 = k_last;
                if !(y.w.re.is_finite() && y.w.im.is_finite()) {
                    return Err(Error::Integration { time: tau, value: y.w });
                }
                // Re p ≥ 0 forces Re w to be non-decreasing
                if y.w.re < re0 - 1e-9 * re0.max(1.0) {
                    return Err(Error::Integration { time: tau, value: y.w });
                }
                let fac = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
                h = (h * fac).min(self.settings.max_step);
            } else {
                h *= (0.9 * en.powf(-0.2)).clamp(0.1, 0.9);
            }
        }
        Ok(y)
    }

    /// `|φ_{u,t}(φ_{s,u}(z)) − φ_{s,t}(z)|`.
    pub fn semigroup_residual(&self, s: f64, u: f64, t: f64, z: Complex64) -> Result<f64> {
        if !(s <= u && u <= t) {
            return Err(Error::Argument(format!("need s <= u <= t, got {s}, {u}, {t}")));
        }
        let mid = self.evolve(s, u, z)?;
        let two_step = self.evolve(u, t, mid)?;
        let direct = self.evolve(s, t, z)?;
        Ok((two_step - direct).norm())
    }

    /// `α(t) = log(|φ′_{0,t}(1)| / Re φ_{0,t}(1))`.
    pub fn alpha_diagnostic(&self, t: f64) -> Result<f64> {
        let (w, d) = self.evolve_jet(0.0, t, Complex64::new(1.0, 0.0))?;
        Ok((d.norm() / w.re).ln())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use std::sync::Arc;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn family(src: &str) -> EvolutionFamily {
        EvolutionFamily::new(HerglotzField::from_expr(&parse(src).unwrap()).unwrap())
    }

    #[test]
    fn constant_fields_translate() {
        let e = EvolutionFamily::new(HerglotzField::constant(c(1.0, 0.0)));
        let v = e.evolve(0.5, 2.0, c(1.0, 1.0)).unwrap();
        assert!((v - c(2.5, 1.0)).norm() < 1e-13);
        let cc = c(0.7, -1.2);
        let e = EvolutionFamily::new(HerglotzField::constant(cc));
        let z = c(0.3, 0.4);
        let v = e.evolve(1.0, 4.0, z).unwrap();
        assert!((v - (z + 3.0 * cc)).norm() < 1e-12);
        let (_, d) = e.evolve_jet(0.0, 3.0, z).unwrap();
        assert!((d - 1.0).norm() < 1e-14);
        // EF1 holds exactly
        assert_eq!(e.evolve(2.0, 2.0, z).unwrap(), z);
    }

    #[test]
    fn linear_field_closed_form() {
        let e = family("z + 1");
        for &t in &[0.25, 1.0, 3.0] {
            let (w, d) = e.evolve_jet(0.0, t, c(1.0, 0.0)).unwrap();
            let exact = 2.0 * f64::exp(t) - 1.0;
            assert!((w.re - exact).abs() < 1e-8 * exact, "t={t}: {w} vs {exact}");
            assert!((d.re - t.exp()).abs() < 1e-8 * t.exp());
        }
    }

    #[test]
    fn jet_matches_cauchy_derivative() {
        use crate::numeric::{cauchy_derivative, Domain, HoloMap};
        let field = HerglotzField::from_fn(|z, t| {
            let zeta = 0.5 * Complex64::new(0.0, t).exp() * (z - 1.0) / (z + 1.0);
            (1.0 + zeta) / (1.0 - zeta)
        });
        let e = Arc::new(EvolutionFamily::with_settings(field, SolverSettings::default(), CacheMode::Disabled));
        for &z in &[c(1.0, 1.0), c(0.4, -2.0)] {
            let e2 = e.clone();
            let f = HoloMap::new(Domain::RightHalfPlane, move |w| e2.evolve(0.2, 1.5, w));
            let num = cauchy_derivative(&f, z, 1, 0.2 * z.re, 32).unwrap();
            let (_, d) = e.evolve_jet(0.2, 1.5, z).unwrap();
            assert!((num - d).norm() < 1e-6 * d.norm(), "{num} vs {d}");
        }
    }

    #[test]
    fn semigroup_and_time_independence() {
        let e = family("1 + 0.3*(z-1)/(z+1)");
        let z = c(1.0, 1.0);
        assert!(e.semigroup_residual(0.0, 0.5, 1.0, z).unwrap() < 1e-8);
        assert!(e.semigroup_residual(0.0, 0.0, 1.0, z).unwrap() < 1e-12);
        let a = e.evolve(0.7, 2.2, z).unwrap();
        let b = e.evolve(0.0, 1.5, z).unwrap();
        assert!((a - b).norm() < 1e-8);
    }

    #[test]
    fn alpha_examples() {
        let e = EvolutionFamily::new(HerglotzField::constant(c(1.0, 0.0)));
        for &t in &[0.5, 1.0, 10.0] {
            assert!((e.alpha_diagnostic(t).unwrap() - (1.0 / (1.0 + t)).ln()).abs() < 1e-9);
        }
        let e = family("z + 1");
        let exact = (10f64.exp() / (2.0 * 10f64.exp() - 1.0)).ln();
        assert!((e.alpha_diagnostic(10.0).unwrap() - exact).abs() < 1e-6);
    }

    #[test]
    fn breakpoints_are_respected() {
        // p jumps from 1 to 3 at t = 1
        let p = HerglotzField::from_fn(|_, t| c(if t < 1.0 { 1.0 } else { 3.0 }, 0.0)).with_breakpoints(vec![1.0]);
        let e = EvolutionFamily::new(p);
        let v = e.evolve(0.0, 2.0, c(1.0, 0.0)).unwrap();
        assert!((v - c(5.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn invalid_fields_fail() {
        let e = EvolutionFamily::new(HerglotzField::constant(c(-1.0, 0.0)));
        assert!(matches!(e.evolve(0.0, 2.0, c(1.0, 0.0)), Err(Error::Integration { .. })));
        let e = family("z + 1");
        assert!(e.evolve(1.0, 0.5, c(1.0, 0.0)).is_err());
        assert!(matches!(e.evolve(0.0, 1.0, c(-1.0, 0.0)), Err(Error::DomainViolation { .. })));
        // finite-time blow-up along the real axis
        let e = family("z^2");
        assert!(e.evolve(0.0, 2.0, c(1.0, 0.0)).is_err());
    }

    #[test]
    fn cache_modes_agree() {
        let p = HerglotzField::from_expr(&parse("1 + 0.3*(z-1)/(z+1)").unwrap()).unwrap();
        let a = EvolutionFamily::with_settings(p.clone(), SolverSettings::default(), CacheMode::Synchronized);
        let b = EvolutionFamily::with_settings(p, SolverSettings::default(), CacheMode::Disabled);
        let z = c(0.5, 0.5);
        let v1 = a.evolve(0.0, 1.0, z).unwrap();
        assert_eq!(a.cache_len(), 1);
        assert_eq!(a.evolve(0.0, 1.0, z).unwrap(), v1);
        assert_eq!(b.evolve(0.0, 1.0, z).unwrap(), v1);
        assert_eq!(b.cache_len(), 0);
        // off-lattice times are not memoized
        a.evolve(0.0, 1.0 + 3e-7, z).unwrap();
        assert_eq!(a.cache_len(), 1);
        a.clear_cache();
        assert_eq!(a.cache_len(), 0);
    }

    #[test]
    fn concurrent_use() {
        use rayon::prelude::*;
        let e = family("1 + 0.3*(z-1)/(z+1)");
        let zs: Vec<Complex64> = (0..32).map(|i| c(0.2 + 0.1 * i as f64, 0.0)).collect();
        let par: Vec<Complex64> = zs.par_iter().map(|&z| e.evolve(0.0, 1.0, z).unwrap()).collect();
        for (z, v) in zs.iter().zip(par) {
            assert_eq!(e.evolve(0.0, 1.0, *z).unwrap(), v);
        }
    }

    #[test]
    fn tolerance_halving_is_stable() {
        let p = HerglotzField::from_expr(&parse("1 + 0.3*(z-1)/(z+1) + 0.2*i*t").unwrap()).unwrap();
        let base = SolverSettings::default();
        let half = SolverSettings { rtol: base.rtol / 2.0, atol: base.atol / 2.0, ..base };
        let e1 = EvolutionFamily::with_settings(p.clone(), base, CacheMode::Disabled);
        let e2 = EvolutionFamily::with_settings(p, half, CacheMode::Disabled);
        for &z in &[c(1.0, 0.0), c(0.3, 2.0), c(5.0, -1.0)] {
            let a = e1.evolve(0.0, 2.0, z).unwrap();
            let b = e2.evolve(0.0, 2.0, z).unwrap();
            assert!((a - b).norm() < 10.0 * base.rtol * a.norm());
        }
    }
}
