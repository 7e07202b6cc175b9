//! Adaptive Simpson quadrature and cumulative integrals of real functions.

use crate::error::{Error, Result};

/// Absolute tolerance used for time integrals.
pub const QUAD_TOL: f64 = 1e-10;
const MAX_DEPTH: u32 = 50;

fn simpson_rec<F: Fn(f64) -> Result<f64>>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    Ok(simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}

/// `∫_a^b f` by adaptive Simpson to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> Result<f64>>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return Ok(-adaptive_simpson(f, b, a, tol)?);
    }
    let fa = f(a)?;
    let fb = f(b)?;
    let fm = f(0.5 * (a + b))?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let v = simpson_rec(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)?;
    if !v.is_finite() {
        return Err(Error::Argument(format!("integral over [{a}, {b}] is not finite")));
    }
    Ok(v)
}

/// `∫_a^b f` split at `breakpoints` so no panel straddles a discontinuity.
pub fn integrate_piecewise<F: Fn(f64) -> Result<f64>>(
    f: &F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    tol: f64,
) -> Result<f64> {
    let mut knots = vec![a];
    knots.extend(breakpoints.iter().copied().filter(|&c| c > a && c < b));
    knots.push(b);
    knots.sort_by(f64::total_cmp);
    let panels = (knots.len() - 1).max(1) as f64;
    let mut total = 0.0;
    for w in knots.windows(2) {
        total += adaptive_simpson(|x| f(x), w[0], w[1], tol / panels)?;
    }
    Ok(total)
}

/// Tabulated running integral `F(t) = ∫_0^t f` on `[0, horizon]`, with
/// exact-on-demand refinement inside each cell.
pub struct CumulativeIntegral<F> {
    f: F,
    step: f64,
    horizon: f64,
    nodes: Vec<f64>,
    breakpoints: Vec<f64>,
}

impl<F: Fn(f64) -> Result<f64>> CumulativeIntegral<F> {
    pub fn new(f: F, horizon: f64, cells: usize, breakpoints: &[f64]) -> Result<Self> {
        if !(horizon >= 0.0) || cells == 0 {
            return Err(Error::Argument(format!(
                "cumulative integral needs horizon >= 0 and cells > 0 (got {horizon}, {cells})"
            )));
        }
        let step = if horizon > 0.0 { horizon / cells as f64 } else { 1.0 };
        let mut nodes = Vec::with_capacity(cells + 1);
        nodes.push(0.0);
        let mut acc = 0.0;
        if horizon > 0.0 {
            let per_cell = QUAD_TOL / cells as f64;
            for i in 0..cells {
                let a = i as f64 * step;
                let b = if i + 1 == cells { horizon } else { (i + 1) as f64 * step };
                acc += integrate_piecewise(&f, a, b, breakpoints, per_cell.max(1e-15))?;
                nodes.push(acc);
            }
        }
        Ok(CumulativeIntegral {
            f,
            step,
            horizon,
            nodes,
            breakpoints: breakpoints.to_vec(),
        })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Total integral over `[0, horizon]`.
    pub fn total(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if t <= 0.0 {
            return Ok(0.0);
        }
        if t > self.horizon * (1.0 + 1e-12) {
            return Err(Error::Argument(format!(
                "cumulative integral queried at {t} beyond horizon {}",
                self.horizon
            )));
        }
        let t = t.min(self.horizon);
        let cell = ((t / self.step).floor() as usize).min(self.nodes.len() - 1);
        let a = cell as f64 * self.step;
        let base = self.nodes[cell];
        if t <= a {
            return Ok(base);
        }
        Ok(base + integrate_piecewise(&self.f, a, t, &self.breakpoints, QUAD_TOL * 1e-2)?)
    }

    pub fn integrand(&self, t: f64) -> Result<f64> {
        (self.f)(t)
    }

    /// Inverse of a strictly increasing running integral, by bracketed
    /// bisection with secant steps, to `tol` in the argument.
    pub fn invert(&self, value: f64, tol: f64) -> Result<f64> {
        if value <= 0.0 {
            return Ok(0.0);
        }
        if value > self.total() {
            return Err(Error::Argument(format!(
                "value {value} exceeds running integral total {}",
                self.total()
            )));
        }
        // bracket from the node table
        let idx = self.nodes.partition_point(|&v| v < value);
        let mut lo = (idx.saturating_sub(1)) as f64 * self.step;
        let mut hi = (idx as f64 * self.step).min(self.horizon);
        let mut flo = self.eval(lo)? - value;
        let mut fhi = self.eval(hi)? - value;
        if fhi == 0.0 {
            return Ok(hi);
        }
        for _ in 0..200 {
            if hi - lo <= tol {
                break;
            }
            let secant = if fhi != flo { lo - flo * (hi - lo) / (fhi - flo) } else { f64::NAN };
            let mid = 0.5 * (lo + hi);
            // accept the secant point only when it falls well inside the bracket
            let x = if secant.is_finite() && secant > lo + 0.1 * (hi - lo) && secant < hi - 0.1 * (hi - lo) {
                secant
            } else {
                mid
            };
            let fx = self.eval(x)? - value;
            if fx == 0.0 {
                return Ok(x);
            }
            if (fx < 0.0) == (flo < 0.0) {
                lo = x;
                flo = fx;
            } else {
                hi = x;
                fhi = fx;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}
