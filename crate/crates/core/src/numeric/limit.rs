use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::holomap::HoloMap;
use crate::error::{Error, Result};

/// Default base radius `R` of the `(R, 4R, 16R)` schedule.
pub const DEFAULT_BASE_RADIUS: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitEstimate {
    pub value: Complex64,
    pub error: f64,
}

pub fn default_ray_samples() -> [f64; 3] {
    let r = DEFAULT_BASE_RADIUS;
    [r, 4.0 * r, 16.0 * r]
}

/// Richardson-extrapolated limit of `q(x)` along increasing radii, assuming
/// `q(x) = L + a/x + b/x² + …`. Requires a geometric schedule of three or
/// more radii; only the last three are used for extrapolation.
pub fn richardson_at_infinity<F>(q: F, radii: &[f64]) -> Result<LimitEstimate>
where
    F: Fn(f64) -> Result<Complex64>,
{
    if radii.len() < 3 {
        return Err(Error::Argument("angular limit needs at least three radii".into()));
    }
    if radii.windows(2).any(|w| !(w[1] > w[0])) || !(radii[0] > 0.0) {
        return Err(Error::Argument("ray samples must be positive and increasing".into()));
    }
    let n = radii.len();
    let (r0, r1, r2) = (radii[n - 3], radii[n - 2], radii[n - 1]);
    let (q0, q1, q2) = (q(r0)?, q(r1)?, q(r2)?);
    let d1 = (q1 - q0).norm();
    let d2 = (q2 - q1).norm();
    let size = 1.0 + q2.norm();
    let negligible = |d: f64| d <= 1e-13 * size;
    if !negligible(d1) && !negligible(d2) && d2 >= 0.75 * d1 {
        return Err(Error::NoLimit(format!(
            "successive quotients do not contract: |Δ1| = {d1:e}, |Δ2| = {d2:e}"
        )));
    }
    // first-order eliminations for ratio s = r1/r0, then a second-order one
    let s1 = r1 / r0;
    let s2 = r2 / r1;
    let l01 = (s1 * q1 - q0) / (s1 - 1.0);
    let l12 = (s2 * q2 - q1) / (s2 - 1.0);
    let s = r2 / r0;
    let value = (s * l12 - l01) / (s - 1.0);
    let error = (value - l12).norm().max((l12 - l01).norm());
    Ok(LimitEstimate { value, error })
}

/// Estimate of `f'(∞) = lim f(x)/x` along the positive real axis.
pub fn angular_limit_at_infinity(f: &HoloMap, ray_samples: &[f64]) -> Result<LimitEstimate> {
    for &x in ray_samples {
        if !f.domain().contains(Complex64::new(x, 0.0)) {
            return Err(Error::DomainViolation {
                point: Complex64::new(x, 0.0),
                radius: 0.0,
                domain: f.domain().to_string(),
            });
        }
    }
    richardson_at_infinity(|x| Ok(f.eval(Complex64::new(x, 0.0))? / x), ray_samples)
}

/// Heuristic test that `|f(x)|` grows without bound along the real axis.
pub fn tends_to_infinity(f: &HoloMap) -> Result<bool> {
    let radii = [1e2, 1e3, 1e4, 1e5, 1e6];
    let mut mags = Vec::with_capacity(radii.len());
    for &x in &radii {
        mags.push(f.eval(Complex64::new(x, 0.0))?.norm());
    }
    let increasing = mags.windows(2).all(|w| w[1] > w[0]);
    Ok(increasing && mags[mags.len() - 1] > 2.0 * mags[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Domain;

    #[test]
    fn affine() {
        let f = HoloMap::from_fn(Domain::RightHalfPlane, |z| 2.0 * z + 1.0);
        let l = angular_limit_at_infinity(&f, &default_ray_samples()).unwrap();
        assert!((l.value - 2.0).norm() < 1e-12);
    }

    #[test]
    fn logarithmic_correction() {
        // brute force: f(x)/x at x = 1e8 is 1 + 1.8e-7
        let f = HoloMap::from_fn(Domain::RightHalfPlane, |z| z + (z + 1.0).ln());
        let brute = f.eval(Complex64::new(1e8, 0.0)).unwrap() / 1e8;
        assert!((brute - 1.0).norm() < 2e-7);
        let l = angular_limit_at_infinity(&f, &[1e6, 4e6, 1.6e7]).unwrap();
        assert!((l.value - 1.0).norm() < 1e-6, "{:?}", l);
        let l = angular_limit_at_infinity(&f, &default_ray_samples()).unwrap();
        assert!((l.value - 1.0).norm() < 1e-3);
    }

    #[test]
    fn sqrt_shift() {
        let f = HoloMap::from_fn(Domain::RightHalfPlane, |z| ((z + 1.0) * (z + 1.0) + 1.0).sqrt());
        let l = angular_limit_at_infinity(&f, &default_ray_samples()).unwrap();
        assert!((l.value - 1.0).norm() < 1e-9, "{:?}", l);
    }

    #[test]
    fn divergence_is_reported() {
        let f = HoloMap::from_fn(Domain::RightHalfPlane, |z| z * z);
        assert!(matches!(
            angular_limit_at_infinity(&f, &default_ray_samples()),
            Err(Error::NoLimit(_))
        ));
        let g = HoloMap::from_fn(Domain::RightHalfPlane, |z| z * z.ln());
        assert!(angular_limit_at_infinity(&g, &default_ray_samples()).is_err());
        assert!(angular_limit_at_infinity(&g, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn growth_test() {
        let f = HoloMap::from_fn(Domain::RightHalfPlane, |z| z + 0.1 * z / (z + 1.0));
        assert!(tends_to_infinity(&f).unwrap());
        let g = HoloMap::from_fn(Domain::RightHalfPlane, |z| 1.0 / (z + 1.0));
        assert!(!tends_to_infinity(&g).unwrap());
    }
}
