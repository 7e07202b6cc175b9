use std::f64::consts::PI;

use num_complex::Complex64;

use super::holomap::HoloMap;
use crate::error::{Error, Result};

/// Quadrature nodes on the Cauchy circle.
pub const CAUCHY_POINTS: usize = 64;

/// Relative threshold for the `f'(z) != 0` test.
pub const SINGULAR_THRESHOLD: f64 = 1e-14;

/// `f^(order)(z)` from the trapezoid rule applied to the Cauchy integral
/// over the circle `|w - z| = radius`.
pub fn cauchy_derivative(
    f: &HoloMap,
    z: Complex64,
    order: usize,
    radius: f64,
    points: usize,
) -> Result<Complex64> {
    if points < 16 {
        return Err(Error::Argument(format!(
            "Cauchy quadrature needs at least 16 points, got {points}"
        )));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::Argument(format!("Cauchy radius must be positive, got {radius}")));
    }
    if f.domain().boundary_distance(z) <= radius {
        return Err(Error::DomainViolation {
            point: z,
            radius,
            domain: f.domain().to_string(),
        });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..points {
        let theta = 2.0 * PI * (j as f64) / (points as f64);
        let unit = Complex64::from_polar(1.0, theta);
        let w = f.eval(z + radius * unit)?;
        // unit^{-order}
        acc += w * Complex64::from_polar(1.0, -(order as f64) * theta);
    }
    let factorial: f64 = (1..=order).map(|k| k as f64).product();
    Ok(acc * factorial / (points as f64 * radius.powi(order as i32)))
}

/// `f′(z)`, rejecting values that vanish relative to the local scale.
pub fn checked_first_derivative(f: &HoloMap, z: Complex64) -> Result<Complex64> {
    let d1 = f.derivative(z, 1)?;
    let scale = f.local_scale(z)?.max(f64::MIN_POSITIVE);
    if d1.norm() <= SINGULAR_THRESHOLD * scale || d1.norm() == 0.0 {
        return Err(Error::SingularDerivative {
            point: z,
            magnitude: d1.norm(),
        });
    }
    Ok(d1)
}

/// `f''(z) / f'(z)`.
pub fn pre_schwarzian(f: &HoloMap, z: Complex64) -> Result<Complex64> {
    let d1 = checked_first_derivative(f, z)?;
    Ok(f.derivative(z, 2)? / d1)
}

/// `Sf = (f''/f')' - (f''/f')^2 / 2 = f'''/f' - 3/2 (f''/f')^2`.
pub fn schwarzian(f: &HoloMap, z: Complex64) -> Result<Complex64> {
    let d1 = checked_first_derivative(f, z)?;
    let p = f.derivative(z, 2)? / d1;
    Ok(f.derivative(z, 3)? / d1 - 1.5 * p * p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Domain;
    use std::f64::consts::E;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn polynomial_and_exponential() {
        let sq = HoloMap::from_fn(Domain::Plane, |z| z * z);
        let d = cauchy_derivative(&sq, c(1.0, 0.0), 1, 0.5, 64).unwrap();
        assert!((d - 2.0).norm() < 1e-14);
        let ex = HoloMap::from_fn(Domain::Plane, |z| z.exp());
        let d = cauchy_derivative(&ex, c(1.0, 0.0), 2, 0.5, 64).unwrap();
        assert!((d - E).norm() < 1e-13);
    }

    #[test]
    fn power_inverse_pre_schwarzian() {
        let f = HoloMap::from_fn(Domain::RightHalfPlane, |z| z.powf(-1.3));
        let ps = pre_schwarzian(&f, c(1.0, 0.0)).unwrap();
        assert!((ps - c(-2.3, 0.0)).norm() < 1e-10, "{ps}");
    }

    #[test]
    fn radius_beyond_domain_is_rejected() {
        let f = HoloMap::from_fn(Domain::RightHalfPlane, |z| z.ln());
        let err = cauchy_derivative(&f, c(0.5, 0.0), 1, 0.6, 64).unwrap_err();
        assert!(matches!(err, Error::DomainViolation { .. }));
        let err = cauchy_derivative(&f, c(1.0, 0.0), 1, 0.1, 8).unwrap_err();
        assert!(matches!(err, Error::Argument(_)));
    }

    #[test]
    fn affine_and_mobius() {
        let aff = HoloMap::from_fn(Domain::Plane, |z| c(2.0, 1.0) * z + 3.0);
        assert!(pre_schwarzian(&aff, c(0.2, 0.4)).unwrap().norm() < 1e-12);
        let mob = HoloMap::from_fn(Domain::RightHalfPlane, |z| (2.0 * z + 1.0) / (z + 3.0));
        assert!(schwarzian(&mob, c(1.0, 1.0)).unwrap().norm() < 1e-10);
    }

    #[test]
    fn log_schwarzian() {
        let lg = HoloMap::from_fn(Domain::RightHalfPlane, |z| z.ln());
        let s = schwarzian(&lg, c(1.0, 0.0)).unwrap();
        assert!((s - 0.5).norm() < 1e-10, "{s}");
    }

    #[test]
    fn vanishing_derivative() {
        let sq = HoloMap::from_fn(Domain::Plane, |z| z * z);
        let err = pre_schwarzian(&sq, c(0.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::SingularDerivative { .. }));
    }
}
