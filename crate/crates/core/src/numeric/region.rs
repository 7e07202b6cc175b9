use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `½·log((1+ρ)/(1−ρ))` with `ρ = |z1 − z2| / |z1 + conj(z2)|`.
pub fn hyperbolic_distance(z1: Complex64, z2: Complex64) -> Result<f64> {
    if !(z1.re > 0.0) || !(z2.re > 0.0) {
        return Err(Error::DomainViolation {
            point: if z1.re > 0.0 { z2 } else { z1 },
            radius: 0.0,
            domain: "H".into(),
        });
    }
    let rho = (z1 - z2).norm() / (z1 + z2.conj()).norm();
    Ok(rho.min(1.0).atanh())
}

/// A closed Euclidean disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EuclideanDisk {
    pub center: Complex64,
    pub radius: f64,
}

impl EuclideanDisk {
    pub fn new(center: Complex64, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) || !center.is_finite() {
            return Err(Error::Argument(format!(
                "disk needs a finite center and radius >= 0, got ({center}, {radius})"
            )));
        }
        Ok(EuclideanDisk { center, radius })
    }

    pub fn contains(&self, w: Complex64, tol: f64) -> bool {
        self.margin(w) <= tol
    }

    /// Signed distance to the circle, negative inside.
    pub fn margin(&self, w: Complex64) -> f64 {
        (w - self.center).norm() - self.radius
    }

    pub fn excludes_origin(&self) -> bool {
        self.center.norm() > self.radius
    }

    /// Points of minimal and maximal modulus.
    pub fn extremal_modulus_points(&self) -> Option<(Complex64, Complex64)> {
        let m = self.center.norm();
        if m <= self.radius {
            return None;
        }
        let dir = self.center / m;
        Some((dir * (m - self.radius), dir * (m + self.radius)))
    }

    /// `max_{w,z ∈ B} sqrt(|w/z|)`, infinite when the disk meets 0.
    pub fn modulus_ratio_root(&self) -> f64 {
        let m = self.center.norm();
        if m <= self.radius {
            return f64::INFINITY;
        }
        ((m + self.radius) / (m - self.radius)).sqrt()
    }

    /// Geometric mean of the extremal-modulus points; it lies in the disk.
    pub fn geometric_center(&self) -> Option<Complex64> {
        self.extremal_modulus_points().map(|(w1, w2)| {
            let m = self.center.norm();
            (self.center / m) * (w1.norm() * w2.norm()).sqrt()
        })
    }

    /// Hyperbolic description when the disk lies inside `H`.
    pub fn to_hyperbolic(&self) -> Option<HyperbolicDisk> {
        let a = self.center.re;
        if a - self.radius <= 0.0 {
            return None;
        }
        let x = (a * a - self.radius * self.radius).sqrt();
        // r/a = 2ρ/(1+ρ²)
        let q = self.radius / a;
        let rho = if q == 0.0 { 0.0 } else { (1.0 - (1.0 - q * q).sqrt()) / q };
        Some(HyperbolicDisk {
            center: Complex64::new(x, self.center.im),
            radius: rho.atanh(),
        })
    }
}

/// A closed disk for the hyperbolic distance of `H`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicDisk {
    pub center: Complex64,
    pub radius: f64,
}

impl HyperbolicDisk {
    pub fn new(center: Complex64, radius: f64) -> Result<Self> {
        if !(center.re > 0.0) || !(radius >= 0.0) {
            return Err(Error::Argument(format!(
                "hyperbolic disk needs Re center > 0 and radius >= 0, got ({center}, {radius})"
            )));
        }
        Ok(HyperbolicDisk { center, radius })
    }

    /// Disk of radius `½·log K` about `center`.
    pub fn with_dilatation(center: Complex64, big_k: f64) -> Result<Self> {
        Self::new(center, 0.5 * big_k.ln())
    }

    /// `hyperbolic distance − radius`; `+∞` outside `H`.
    pub fn margin(&self, w: Complex64) -> f64 {
        match hyperbolic_distance(w, self.center) {
            Ok(d) => d - self.radius,
            Err(_) => f64::INFINITY,
        }
    }

    pub fn contains(&self, w: Complex64, tol: f64) -> bool {
        self.margin(w) <= tol
    }

    /// The `k` with `½·log((1+k)/(1−k))` equal to the radius.
    pub fn equivalent_k(&self) -> f64 {
        self.radius.tanh()
    }

    pub fn to_euclidean(&self) -> EuclideanDisk {
        let rho = self.radius.tanh();
        let x = self.center.re;
        let denom = 1.0 - rho * rho;
        EuclideanDisk {
            center: Complex64::new(x * (1.0 + rho * rho) / denom, self.center.im),
            radius: 2.0 * x * rho / denom,
        }
    }
}

/// `U(k) = {w : |w − 1| / |w + 1| ≤ k}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UkRegion {
    pub k: f64,
}

impl UkRegion {
    pub fn new(k: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&k) {
            return Err(Error::Argument(format!("U(k) needs k in [0,1), got {k}")));
        }
        Ok(UkRegion { k })
    }

    pub fn ratio(w: Complex64) -> f64 {
        (w - 1.0).norm() / (w + 1.0).norm()
    }

    /// `|w−1|/|w+1| − k`.
    pub fn margin(&self, w: Complex64) -> f64 {
        Self::ratio(w) - self.k
    }

    pub fn contains(&self, w: Complex64) -> bool {
        Self::ratio(w) <= self.k
    }

    pub fn euclidean(&self) -> EuclideanDisk {
        let k2 = self.k * self.k;
        EuclideanDisk {
            center: Complex64::new((1.0 + k2) / (1.0 - k2), 0.0),
            radius: 2.0 * self.k / (1.0 - k2),
        }
    }

    pub fn hyperbolic(&self) -> HyperbolicDisk {
        HyperbolicDisk {
            center: Complex64::new(1.0, 0.0),
            radius: self.k.atanh(),
        }
    }

    /// `K = (1+k)/(1−k)`.
    pub fn dilatation(&self) -> f64 {
        (1.0 + self.k) / (1.0 - self.k)
    }
}

/// Any of the three target regions used by membership checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Region {
    Uk(UkRegion),
    Euclidean(EuclideanDisk),
    Hyperbolic(HyperbolicDisk),
}

impl Region {
    /// Signed violation; non-positive means inside.
    pub fn margin(&self, w: Complex64) -> f64 {
        match self {
            Region::Uk(u) => u.margin(w),
            Region::Euclidean(d) => d.margin(w),
            Region::Hyperbolic(d) => d.margin(w),
        }
    }
}
