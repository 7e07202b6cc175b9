use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::deriv::{cauchy_derivative, CAUCHY_POINTS};
use crate::error::{Error, Result};
use crate::expr::Expr;

pub type ComplexFn = Arc<dyn Fn(Complex64) -> Result<Complex64> + Send + Sync>;

/// Where a holomorphic map lives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "x0")]
pub enum Domain {
    /// `Re z > 0`.
    RightHalfPlane,
    /// `Re z > x0`.
    HalfPlane(f64),
    /// `|z| < 1`.
    UnitDisk,
    /// The whole plane.
    Plane,
}

impl Domain {
    pub fn contains(&self, z: Complex64) -> bool {
        self.boundary_distance(z) > 0.0
    }

    /// Euclidean distance to the boundary, negative outside.
    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        match *self {
            Domain::RightHalfPlane => z.re,
            Domain::HalfPlane(x0) => z.re - x0,
            Domain::UnitDisk => 1.0 - z.norm(),
            Domain::Plane => f64::INFINITY,
        }
    }

    pub fn is_half_plane(&self) -> bool {
        matches!(self, Domain::RightHalfPlane | Domain::HalfPlane(_))
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::RightHalfPlane => write!(f, "H"),
            Domain::HalfPlane(x0) => write!(f, "H({x0})"),
            Domain::UnitDisk => write!(f, "D"),
            Domain::Plane => write!(f, "C"),
        }
    }
}

/// An evaluable holomorphic function with optional analytic derivatives
/// and inverse.
#[derive(Clone)]
pub struct HoloMap {
    domain: Domain,
    eval: ComplexFn,
    derivs: [Option<ComplexFn>; 3],
    inverse: Option<ComplexFn>,
    label: String,
}

impl fmt::Debug for HoloMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HoloMap")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .field("analytic_derivatives", &self.analytic_order())
            .field("inverse", &self.inverse.is_some())
            .finish()
    }
}

impl HoloMap {
    pub fn new<F>(domain: Domain, eval: F) -> Self
    where
        F: Fn(Complex64) -> Result<Complex64> + Send + Sync + 'static,
    {
        HoloMap {
            domain,
            eval: Arc::new(eval),
            derivs: [None, None, None],
            inverse: None,
            label: String::from("<closure>"),
        }
    }

    /// Wraps an infallible closure.
    pub fn from_fn<F>(domain: Domain, f: F) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        Self::new(domain, move |z| Ok(f(z)))
    }

    /// Builds a map from a closed expression in `z` (parameters already
    /// bound). Derivatives up to order three are taken symbolically.
    pub fn from_expr(domain: Domain, expr: &Expr) -> Result<Self> {
        if let Some(name) = expr.parameters().into_iter().next() {
            return Err(Error::UnboundParameter(name));
        }
        let label = expr.to_string();
        let d1 = expr.differentiate(crate::expr::Var::Z);
        let d2 = d1.differentiate(crate::expr::Var::Z);
        let d3 = d2.differentiate(crate::expr::Var::Z);
        let to_fn = |e: Expr| -> ComplexFn { Arc::new(move |z| e.eval_zt(z, 0.0)) };
        Ok(HoloMap {
            domain,
            eval: to_fn(expr.clone()),
            derivs: [Some(to_fn(d1)), Some(to_fn(d2)), Some(to_fn(d3))],
            inverse: None,
            label,
        })
    }

    pub fn with_derivative<F>(mut self, order: usize, f: F) -> Self
    where
        F: Fn(Complex64) -> Result<Complex64> + Send + Sync + 'static,
    {
        assert!((1..=3).contains(&order), "analytic derivatives of order 1..=3");
        self.derivs[order - 1] = Some(Arc::new(f));
        self
    }

    pub fn with_inverse<F>(mut self, f: F) -> Self
    where
        F: Fn(Complex64) -> Result<Complex64> + Send + Sync + 'static,
    {
        self.inverse = Some(Arc::new(f));
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Highest order `n` such that orders `1..=n` are analytic.
    pub fn analytic_order(&self) -> usize {
        self.derivs.iter().take_while(|d| d.is_some()).count()
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let w = (self.eval)(z)?;
        if !w.is_finite() {
            return Err(Error::Evaluation {
                point: z,
                reason: format!("non-finite value {w}"),
            });
        }
        Ok(w)
    }

    pub fn inverse(&self, w: Complex64) -> Option<Result<Complex64>> {
        self.inverse.as_ref().map(|g| g(w))
    }

    /// Default Cauchy-circle radius at `z`: half the distance to the
    /// boundary, capped at one.
    pub fn default_radius(&self, z: Complex64) -> f64 {
        (0.5 * self.domain.boundary_distance(z)).min(1.0)
    }

    /// `f^(order)(z)`, analytic when available, otherwise by Cauchy
    /// quadrature with the default radius.
    pub fn derivative(&self, z: Complex64, order: usize) -> Result<Complex64> {
        if order == 0 {
            return self.eval(z);
        }
        if let Some(Some(d)) = self.derivs.get(order - 1) {
            let w = d(z)?;
            if w.is_finite() {
                return Ok(w);
            }
            return Err(Error::Evaluation {
                point: z,
                reason: format!("non-finite derivative of order {order}"),
            });
        }
        cauchy_derivative(self, z, order, self.default_radius(z), CAUCHY_POINTS)
    }

    /// Local scale `|f(z+r) - f(z)| / r` used for scale-free zero tests.
    pub fn local_scale(&self, z: Complex64) -> Result<f64> {
        let r = self.default_radius(z);
        let r = if r.is_finite() && r > 0.0 { r } else { 1e-3 };
        Ok((self.eval(z + r)? - self.eval(z)?).norm() / r)
    }

    /// Pre-composition with an affine map `z ↦ a z + b` (domain supplied
    /// by the caller).
    pub fn precompose_affine(&self, a: Complex64, b: Complex64, domain: Domain) -> HoloMap {
        let mut out = {
            let f = self.eval.clone();
            HoloMap::new(domain, move |z| f(a * z + b))
        };
        let mut scale = Complex64::new(1.0, 0.0);
        for k in 0..3 {
            scale *= a;
            if let Some(d) = self.derivs[k].clone() {
                let s = scale;
                out.derivs[k] = Some(Arc::new(move |z| Ok(s * d(a * z + b)?)));
            } else {
                break;
            }
        }
        out.label = format!("{}∘({a}·z+{b})", self.label);
        out
    }

    /// Post-composition with an affine map `w ↦ a w + b`.
    pub fn postcompose_affine(&self, a: Complex64, b: Complex64) -> HoloMap {
        let mut out = {
            let f = self.eval.clone();
            HoloMap::new(self.domain, move |z| Ok(a * f(z)? + b))
        };
        for k in 0..3 {
            if let Some(d) = self.derivs[k].clone() {
                out.derivs[k] = Some(Arc::new(move |z| Ok(a * d(z)?)));
            } else {
                break;
            }
        }
        out.label = format!("{a}·{}+{b}", self.label);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_distances() {
        let z = Complex64::new(0.25, 3.0);
        assert_eq!(Domain::RightHalfPlane.boundary_distance(z), 0.25);
        assert_eq!(Domain::HalfPlane(0.5).boundary_distance(z), -0.25);
        assert!(!Domain::HalfPlane(0.5).contains(z));
        assert!(Domain::UnitDisk.contains(Complex64::new(0.3, 0.3)));
        assert!(Domain::Plane.contains(z));
    }

    #[test]
    fn non_finite_values_are_rejected() {
        let f = HoloMap::from_fn(Domain::RightHalfPlane, |z| 1.0 / (z - 1.0));
        assert!(matches!(
            f.eval(Complex64::new(1.0, 0.0)),
            Err(Error::Evaluation { .. })
        ));
    }

    #[test]
    fn affine_compositions_carry_derivatives() {
        let f = HoloMap::from_fn(Domain::Plane, |z| z * z)
            .with_derivative(1, |z| Ok(2.0 * z))
            .with_derivative(2, |_| Ok(Complex64::new(2.0, 0.0)));
        let a = Complex64::new(0.0, 2.0);
        let b = Complex64::new(1.0, 0.0);
        let g = f.precompose_affine(a, b, Domain::Plane);
        let z = Complex64::new(0.3, -0.1);
        let w = a * z + b;
        assert!((g.eval(z).unwrap() - w * w).norm() < 1e-14);
        assert!((g.derivative(z, 1).unwrap() - 2.0 * a * w).norm() < 1e-14);
        assert!((g.derivative(z, 2).unwrap() - 2.0 * a * a).norm() < 1e-14);
        let h = f.postcompose_affine(a, b);
        assert!((h.derivative(z, 1).unwrap() - a * 2.0 * z).norm() < 1e-14);
    }
}
