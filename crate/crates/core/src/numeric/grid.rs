use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the first coordinate is spaced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Layout {
    /// Linear in `x` and `y`.
    #[default]
    Cartesian,
    /// Log-spaced `x`, linear `y`.
    LogX,
    /// `x` is a radius, `y` an angle: points `x·e^{iy}`.
    Polar,
}

/// A tensor-product sample set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub nx: usize,
    pub ny: usize,
    #[serde(default)]
    pub layout: Layout,
}

impl Grid {
    pub fn new(x: [f64; 2], y: [f64; 2], nx: usize, ny: usize, layout: Layout) -> Result<Self> {
        let g = Grid { x, y, nx, ny, layout };
        g.validate()?;
        Ok(g)
    }

    pub fn cartesian(x: [f64; 2], y: [f64; 2], nx: usize, ny: usize) -> Result<Self> {
        Self::new(x, y, nx, ny, Layout::Cartesian)
    }

    /// Log-spaced `x ∈ [1e−3, 1e3]`, `y ∈ [−50, 50]`, 80×80.
    pub fn half_plane_default() -> Self {
        Grid {
            x: [1e-3, 1e3],
            y: [-50.0, 50.0],
            nx: 80,
            ny: 80,
            layout: Layout::LogX,
        }
    }

    /// Polar grid of the punctured disk `0 < |z| ≤ r_max`.
    pub fn disk_default() -> Self {
        Grid {
            x: [0.02, 0.999],
            y: [0.0, 2.0 * std::f64::consts::PI],
            nx: 40,
            ny: 64,
            layout: Layout::Polar,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.nx >= 1
            && self.ny >= 1
            && self.x.iter().chain(self.y.iter()).all(|v| v.is_finite())
            && self.x[0] <= self.x[1]
            && self.y[0] <= self.y[1];
        if !ok {
            return Err(Error::Argument(format!("malformed grid {self:?}")));
        }
        if matches!(self.layout, Layout::LogX | Layout::Polar) && !(self.x[0] > 0.0) {
            return Err(Error::Argument(
                "log-spaced and polar grids need a positive lower x bound".into(),
            ));
        }
        Ok(())
    }

    fn coord(lo: f64, hi: f64, n: usize, i: usize, log: bool) -> f64 {
        if n == 1 {
            return if log { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        }
        let s = i as f64 / (n - 1) as f64;
        if log {
            lo * (hi / lo).powf(s)
        } else {
            lo + (hi - lo) * s
        }
    }

    pub fn xs(&self) -> Vec<f64> {
        let log = self.layout == Layout::LogX;
        (0..self.nx)
            .map(|i| Self::coord(self.x[0], self.x[1], self.nx, i, log))
            .collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        (0..self.ny)
            .map(|j| Self::coord(self.y[0], self.y[1], self.ny, j, false))
            .collect()
    }

    /// All sample points, row-major in `y`.
    pub fn points(&self) -> Vec<Complex64> {
        let xs = self.xs();
        let ys = self.ys();
        let mut out = Vec::with_capacity(self.nx * self.ny);
        for &y in &ys {
            for &x in &xs {
                out.push(match self.layout {
                    Layout::Polar => Complex64::from_polar(x, y),
                    _ => Complex64::new(x, y),
                });
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Nested refinement: `n ↦ 2n − 1` per axis, so every old point
    /// reappears bit-for-bit.
    pub fn refine(&self) -> Self {
        Grid {
            nx: 2 * self.nx - 1,
            ny: 2 * self.ny - 1,
            ..*self
        }
    }

    /// Drops points whose `x` lies within `band` of any of `seams`.
    pub fn avoiding(&self, seams: &[f64], band: f64) -> Vec<Complex64> {
        self.points()
            .into_iter()
            .filter(|z| seams.iter().all(|s| (z.re - s).abs() >= band))
            .collect()
    }
}
