//! Standalone SVG plots: polylines for curves, rect cells for heatmaps.
//!
//! Plots use data coordinates with `y` negated, so the `viewBox` of a region
//! `[x0, x1] × [y0, y1]` is `"x0 −y1 (x1−x0) (y1−y0)"`. Numbers are printed
//! with six decimals.

use std::fmt::Write;

use loewner_core::Complex64;

/// Series colors, cycled in order; also the eight `|μ|` bins of a heatmap.
pub const PALETTE: [&str; 8] = [
    "#440154", "#46327e", "#365c8d", "#277f8e", "#1fa187", "#4ac16d", "#a0da39", "#fde725",
];

/// Pixel size of the rendered image along its longer side.
pub const PIXELS: f64 = 640.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub x: [f64; 2],
    pub y: [f64; 2],
}

/// Six-decimal fixed format without a negative zero.
fn f6(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

/// Snaps to 1e−9 before rounding outward to 1e−3, so that values equal up
/// to round-off give the same box.
fn outward(v: f64, up: bool) -> f64 {
    let snapped = (v * 1e9).round() / 1e9;
    let scaled = snapped * 1e3;
    let r = if up { scaled.ceil() } else { scaled.floor() };
    r / 1e3
}

impl Bounds {
    /// Exact region bounds, as for a sampling grid.
    pub fn exact(x: [f64; 2], y: [f64; 2]) -> Self {
        Bounds { x, y }
    }

    fn data(points: &[(f64, f64)]) -> Option<([f64; 2], [f64; 2])> {
        let mut x = [f64::INFINITY, f64::NEG_INFINITY];
        let mut y = x;
        for &(a, b) in points.iter().filter(|(a, b)| a.is_finite() && b.is_finite()) {
            x = [x[0].min(a), x[1].max(a)];
            y = [y[0].min(b), y[1].max(b)];
        }
        x[0].is_finite().then_some((x, y))
    }

    /// Data bounds padded by 5% of each span (1 when the span vanishes),
    /// rounded outward to multiples of 1e−3.
    pub fn padded(points: &[(f64, f64)]) -> Self {
        let Some((x, y)) = Self::data(points) else {
            return Bounds { x: [-1.0, 1.0], y: [-1.0, 1.0] };
        };
        let pad = |r: [f64; 2]| {
            let span = r[1] - r[0];
            let p = 0.05 * if span > 0.0 { span } else { 1.0 };
            [outward(r[0] - p, false), outward(r[1] + p, true)]
        };
        Bounds { x: pad(x), y: pad(y) }
    }

    /// Square box centered on the data with side 1.1 times the larger span
    /// (1.1 when both vanish), rounded outward to multiples of 1e−3.
    pub fn square(points: &[(f64, f64)]) -> Self {
        let Some((x, y)) = Self::data(points) else {
            return Bounds { x: [-1.0, 1.0], y: [-1.0, 1.0] };
        };
        let span = (x[1] - x[0]).max(y[1] - y[0]);
        let half = 0.55 * if span > 0.0 { span } else { 1.0 };
        let (cx, cy) = (0.5 * (x[0] + x[1]), 0.5 * (y[0] + y[1]));
        Bounds {
            x: [outward(cx - half, false), outward(cx + half, true)],
            y: [outward(cy - half, false), outward(cy + half, true)],
        }
    }

    pub fn view_box(&self) -> String {
        format!(
            "{} {} {} {}",
            f6(self.x[0]),
            f6(-self.y[1]),
            f6(self.x[1] - self.x[0]),
            f6(self.y[1] - self.y[0])
        )
    }
}

pub struct Svg {
    bounds: Bounds,
    aspect: bool,
    body: String,
}

impl Svg {
    /// `aspect = false` stretches the data to the canvas.
    pub fn new(bounds: Bounds, aspect: bool) -> Self {
        Svg {
            bounds,
            aspect,
            body: String::new(),
        }
    }

    /// Draws `points`, breaking the line at non-finite entries.
    pub fn polyline(&mut self, points: &[(f64, f64)], color: usize) {
        for run in points.split(|(a, b)| !a.is_finite() || !b.is_finite()) {
            if run.len() < 2 {
                continue;
            }
            let coords: Vec<String> = run.iter().map(|(a, b)| format!("{},{}", f6(*a), f6(-b))).collect();
            let _ = writeln!(
                self.body,
                r#"<polyline fill="none" stroke="{}" stroke-width="1.5" vector-effect="non-scaling-stroke" points="{}"/>"#,
                PALETTE[color % PALETTE.len()],
                coords.join(" ")
            );
        }
    }

    pub fn complex_polyline(&mut self, points: &[Complex64], color: usize) {
        let pts: Vec<(f64, f64)> = points.iter().map(|w| (w.re, w.im)).collect();
        self.polyline(&pts, color);
    }

    /// Cell with lower-left corner `(x, y)`; `value` in `[0, 1]` picks one of
    /// eight bins.
    pub fn cell(&mut self, x: f64, y: f64, w: f64, h: f64, value: f64) {
        if !value.is_finite() {
            return;
        }
        let bin = ((value.clamp(0.0, 1.0) * 8.0).floor() as usize).min(7);
        let _ = writeln!(
            self.body,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{}"/>"#,
            f6(x),
            f6(-(y + h)),
            f6(w),
            f6(h),
            PALETTE[bin]
        );
    }

    pub fn finish(self) -> String {
        let (w, h) = (self.bounds.x[1] - self.bounds.x[0], self.bounds.y[1] - self.bounds.y[0]);
        let (pw, ph) = if !self.aspect || w >= h {
            (PIXELS, if self.aspect { PIXELS * h / w } else { 0.625 * PIXELS })
        } else {
            (PIXELS * w / h, PIXELS)
        };
        let ratio = if self.aspect { "xMidYMid meet" } else { "none" };
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{pw:.0}\" height=\"{ph:.0}\" viewBox=\"{}\" preserveAspectRatio=\"{ratio}\">\n{}</svg>\n",
            self.bounds.view_box(),
            self.body
        )
    }
}

/// The `viewBox` attribute of an SVG document.
pub fn view_box_of(doc: &str) -> Option<&str> {
    let start = doc.find("viewBox=\"")? + 9;
    let len = doc[start..].find('"')?;
    Some(&doc[start..start + len])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn view_boxes() {
        assert_eq!(Bounds::exact([-3.0, 3.0], [-2.0, 1.0]).view_box(), "-3.000000 -1.000000 6.000000 3.000000");
        let b = Bounds::square(&[(1.0, 0.0), (2.0, 0.0)]);
        assert_eq!(b.view_box(), "0.950000 -0.550000 1.100000 1.100000");
        let b = Bounds::padded(&[(0.0, 0.0), (10.0, -1.0)]);
        assert_eq!(b.x, [-0.5, 10.5]);
        assert_eq!(b.y, [-1.05, 0.05]);
    }

    #[test]
    fn document_shape() {
        let mut s = Svg::new(Bounds::exact([0.0, 1.0], [0.0, 1.0]), true);
        s.polyline(&[(0.0, 0.0), (1.0, 1.0), (f64::NAN, 0.0), (0.5, 0.5)], 0);
        s.cell(0.0, 0.0, 0.5, 0.5, 0.99);
        s.cell(0.0, 0.0, 0.5, 0.5, f64::NAN);
        let doc = s.finish();
        assert_eq!(view_box_of(&doc), Some("0.000000 -1.000000 1.000000 1.000000"));
        assert_eq!(doc.matches("<polyline").count(), 1);
        assert_eq!(doc.matches("<rect").count(), 1);
        assert!(doc.contains(PALETTE[7]));
        assert!(!doc.contains("-0.000000"));
    }
}
