//! Smallest enclosing disk by the randomized incremental method, and the
//! enclosing disk with the least modulus ratio.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::region::EuclideanDisk;
use crate::error::{Error, Result};

const SHUFFLE_SEED: u64 = 0x5eed_d15c;
const EPS: f64 = 1e-12;

fn inside(d: &EuclideanDisk, p: Complex64) -> bool {
    (p - d.center).norm() <= d.radius * (1.0 + EPS) + EPS
}

fn from_two(a: Complex64, b: Complex64) -> EuclideanDisk {
    EuclideanDisk {
        center: 0.5 * (a + b),
        radius: 0.5 * (a - b).norm(),
    }
}

fn from_three(a: Complex64, b: Complex64, c: Complex64) -> EuclideanDisk {
    let bx = b - a;
    let cx = c - a;
    let d = 2.0 * (bx.re * cx.im - bx.im * cx.re);
    if d.abs() < 1e-300 {
        // collinear: the widest pair spans the disk
        let cands = [from_two(a, b), from_two(a, c), from_two(b, c)];
        return cands
            .into_iter()
            .max_by(|x, y| x.radius.total_cmp(&y.radius))
            .unwrap();
    }
    let b2 = bx.norm_sqr();
    let c2 = cx.norm_sqr();
    let ux = (cx.im * b2 - bx.im * c2) / d;
    let uy = (bx.re * c2 - cx.re * b2) / d;
    let u = Complex64::new(ux, uy);
    EuclideanDisk {
        center: a + u,
        radius: u.norm(),
    }
}

/// Smallest closed disk containing every point. The input order is
/// shuffled with a fixed seed, so results are deterministic.
pub fn min_enclosing_disk(points: &[Complex64]) -> Result<EuclideanDisk> {
    if points.is_empty() {
        return Err(Error::Argument("min_enclosing_disk of an empty set".into()));
    }
    if let Some(p) = points.iter().find(|p| !p.is_finite()) {
        return Err(Error::Argument(format!("non-finite point {p}")));
    }
    let mut pts = points.to_vec();
    pts.shuffle(&mut ChaCha8Rng::seed_from_u64(SHUFFLE_SEED));

    let mut disk = EuclideanDisk {
        center: pts[0],
        radius: 0.0,
    };
    for i in 1..pts.len() {
        if inside(&disk, pts[i]) {
            continue;
        }
        disk = EuclideanDisk {
            center: pts[i],
            radius: 0.0,
        };
        for j in 0..i {
            if inside(&disk, pts[j]) {
                continue;
            }
            disk = from_two(pts[i], pts[j]);
            for k in 0..j {
                if !inside(&disk, pts[k]) {
                    disk = from_three(pts[i], pts[j], pts[k]);
                }
            }
        }
    }
    Ok(disk)
}

/// `max_s |s − c| / |c|`, the ratio `r/|c|` of the smallest disk about `c`
/// containing every point.
fn spread(points: &[Complex64], c: Complex64) -> (f64, usize) {
    let m = c.norm();
    let (d, i) = points
        .iter()
        .enumerate()
        .map(|(i, s)| ((s - c).norm(), i))
        .fold((f64::NEG_INFINITY, 0), |a, v| if v.0 > a.0 { v } else { a });
    (if m > 0.0 { d / m } else { f64::INFINITY }, i)
}

/// Direction `u` maximizing `min_s Re(s ū)`, with that minimum.
fn separating_direction(points: &[Complex64]) -> (Complex64, f64) {
    let support = |theta: f64| {
        let u = Complex64::from_polar(1.0, theta);
        let m = points.iter().map(|s| (s * u.conj()).re).fold(f64::INFINITY, f64::min);
        (m, u)
    };
    const N: usize = 1440;
    let step = 2.0 * std::f64::consts::PI / N as f64;
    let (mut best, mut theta) = (f64::NEG_INFINITY, 0.0);
    for j in 0..N {
        let t = j as f64 * step;
        let (m, _) = support(t);
        if m > best {
            best = m;
            theta = t;
        }
    }
    // the support function is concave in θ where it is positive
    let (mut lo, mut hi) = (theta - step, theta + step);
    for _ in 0..80 {
        let a = lo + 0.382 * (hi - lo);
        let b = hi - 0.382 * (hi - lo);
        if support(a).0 < support(b).0 {
            lo = a;
        } else {
            hi = b;
        }
    }
    let (m, u) = support(0.5 * (lo + hi));
    if m > best {
        (u, m)
    } else {
        (support(theta).1, best)
    }
}

/// Enclosing disk minimizing `max_{w,z∈B} |w/z|`, i.e. the ratio `r/|c|`.
/// `None` when every enclosing disk contains 0, which happens exactly when
/// 0 lies in the convex hull of the points.
///
/// The ratio is quasi-convex in the center: `{c : |s − c| ≤ λ|c|}` is the
/// disk about `s/(1−λ²)` of radius `λ|s|/(1−λ²)` for `λ < 1`. A planar
/// ellipsoid method with tangent-line cuts converges to the optimum.
pub fn min_ratio_disk(points: &[Complex64]) -> Result<Option<EuclideanDisk>> {
    let smallest = min_enclosing_disk(points)?;
    if smallest.radius == 0.0 {
        return Ok(smallest.excludes_origin().then_some(smallest));
    }
    let scale = points.iter().map(|s| s.norm()).fold(0.0, f64::max);
    let (u, m) = separating_direction(points);
    if m <= 1e-14 * scale {
        return Ok(None);
    }
    // far along u every point is strictly closer than |c|
    let reach = points.iter().map(|s| s.norm_sqr() / (2.0 * (s * u.conj()).re)).fold(0.0, f64::max);
    let mut best_c = u * (2.0 * reach);
    let mut best = spread(points, best_c).0;
    let (g0, _) = spread(points, smallest.center);
    if g0 < best {
        best = g0;
        best_c = smallest.center;
    }
    if !(best < 1.0) {
        return Ok(None);
    }
    let apollonius = |s: Complex64, lam: f64| (s / (1.0 - lam * lam), lam * s.norm() / (1.0 - lam * lam));
    let (c0, r0) = apollonius(points[spread(points, best_c).1], best);
    let mut c = c0;
    // P = [[p11, p12], [p12, p22]]
    let (mut p11, mut p12, mut p22) = (r0 * r0, 0.0, r0 * r0);
    for _ in 0..800 {
        let (g, i) = spread(points, c);
        if g < best {
            best = g;
            best_c = c;
        }
        let lam = if g <= best { g } else { best };
        let normal = if c.norm() == 0.0 {
            -points[i]
        } else {
            c - apollonius(points[i], lam).0
        };
        let (gx, gy) = (normal.re, normal.im);
        let pgx = p11 * gx + p12 * gy;
        let pgy = p12 * gx + p22 * gy;
        let q = gx * pgx + gy * pgy;
        if !(q > 0.0) || !q.is_finite() {
            break;
        }
        let sq = q.sqrt();
        let (bx, by) = (pgx / sq, pgy / sq);
        c -= Complex64::new(bx, by) / 3.0;
        let f = 4.0 / 3.0;
        p11 = f * (p11 - 2.0 / 3.0 * bx * bx);
        p12 = f * (p12 - 2.0 / 3.0 * bx * by);
        p22 = f * (p22 - 2.0 / 3.0 * by * by);
        if (p11 * p22 - p12 * p12).max(0.0).sqrt().sqrt() <= 1e-15 * (1.0 + best_c.norm()) {
            break;
        }
    }
    let radius = points.iter().map(|s| (s - best_c).norm()).fold(0.0, f64::max);
    Ok(Some(EuclideanDisk { center: best_c, radius }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Exhaustive oracle over all 2- and 3-point supports.
    fn brute_force(points: &[Complex64]) -> EuclideanDisk {
        let n = points.len();
        if n == 1 {
            return EuclideanDisk { center: points[0], radius: 0.0 };
        }
        let covers = |d: &EuclideanDisk| points.iter().all(|p| (p - d.center).norm() <= d.radius + 1e-9);
        let mut best: Option<EuclideanDisk> = None;
        let mut consider = |d: EuclideanDisk| {
            if covers(&d) && best.map_or(true, |b| d.radius < b.radius) {
                best = Some(d);
            }
        };
        for i in 0..n {
            for j in i + 1..n {
                consider(from_two(points[i], points[j]));
                for k in j + 1..n {
                    consider(from_three(points[i], points[j], points[k]));
                }
            }
        }
        best.unwrap()
    }

    #[test]
    fn small_cases() {
        let d = min_enclosing_disk(&[c(1.0, 0.0)]).unwrap();
        assert_eq!(d.center, c(1.0, 0.0));
        assert_eq!(d.radius, 0.0);
        let d = min_enclosing_disk(&[c(0.0, 0.0), c(2.0, 0.0)]).unwrap();
        assert!((d.center - c(1.0, 0.0)).norm() < 1e-15 && (d.radius - 1.0).abs() < 1e-15);
        let pts = [c(1.5, 0.0), c(0.5, 0.0), c(1.0, 0.5), c(1.0, -0.5)];
        let d = min_enclosing_disk(&pts).unwrap();
        let o = brute_force(&pts);
        assert!((d.center - c(1.0, 0.0)).norm() < 1e-12 && (d.radius - 0.5).abs() < 1e-12);
        assert!((o.radius - 0.5).abs() < 1e-12);
        assert!(min_enclosing_disk(&[]).is_err());
    }

    fn ratio(d: &EuclideanDisk) -> f64 {
        d.radius / d.center.norm()
    }

    #[test]
    fn ratio_disk_examples() {
        // a disk image is its own optimum
        let pts: Vec<Complex64> = (0..64).map(|j| c(1.0, 0.0) + Complex64::from_polar(0.4, j as f64 * 0.1)).collect();
        let d = min_ratio_disk(&pts).unwrap().unwrap();
        assert!((d.center - c(1.0, 0.0)).norm() < 1e-6 && (ratio(&d) - 0.4).abs() < 1e-9);
        // the smallest disk around {1, 5, 1 ± 2i} contains 0 but a larger one does not
        let pts = [c(1.0, 0.0), c(5.0, 0.0), c(1.0, 2.0), c(1.0, -2.0)];
        assert!(!min_enclosing_disk(&pts).unwrap().excludes_origin());
        let d = min_ratio_disk(&pts).unwrap().unwrap();
        assert!(d.excludes_origin());
        for p in &pts {
            assert!((p - d.center).norm() <= d.radius * (1.0 + 1e-12));
        }
        assert!(min_ratio_disk(&[c(1.0, 0.0), c(-1.0, 0.0)]).unwrap().is_none());
        assert!(min_ratio_disk(&[c(1.0, 1.0), c(-1.0, 1.0), c(0.0, -1.0)]).unwrap().is_none());
        let one = min_ratio_disk(&[c(2.0, 1.0)]).unwrap().unwrap();
        assert_eq!(one.radius, 0.0);
    }

    /// Grid search over centers, refined around the best cell.
    fn ratio_oracle(points: &[Complex64]) -> f64 {
        let (mut cx, mut cy, mut w) = (0.0, 0.0, 200.0);
        let mut best = f64::INFINITY;
        for _ in 0..30 {
            let (mut bx, mut by) = (cx, cy);
            for i in -20..=20 {
                for j in -20..=20 {
                    let z = c(cx + w * i as f64 / 20.0, cy + w * j as f64 / 20.0);
                    let g = spread(points, z).0;
                    if g < best {
                        best = g;
                        bx = z.re;
                        by = z.im;
                    }
                }
            }
            cx = bx;
            cy = by;
            w *= 0.3;
        }
        best
    }

    proptest! {
        #[test]
        fn ratio_disk_matches_oracle(raw in prop::collection::vec((0.2f64..6.0, -4.0f64..4.0), 2..10)) {
            let pts: Vec<Complex64> = raw.iter().map(|&(x, y)| c(x, y)).collect();
            let d = min_ratio_disk(&pts).unwrap().unwrap();
            for p in &pts {
                prop_assert!((p - d.center).norm() <= d.radius * (1.0 + 1e-12));
            }
            let o = ratio_oracle(&pts);
            prop_assert!(ratio(&d) <= o + 1e-7, "{} vs {}", ratio(&d), o);
            let small = min_enclosing_disk(&pts).unwrap();
            if small.excludes_origin() {
                prop_assert!(ratio(&d) <= ratio(&small) + 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn matches_brute_force(raw in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..14)) {
            let pts: Vec<Complex64> = raw.iter().map(|&(x, y)| c(x, y)).collect();
            let d = min_enclosing_disk(&pts).unwrap();
            let o = brute_force(&pts);
            prop_assert!((d.radius - o.radius).abs() < 1e-7 * (1.0 + o.radius));
            for p in &pts {
                prop_assert!((p - d.center).norm() <= d.radius * (1.0 + 1e-9) + 1e-9);
            }
        }
    }
}
