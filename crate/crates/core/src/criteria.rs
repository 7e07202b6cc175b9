//! Grid-sampled sufficient and necessary conditions for quasiconformal
//! extendibility. Every check reports the smallest `k` the samples allow.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{
    checked_first_derivative, hyperbolic_distance, min_enclosing_disk, min_ratio_disk, pre_schwarzian, schwarzian, Domain,
    EuclideanDisk, Grid, HoloMap, HyperbolicDisk,
};

/// Slack on hyperbolic-disk membership.
pub const MEMBERSHIP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CriterionId {
    BeckerPommerenke,
    Nehari,
    DerivativeDisk,
    ZfOverF,
    Qc2,
    Ab,
    PsiPrime,
    NecessaryBound,
}

impl CriterionId {
    pub const ALL: [CriterionId; 8] = [
        CriterionId::BeckerPommerenke,
        CriterionId::Nehari,
        CriterionId::DerivativeDisk,
        CriterionId::ZfOverF,
        CriterionId::Qc2,
        CriterionId::Ab,
        CriterionId::PsiPrime,
        CriterionId::NecessaryBound,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CriterionId::BeckerPommerenke => "becker-pommerenke",
            CriterionId::Nehari => "nehari",
            CriterionId::DerivativeDisk => "derivative-disk",
            CriterionId::ZfOverF => "zf-over-f",
            CriterionId::Qc2 => "qc2",
            CriterionId::Ab => "ab",
            CriterionId::PsiPrime => "psi-prime",
            CriterionId::NecessaryBound => "necessary-bound",
        }
    }
}

impl std::fmt::Display for CriterionId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for CriterionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CriterionId::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Argument(format!("unknown criterion '{s}'")))
    }
}

/// A sample that could not be evaluated.
#[derive(Debug, Clone, Serialize)]
pub struct SkippedSample {
    pub point: Complex64,
    pub reason: String,
}

/// Fitted disk and the quantities derived from it.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DiskFit {
    /// Enclosing disk with the least `K`; the smallest disk when every
    /// enclosing disk meets 0.
    pub disk: EuclideanDisk,
    /// Smallest enclosing disk.
    pub smallest: EuclideanDisk,
    pub big_k: f64,
    /// Points of minimal and maximal modulus.
    pub extremal: Option<(Complex64, Complex64)>,
    /// `√(w1 w2)`.
    pub omega: Option<Complex64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: CriterionId,
    /// Smallest admissible `k` over the samples; `+∞` when inadmissible.
    pub k_min: f64,
    /// Raw supremum of the sampled quantity.
    pub sup_value: f64,
    pub worst_point: Option<Complex64>,
    /// `k_min − target` for `k`-type checks, signed hyperbolic overshoot for
    /// disk memberships. Non-positive means pass.
    pub margin: f64,
    pub target: Option<f64>,
    pub samples: usize,
    pub skipped: Vec<SkippedSample>,
    pub admissible: bool,
    pub pass: bool,
    pub disk: Option<DiskFit>,
    pub note: String,
}

impl CriterionReport {
    /// Whether the samples allow a `k`-q.c. extension for this `k`.
    pub fn passes(&self, k: f64) -> bool {
        self.admissible && self.k_min <= k
    }

    fn finish_k(mut self, target: Option<f64>) -> Self {
        let t = target.unwrap_or(1.0);
        self.target = target;
        self.margin = self.k_min - t;
        self.pass = self.admissible && self.samples > 0 && self.k_min < 1.0 && self.k_min <= t;
        self
    }
}

struct Scan {
    values: Vec<(f64, Complex64)>,
    skipped: Vec<SkippedSample>,
}

impl Scan {
    fn sup(&self) -> (f64, Option<Complex64>) {
        self.values
            .iter()
            .fold((0.0, None), |a, &(v, z)| if a.1.is_none() || v > a.0 { (v, Some(z)) } else { a })
    }
}

fn skippable(e: &Error) -> bool {
    matches!(
        e,
        Error::SingularDerivative { .. } | Error::Evaluation { .. } | Error::Pole { .. } | Error::Degenerate { .. }
    )
}

/// Evaluates `q` on every grid point in parallel; singular samples are
/// recorded and skipped, other errors abort.
fn scan<F>(points: &[Complex64], q: F) -> Result<Scan>
where
    F: Fn(Complex64) -> Result<f64> + Sync,
{
    let out: Vec<std::result::Result<(f64, Complex64), SkippedSample>> = points
        .par_iter()
        .map(|&z| match q(z) {
            Ok(v) if v.is_finite() => Ok(Ok((v, z))),
            Ok(v) => Ok(Err(SkippedSample {
                point: z,
                reason: format!("non-finite value {v}"),
            })),
            Err(e) if skippable(&e) => Ok(Err(SkippedSample {
                point: z,
                reason: e.to_string(),
            })),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    let mut values = Vec::with_capacity(out.len());
    let mut skipped = Vec::new();
    for o in out {
        match o {
            Ok(v) => values.push(v),
            Err(s) => skipped.push(s),
        }
    }
    Ok(Scan { values, skipped })
}

fn check_domain(h: &HoloMap, expected: Domain) -> Result<()> {
    if h.domain() != expected {
        return Err(Error::DomainMismatch {
            expected: expected.to_string(),
            found: h.domain().to_string(),
        });
    }
    Ok(())
}

fn k_report(id: CriterionId, s: Scan, note: &str) -> CriterionReport {
    let (sup, at) = s.sup();
    CriterionReport {
        id,
        k_min: sup,
        sup_value: sup,
        worst_point: at,
        margin: 0.0,
        target: None,
        samples: s.values.len(),
        skipped: s.skipped,
        admissible: true,
        pass: false,
        disk: None,
        note: note.into(),
    }
}

/// `k_min = sup 2·Re z·|h″/h′|`.
pub fn becker_pommerenke_k(h: &HoloMap, grid: &Grid) -> Result<CriterionReport> {
    check_domain(h, Domain::RightHalfPlane)?;
    let s = scan(&grid.points(), |z| Ok(2.0 * z.re * pre_schwarzian(h, z)?.norm()))?;
    Ok(k_report(CriterionId::BeckerPommerenke, s, "sup 2 Re z |h''/h'| over grid samples").finish_k(None))
}

/// `k_min = sup 2(Re z)²·|Sh|`.
pub fn nehari_qc_k(h: &HoloMap, grid: &Grid) -> Result<CriterionReport> {
    check_domain(h, Domain::RightHalfPlane)?;
    let s = scan(&grid.points(), |z| Ok(2.0 * z.re * z.re * schwarzian(h, z)?.norm()))?;
    Ok(k_report(CriterionId::Nehari, s, "sup 2 (Re z)^2 |Sh| over grid samples").finish_k(None))
}

fn disk_report(id: CriterionId, samples: &[(Complex64, Complex64)], skipped: Vec<SkippedSample>, note: &str) -> Result<CriterionReport> {
    let images: Vec<Complex64> = samples.iter().map(|s| s.1).collect();
    let smallest = min_enclosing_disk(&images)?;
    let optimal = min_ratio_disk(&images)?;
    let admissible = optimal.is_some();
    let disk = optimal.unwrap_or(smallest);
    let big_k = if admissible { disk.modulus_ratio_root() } else { f64::INFINITY };
    let (far, at) = samples
        .iter()
        .map(|&(z, w)| ((w - disk.center).norm(), z))
        .fold((f64::NEG_INFINITY, None), |a, (d, z)| if d > a.0 { (d, Some(z)) } else { a });
    let k_min = if admissible { (big_k - 1.0) / (big_k + 1.0) } else { f64::INFINITY };
    Ok(CriterionReport {
        id,
        k_min,
        sup_value: far,
        worst_point: at,
        margin: 0.0,
        target: None,
        samples: samples.len(),
        skipped,
        admissible,
        pass: false,
        disk: Some(DiskFit {
            disk,
            smallest,
            big_k,
            extremal: disk.extremal_modulus_points(),
            omega: disk.geometric_center(),
        }),
        note: note.into(),
    })
}

/// Fits the enclosing disk `B` of sampled `h′` with the least
/// `K = max_{w,z∈B} √|w/z|`; `k = (K−1)/(K+1)`.
pub fn derivative_disk_k(h: &HoloMap, grid: &Grid) -> Result<CriterionReport> {
    check_domain(h, Domain::RightHalfPlane)?;
    let pts = grid.points();
    let vals: Vec<Result<Complex64>> = pts.par_iter().map(|&z| h.derivative(z, 1)).collect();
    let mut samples = Vec::with_capacity(pts.len());
    let mut skipped = Vec::new();
    for (&z, v) in pts.iter().zip(vals) {
        match v {
            Ok(w) if w.is_finite() => samples.push((z, w)),
            Ok(w) => skipped.push(SkippedSample {
                point: z,
                reason: format!("non-finite h' = {w}"),
            }),
            Err(e) if skippable(&e) => skipped.push(SkippedSample {
                point: z,
                reason: e.to_string(),
            }),
            Err(e) => return Err(e),
        }
    }
    if samples.is_empty() {
        return Err(Error::Argument("no evaluable samples".into()));
    }
    Ok(disk_report(CriterionId::DerivativeDisk, &samples, skipped, "least-K disk around sampled h'")?.finish_k(None))
}

/// Zeros of `f` inside `|z| < r` by the argument principle.
fn zero_count(f: &HoloMap, r: f64) -> Result<i64> {
    const N: usize = 2048;
    let vals = (0..=N)
        .map(|j| f.eval(Complex64::from_polar(r, 2.0 * std::f64::consts::PI * j as f64 / N as f64)))
        .collect::<Result<Vec<_>>>()?;
    if vals.iter().any(|v| v.norm() == 0.0) {
        return Err(Error::Hypothesis(format!("f vanishes on |z| = {r}")));
    }
    let turn: f64 = vals.windows(2).map(|w| (w[1] / w[0]).arg()).sum();
    Ok((turn / (2.0 * std::f64::consts::PI)).round() as i64)
}

/// Fits a disk to `z f′(z)/f(z)` on a punctured-disk grid and compares the
/// achieved `K` with `k_target_big`.
pub fn zf_over_f_check(f: &HoloMap, k_target_big: f64, grid: &Grid) -> Result<CriterionReport> {
    check_domain(f, Domain::UnitDisk)?;
    let origin = Complex64::new(0.0, 0.0);
    let f0 = f.eval(origin)?;
    let d0 = f.derivative(origin, 1)?;
    if f0.norm() > 1e-12 * (1.0 + d0.norm()) {
        return Err(Error::Hypothesis(format!("f(0) = {f0} is not 0")));
    }
    if d0.norm() <= 1e-12 {
        return Err(Error::Hypothesis("f'(0) vanishes".into()));
    }
    let pts: Vec<Complex64> = grid.points().into_iter().filter(|z| z.norm() > 0.0).collect();
    let r_max = pts.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let zeros = zero_count(f, r_max)?;
    if zeros != 1 {
        return Err(Error::Hypothesis(format!("f has {zeros} zeros in |z| < {r_max}, expected only z = 0")));
    }
    let samples = pts
        .par_iter()
        .map(|&z| {
            let v = f.eval(z)?;
            if v.norm() <= 1e-14 * z.norm() {
                return Err(Error::Hypothesis(format!("f vanishes at {z} != 0")));
            }
            Ok((z, z * f.derivative(z, 1)? / v))
        })
        .collect::<Result<Vec<_>>>()?;
    if samples.is_empty() {
        return Err(Error::Argument("no samples in the punctured disk".into()));
    }
    let mut r = disk_report(CriterionId::ZfOverF, &samples, Vec::new(), "least-K disk around sampled z f'/f")?;
    let big_k = r.disk.map(|d| d.big_k).unwrap_or(f64::INFINITY);
    r.target = Some(k_target_big);
    r.margin = big_k - k_target_big;
    r.pass = r.admissible && big_k <= k_target_big * (1.0 + 1e-12);
    Ok(r)
}

fn membership_report(
    id: CriterionId,
    d: &HyperbolicDisk,
    samples: Vec<(Complex64, Result<Complex64>)>,
    note: &str,
) -> Result<CriterionReport> {
    let mut skipped = Vec::new();
    let mut sup: f64 = 0.0;
    let mut worst = None;
    let mut outside_h = None;
    let mut count = 0;
    for (z, w) in samples {
        let w = match w {
            Ok(w) if w.is_finite() => w,
            Ok(w) => {
                skipped.push(SkippedSample {
                    point: z,
                    reason: format!("non-finite value {w}"),
                });
                continue;
            }
            Err(e) if skippable(&e) => {
                skipped.push(SkippedSample {
                    point: z,
                    reason: e.to_string(),
                });
                continue;
            }
            Err(e) => return Err(e),
        };
        count += 1;
        if !(w.re > 0.0) {
            outside_h.get_or_insert(z);
            continue;
        }
        let dist = hyperbolic_distance(w, d.center)?;
        if worst.is_none() || dist > sup {
            sup = dist;
            worst = Some(z);
        }
    }
    let admissible = outside_h.is_none();
    let margin = if admissible { sup - d.radius } else { f64::INFINITY };
    Ok(CriterionReport {
        id,
        k_min: if admissible { sup.tanh() } else { f64::INFINITY },
        sup_value: if admissible { sup } else { f64::INFINITY },
        worst_point: outside_h.or(worst),
        margin,
        target: Some(d.equivalent_k()),
        samples: count,
        skipped,
        admissible,
        pass: admissible && count > 0 && margin <= MEMBERSHIP_TOL,
        disk: None,
        note: note.into(),
    })
}

/// `(h(z)+a)/h′(z) − z ∈ D` on every sample. `k_min` is `tanh` of the
/// largest hyperbolic distance from the center of `D`.
pub fn qc2_check(h: &HoloMap, a: Complex64, d: &HyperbolicDisk, grid: &Grid) -> Result<CriterionReport> {
    check_domain(h, Domain::RightHalfPlane)?;
    let samples = grid
        .points()
        .par_iter()
        .map(|&z| (z, checked_first_derivative(h, z).and_then(|d1| Ok((h.eval(z)? + a) / d1 - z))))
        .collect();
    membership_report(CriterionId::Qc2, d, samples, "(h + a)/h' - z in a hyperbolic disk")
}

/// Joint check of `f/f′ − z ∈ D` and `1/(h′f) − z ∈ D`.
pub fn ab_check(h: &HoloMap, f: &HoloMap, d: &HyperbolicDisk, grid: &Grid) -> Result<CriterionReport> {
    check_domain(h, Domain::RightHalfPlane)?;
    check_domain(f, Domain::RightHalfPlane)?;
    let pts = grid.points();
    let zeros = pts
        .par_iter()
        .map(|&z| -> Result<Option<String>> {
            let fv = f.eval(z)?;
            let scale = f.local_scale(z)?.max(1.0);
            if fv.norm() <= 1e-14 * scale {
                return Ok(Some(format!("f vanishes at {z}")));
            }
            for (name, m) in [("f'", f), ("h'", h)] {
                if let Err(Error::SingularDerivative { .. }) = checked_first_derivative(m, z) {
                    return Ok(Some(format!("{name} vanishes at {z}")));
                }
            }
            Ok(None)
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(msg) = zeros.into_iter().flatten().next() {
        return Err(Error::Hypothesis(msg));
    }
    let samples: Vec<(Complex64, Result<Complex64>)> = pts
        .par_iter()
        .flat_map_iter(|&z| {
            let a = f.eval(z).and_then(|fv| Ok(fv / f.derivative(z, 1)? - z));
            let b = f.eval(z).and_then(|fv| Ok(1.0 / (h.derivative(z, 1)? * fv) - z));
            [(z, a), (z, b)]
        })
        .collect();
    let mut r = membership_report(CriterionId::Ab, d, samples, "f/f' - z and 1/(h' f) - z in a hyperbolic disk")?;
    r.samples /= 2;
    Ok(r)
}

/// `k_min = sup |(1 − ψ′(ζ))/(1 + ζψ′(ζ))|` over a disk grid.
pub fn psi_prime_k(psi: &HoloMap, grid: &Grid) -> Result<CriterionReport> {
    check_domain(psi, Domain::UnitDisk)?;
    let s = scan(&grid.points(), |z| {
        let d = psi.derivative(z, 1)?;
        let den = 1.0 + z * d;
        if den.norm() <= 1e-14 * (1.0 + d.norm()) {
            return Err(Error::Degenerate { point: z });
        }
        Ok(((1.0 - d) / den).norm())
    })?;
    Ok(k_report(CriterionId::PsiPrime, s, "sup |(1 - psi')/(1 + z psi')| over grid samples").finish_k(None))
}

/// Lower bound `sup Re z·|h″/h′|/3` on every admissible `k`; a value above
/// 1 rules out univalence.
pub fn necessary_bound_check(h: &HoloMap, k: Option<f64>, grid: &Grid) -> Result<CriterionReport> {
    check_domain(h, Domain::RightHalfPlane)?;
    let s = scan(&grid.points(), |z| Ok(z.re * pre_schwarzian(h, z)?.norm() / 3.0))?;
    let mut r = k_report(CriterionId::NecessaryBound, s, "sup Re z |h''/h'| / 3 over grid samples");
    r.target = k;
    r.margin = r.k_min - k.unwrap_or(1.0);
    r.pass = r.samples > 0 && r.margin <= 0.0;
    if r.k_min > 1.0 {
        r.note.push_str("; exceeds 1, so h is not univalent");
    }
    Ok(r)
}

impl CriterionReport {
    /// `true` when the sampled bound exceeds 1 for the necessary check.
    pub fn contradicts_univalence(&self) -> bool {
        self.id == CriterionId::NecessaryBound && self.k_min > 1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn hmap(src: &str) -> HoloMap {
        HoloMap::from_expr(Domain::RightHalfPlane, &parse(src).unwrap()).unwrap()
    }

    fn dmap(src: &str) -> HoloMap {
        HoloMap::from_expr(Domain::UnitDisk, &parse(src).unwrap()).unwrap()
    }

    fn small_grid() -> Grid {
        Grid::new([1e-3, 1e3], [-50.0, 50.0], 24, 25, crate::numeric::Layout::LogX).unwrap()
    }

    fn point_grid(z: Complex64) -> Grid {
        Grid::cartesian([z.re, z.re], [z.im, z.im], 1, 1).unwrap()
    }

    #[test]
    fn becker_pommerenke() {
        let r = becker_pommerenke_k(&hmap("3*z - 2"), &small_grid()).unwrap();
        assert!(r.k_min < 1e-12 && r.pass);
        let g = Grid::new([1e-2, 1e6], [0.0, 0.0], 200, 1, crate::numeric::Layout::LogX).unwrap();
        let r = becker_pommerenke_k(&hmap("(z+1)^0.8"), &g).unwrap();
        assert!((r.k_min - 0.4).abs() < 1e-4 && r.k_min <= 0.4 + 1e-12, "{}", r.k_min);
        // |h''/h'| = a³/(4+a²) at z = 1/a, so 2 Re z |h''/h'| = 2a²/(4+a²)
        for a in [2.0f64, 5.0] {
            let h = hmap(&format!("z - {a}/(1+{a}*z)"));
            let r = becker_pommerenke_k(&h, &point_grid(c(1.0 / a, 0.0))).unwrap();
            assert!((r.k_min - 2.0 * a * a / (4.0 + a * a)).abs() < 1e-8, "{}", r.k_min);
            assert!(!r.pass && !r.passes(0.99));
        }
    }

    #[test]
    fn nehari() {
        let r = nehari_qc_k(&hmap("(2*z+1)/(z+3)"), &small_grid()).unwrap();
        assert!(r.k_min < 1e-8, "{}", r.k_min);
        let r = nehari_qc_k(&hmap("log(z)"), &small_grid()).unwrap();
        assert!((r.k_min - 1.0).abs() < 1e-8 && !r.pass);
        let r = nehari_qc_k(&hmap("z - 5/(1+5*z)"), &point_grid(c(1.0, 0.0))).unwrap();
        assert!(r.k_min > 1.0);
    }

    #[test]
    fn derivative_disk() {
        let r = derivative_disk_k(&hmap("(2+i)*z + 4"), &small_grid()).unwrap();
        let fit = r.disk.unwrap();
        assert!((fit.disk.center - c(2.0, 1.0)).norm() < 1e-12 && fit.disk.radius < 1e-12);
        assert!(r.k_min < 1e-12);
        let k: f64 = 0.4;
        let cc = 2.0 * k / (1.0 + k * k);
        let r = derivative_disk_k(&hmap(&format!("z + {cc}*exp(-z)")), &Grid::half_plane_default()).unwrap();
        assert!((r.k_min - k).abs() < 1e-3 && r.k_min <= k, "{}", r.k_min);
        // h′(H) = 1 + a²·{w² : |w − ½| < ½} has leftmost point 1 − a²/8
        // admissible for a < 2√2 even though the smallest disk meets 0
        let r = derivative_disk_k(&hmap("z - 2/(1+2*z)"), &Grid::half_plane_default()).unwrap();
        assert!(r.admissible && r.k_min < 1.0, "{r:?}");
        assert!(!r.disk.unwrap().smallest.excludes_origin());
        let r = derivative_disk_k(&hmap("z - 2.5/(1+2.5*z)"), &Grid::half_plane_default()).unwrap();
        assert!(r.admissible && r.k_min < 1.0);
        let bp = becker_pommerenke_k(&hmap("z - 2.5/(1+2.5*z)"), &point_grid(c(0.4, 0.0))).unwrap();
        assert!(!bp.pass && bp.k_min > 1.2);
        let r = derivative_disk_k(&hmap("z - 5/(1+5*z)"), &Grid::half_plane_default()).unwrap();
        assert!(!r.admissible && r.k_min.is_infinite());
    }

    #[test]
    fn derivative_disk_invariance() {
        let g = small_grid();
        let base = derivative_disk_k(&hmap("z + 0.3*exp(-z)"), &g).unwrap();
        let shifted = derivative_disk_k(&hmap("z + 0.3*exp(-z) + 7 - 2*i"), &g).unwrap();
        assert_eq!(base.disk.unwrap().disk, shifted.disk.unwrap().disk);
        let lambda = c(1.5, -2.0);
        let scaled = derivative_disk_k(&hmap("(1.5-2*i)*(z + 0.3*exp(-z))"), &g).unwrap();
        let (b, s) = (base.disk.unwrap(), scaled.disk.unwrap());
        assert!((s.disk.center - lambda * b.disk.center).norm() < 1e-10);
        assert!((s.omega.unwrap() - lambda * b.omega.unwrap()).norm() < 1e-10);
        assert!((s.big_k - b.big_k).abs() < 1e-10);
    }

    #[test]
    fn zf_over_f() {
        let g = Grid::disk_default();
        let r = zf_over_f_check(&dmap("z"), 1.0, &g).unwrap();
        assert!(r.pass && (r.disk.unwrap().big_k - 1.0).abs() < 1e-12);
        let cc: f64 = 0.5;
        let r = zf_over_f_check(&dmap("z*exp(0.5*z)"), 10.0, &g).unwrap();
        let fit = r.disk.unwrap();
        assert!((fit.disk.center - 1.0).norm() < 1e-3 && (fit.disk.radius - cc).abs() < 1e-3);
        assert!((fit.big_k - ((1.0 + cc) / (1.0 - cc)).sqrt()).abs() < 1e-2);
        let r = zf_over_f_check(&dmap("z*exp(z)"), 10.0, &g).unwrap();
        assert!(!r.pass && r.disk.unwrap().big_k > 40.0);
        assert!(matches!(zf_over_f_check(&dmap("z+0.5"), 10.0, &g), Err(Error::Hypothesis(_))));
        assert!(matches!(zf_over_f_check(&dmap("z*(z-0.5)"), 10.0, &g), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn qc2() {
        let g = small_grid();
        let d = HyperbolicDisk::new(c(1.0, 0.0), 0.5).unwrap();
        let r = qc2_check(&hmap("exp(z)"), c(0.0, 0.0), &d, &g).unwrap();
        assert!(!r.admissible && !r.pass);
        let big_k = 2f64.sqrt();
        let d = HyperbolicDisk::with_dilatation(c(2f64.sqrt(), 0.0), big_k).unwrap();
        let r = qc2_check(&hmap("sqrt((z+1)^2 + 1)"), c(0.0, 0.0), &d, &g).unwrap();
        assert!(r.pass, "margin {}", r.margin);
        assert!((r.target.unwrap() - (big_k - 1.0) / (big_k + 1.0)).abs() < 1e-12);
        let tight = HyperbolicDisk::with_dilatation(c(2f64.sqrt(), 0.0), 1.3).unwrap();
        assert!(!qc2_check(&hmap("sqrt((z+1)^2 + 1)"), c(0.0, 0.0), &tight, &g).unwrap().pass);
    }

    #[test]
    fn ab_and_psi_prime_agree() {
        let g = small_grid();
        let d = HyperbolicDisk::new(c(1.0, 0.0), 0.5).unwrap();
        let r = ab_check(&hmap("log(z+1)"), &hmap("z+1"), &d, &g).unwrap();
        assert!(!r.admissible);
        // h = −ψ((1−z)/(1+z))/2 with ψ(ζ) = ζ + 0.1ζ²; (B) reduces to |1−ψ′|/|1+ζψ′|
        let h = hmap("-((1-z)/(1+z) + 0.1*((1-z)/(1+z))^2)/2");
        let ab = ab_check(&h, &hmap("z+1"), &HyperbolicDisk::new(c(1.0, 0.0), 0.5).unwrap(), &g).unwrap();
        let direct = g
            .points()
            .iter()
            .map(|&z| {
                let zeta = (1.0 - z) / (1.0 + z);
                let d = 1.0 + 0.2 * zeta;
                ((1.0 - d) / (1.0 + zeta * d)).norm()
            })
            .fold(0.0, f64::max);
        assert!((ab.k_min - direct).abs() < 1e-9, "{} vs {direct}", ab.k_min);
        // ψ′ = (1−k)/(1+kζ) makes the ratio identically k
        let k: f64 = 0.3;
        let psi = dmap(&format!("{}*log(1+{k}*z)", (1.0 - k) / k));
        let pk = psi_prime_k(&psi, &Grid::disk_default()).unwrap();
        assert!((pk.k_min - k).abs() < 1e-12 && pk.pass);
        let h = hmap(&format!("-{}*log(1+{k}*(1-z)/(1+z))/2", (1.0 - k) / k));
        let uk = HyperbolicDisk::new(c(1.0, 0.0), k.atanh()).unwrap();
        let ab = ab_check(&h, &hmap("z+1"), &uk, &g).unwrap();
        assert!((ab.k_min - k).abs() < 1e-9 && ab.pass, "{ab:?}");
    }

    #[test]
    fn ab_degenerate_disk() {
        let g = small_grid();
        let d = HyperbolicDisk::new(c(1.0, 0.0), 0.0).unwrap();
        let r = ab_check(&hmap("-1/(3*(z+1))"), &hmap("3*(z+1)"), &d, &g).unwrap();
        assert!(r.pass, "{r:?}");
        let a_only: f64 = g
            .points()
            .iter()
            .map(|&z| hyperbolic_distance(z + 1.0 - z, c(1.0, 0.0)).unwrap())
            .fold(0.0, f64::max);
        assert!(a_only < 1e-12);
        let r = ab_check(&hmap("z"), &hmap("(z+1)^2"), &d, &g).unwrap();
        assert!(!r.pass);
    }

    #[test]
    fn psi_prime() {
        let g = Grid::disk_default();
        let r = psi_prime_k(&dmap("z"), &g).unwrap();
        assert!(r.k_min < 1e-12);
        let r = psi_prime_k(&dmap("0.5*z"), &g).unwrap();
        assert!(r.k_min > 0.99 && r.k_min < 1.0);
        let cc = 0.3;
        let r = psi_prime_k(&dmap(&format!("z + {cc}*z^2/2")), &g).unwrap();
        let brute = g
            .points()
            .iter()
            .map(|&z| {
                let d = 1.0 + cc * z;
                ((1.0 - d) / (1.0 + z * d)).norm()
            })
            .fold(0.0, f64::max);
        assert!((r.k_min - brute).abs() < 1e-10);
    }

    #[test]
    fn necessary_bound() {
        let r = necessary_bound_check(&hmap("(2*z+1)/3"), None, &small_grid()).unwrap();
        assert!(r.k_min < 1e-12 && r.pass);
        let r = necessary_bound_check(&hmap("1/z^1.3"), Some(0.3), &point_grid(c(1.0, 0.0))).unwrap();
        assert!((3.0 * r.k_min - 2.3).abs() < 1e-8);
        assert!(!r.contradicts_univalence() && !r.pass);
        let g = Grid::cartesian([1.9, 2.1], [-0.05, 0.05], 5, 5).unwrap();
        let r = necessary_bound_check(&hmap("(z-2)^2"), None, &g).unwrap();
        assert!(r.contradicts_univalence());
    }

    #[test]
    fn refinement_is_monotone() {
        let g = Grid::new([1e-2, 1e2], [-10.0, 10.0], 9, 9, crate::numeric::Layout::LogX).unwrap();
        let fine = g.refine();
        for src in ["(z+1)^0.8", "z - 3/(1+3*z)", "sqrt((z+1)^2+1)"] {
            let h = hmap(src);
            let a = becker_pommerenke_k(&h, &g).unwrap().k_min;
            let b = becker_pommerenke_k(&h, &fine).unwrap().k_min;
            assert!(b >= a, "{src}: {b} < {a}");
            let a = nehari_qc_k(&h, &g).unwrap().k_min;
            let b = nehari_qc_k(&h, &fine).unwrap().k_min;
            assert!(b >= a, "{src}: {b} < {a}");
            let a = derivative_disk_k(&h, &g).unwrap().k_min;
            let b = derivative_disk_k(&h, &fine).unwrap().k_min;
            assert!(b >= a - 1e-12, "{src}: {b} < {a}");
        }
    }

    #[test]
    fn singular_samples_are_flagged() {
        let r = becker_pommerenke_k(&hmap("(z-1)^2"), &point_grid(c(1.0, 0.0))).unwrap();
        assert_eq!(r.samples, 0);
        assert_eq!(r.skipped.len(), 1);
        assert!(!r.pass);
    }

    #[test]
    fn ids_round_trip() {
        for id in CriterionId::ALL {
            assert_eq!(id.as_str().parse::<CriterionId>().unwrap(), id);
        }
    }
}
