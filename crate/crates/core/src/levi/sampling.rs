use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::{levi_signature, Hypersurface, LeviError, LeviReport, LeviVerdict};
use crate::parallel::{map_indexed, stream_rng};

const PROJECTION_TOL: f64 = 1e-12;

/// Root of `t ↦ ρ(base + t·direction)` on the real line, bracketed outward from `t = 0`.
pub fn project_to_m(m: &Hypersurface, base: &[Complex64], direction: &[Complex64]) -> Result<Vec<Complex64>, LeviError> {
    project_with_limit(m, base, direction, 1e3)
}

pub(crate) fn project_with_limit(
    m: &Hypersurface,
    base: &[Complex64],
    direction: &[Complex64],
    t_max: f64,
) -> Result<Vec<Complex64>, LeviError> {
    if base.len() != m.n_ambient() || direction.len() != m.n_ambient() {
        return Err(LeviError::InvalidInput("base and direction must match the ambient dimension".into()));
    }
    let at = |t: f64| -> Vec<Complex64> { base.iter().zip(direction).map(|(b, d)| b + d * t).collect() };
    let f = |t: f64| m.eval(&at(t));
    let f0 = f(0.0);
    if f0 == 0.0 {
        return Ok(base.to_vec());
    }
    let mut bracket = None;
    let mut h = 1e-3;
    while h <= t_max {
        if f(h).signum() != f0.signum() {
            bracket = Some((0.0, h));
            break;
        }
        if f(-h).signum() != f0.signum() {
            bracket = Some((0.0, -h));
            break;
        }
        h *= 1.5;
    }
    let (mut a, mut b) = bracket.ok_or(LeviError::NoSignChange)?;
    let (mut fa, mut fb) = (f0, f(b));
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid == a || mid == b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            a = mid;
            fa = 0.0;
            break;
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
            fb = fm;
        }
    }
    let (t, r) = if fa.abs() <= fb.abs() { (a, fa) } else { (b, fb) };
    if r.abs() >= PROJECTION_TOL {
        return Err(LeviError::ProjectionResidual(r.abs()));
    }
    Ok(at(t))
}

#[derive(Clone, Debug, PartialEq)]
pub enum DirectionMode {
    /// Rays from `center` in uniformly random directions.
    Radial,
    /// Base points uniform in the ball, all projected along one vector.
    Fixed(Vec<Complex64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SamplerConfig {
    pub center: Vec<Complex64>,
    pub radius: f64,
    pub direction: DirectionMode,
    /// Per-coordinate bound `|z_j| ≤ max_abs[j]`; samples outside are redrawn.
    pub max_abs: Option<Vec<Option<f64>>>,
    pub retries: usize,
    pub t_max: f64,
}

impl SamplerConfig {
    pub fn radial(center: Vec<Complex64>) -> Self {
        Self { center, radius: 0.0, direction: DirectionMode::Radial, max_abs: None, retries: 100, t_max: 1e3 }
    }

    pub fn fixed(center: Vec<Complex64>, radius: f64, direction: Vec<Complex64>) -> Self {
        Self { center, radius, direction: DirectionMode::Fixed(direction), max_abs: None, retries: 100, t_max: 1e3 }
    }

    pub fn with_max_abs(mut self, bounds: Vec<Option<f64>>) -> Self {
        self.max_abs = Some(bounds);
        self
    }
}

fn random_unit<R: Rng>(rng: &mut R, n: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> =
            (0..n).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

fn random_in_ball<R: Rng>(rng: &mut R, n: usize, radius: f64) -> Vec<Complex64> {
    let dir = random_unit(rng, n);
    let r: f64 = rng.random::<f64>().powf(1.0 / (2 * n) as f64) * radius;
    dir.into_iter().map(|c| c * r).collect()
}

fn draw_one(m: &Hypersurface, cfg: &SamplerConfig, seed: u64, index: usize) -> Result<Vec<Complex64>, LeviError> {
    let n = m.n_ambient();
    let mut rng = stream_rng(seed, index);
    for _ in 0..cfg.retries.max(1) {
        let (base, dir) = match &cfg.direction {
            DirectionMode::Radial => (cfg.center.clone(), random_unit(&mut rng, n)),
            DirectionMode::Fixed(v) => {
                let off = random_in_ball(&mut rng, n, cfg.radius);
                (cfg.center.iter().zip(&off).map(|(c, o)| c + o).collect(), v.clone())
            }
        };
        let Ok(p) = project_with_limit(m, &base, &dir, cfg.t_max) else { continue };
        let inside = match &cfg.max_abs {
            Some(bounds) => p.iter().zip(bounds).all(|(z, b)| b.is_none_or(|b| z.norm() <= b)),
            None => true,
        };
        if inside {
            return Ok(p);
        }
    }
    Err(LeviError::SamplerFailure { index, attempts: cfg.retries.max(1) })
}

/// Seeded points on `M`; sample `i` depends only on `(seed, i)`.
pub fn sample_points(m: &Hypersurface, cfg: &SamplerConfig, count: usize, seed: u64) -> Result<Vec<Vec<Complex64>>, LeviError> {
    if cfg.center.len() != m.n_ambient() {
        return Err(LeviError::InvalidInput("sampler center has the wrong dimension".into()));
    }
    map_indexed(count, |i| draw_one(m, cfg, seed, i)).into_iter().collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanPoint {
    pub index: usize,
    pub report: LeviReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub surface: String,
    pub seed: u64,
    pub tol: f64,
    pub samples: Vec<ScanPoint>,
    /// Smallest oriented eigenvalue over the scan.
    pub min_eigenvalue: f64,
    /// Indices whose smallest `|λ|` is below `1e3·tol` of the local scale.
    pub near_degenerate: Vec<usize>,
    /// Indices with a `MixedSignature` verdict.
    pub mixed: Vec<usize>,
    /// Indices where the Levi form for the given `ρ` (no orientation flip) has a negative eigenvalue.
    pub pseudoconvexity_violations: Vec<usize>,
}

impl ScanReport {
    pub fn count(&self, verdict: LeviVerdict) -> usize {
        self.samples.iter().filter(|s| s.report.verdict == verdict).count()
    }

    pub fn point(&self, i: usize) -> Vec<Complex64> {
        self.samples[i].report.point.iter().map(|p| Complex64::new(p[0], p[1])).collect()
    }
}

pub fn pseudoconvexity_scan(
    m: &Hypersurface,
    cfg: &SamplerConfig,
    count: usize,
    seed: u64,
    tol: f64,
) -> Result<ScanReport, LeviError> {
    let points = sample_points(m, cfg, count, seed)?;
    let reports: Vec<LeviReport> =
        map_indexed(points.len(), |i| levi_signature(m, &points[i], tol)).into_iter().collect::<Result<_, _>>()?;
    let mut min_eigenvalue = f64::INFINITY;
    let mut near_degenerate = Vec::new();
    let mut mixed = Vec::new();
    let mut violations = Vec::new();
    for (i, r) in reports.iter().enumerate() {
        let oriented = r.oriented_eigenvalues();
        if let Some(&lo) = oriented.first() {
            min_eigenvalue = min_eigenvalue.min(lo);
        }
        let min_abs = r.eigenvalues.iter().fold(f64::INFINITY, |a, x| a.min(x.abs()));
        if min_abs < 1e3 * tol * r.scale {
            near_degenerate.push(i);
        }
        if r.verdict == LeviVerdict::MixedSignature {
            mixed.push(i);
        }
        if r.eigenvalues.iter().any(|&x| x < -tol * r.scale) {
            violations.push(i);
        }
    }
    Ok(ScanReport {
        surface: m.name().to_string(),
        seed,
        tol,
        samples: reports.into_iter().enumerate().map(|(index, report)| ScanPoint { index, report }).collect(),
        min_eigenvalue,
        near_degenerate,
        mixed,
        pseudoconvexity_violations: violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermpoly::{HoloPoly, RealBipoly};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn projects_onto_model() {
        let rho = &RealBipoly::im_of(&HoloPoly::var(2, 1)) - &RealBipoly::abs_sq(2, 0);
        let m = Hypersurface::new("model", rho).unwrap();
        let p = project_to_m(&m, &[c(1.0, 0.0), c(0.0, 0.0)], &[c(0.0, 0.0), c(0.0, 1.0)]).unwrap();
        assert!((p[1] - c(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn sphere_projection_from_origin() {
        let rho = &(&RealBipoly::abs_sq(2, 0) + &RealBipoly::abs_sq(2, 1)) - &RealBipoly::one(2);
        let m = Hypersurface::new("sphere", rho).unwrap();
        let v = [c(0.6, 0.0), c(0.0, 0.8)];
        let p = project_to_m(&m, &[c(0.0, 0.0), c(0.0, 0.0)], &v).unwrap();
        let d: f64 = p.iter().zip(&v).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        let d_neg: f64 = p.iter().zip(&v).map(|(a, b)| (a + b).norm()).fold(0.0, f64::max);
        assert!(d < 1e-12 || d_neg < 1e-12);
    }

    #[test]
    fn no_sign_change_is_an_error() {
        let rho = &RealBipoly::abs_sq(2, 0) + &RealBipoly::one(2);
        let m = Hypersurface::new("empty", rho).unwrap();
        assert_eq!(project_to_m(&m, &[c(0.0, 0.0), c(0.0, 0.0)], &[c(1.0, 0.0), c(0.0, 0.0)]), Err(LeviError::NoSignChange));
    }
}
