use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::{point_pairs, Hypersurface, LeviError};
use crate::hermpoly::HoloPoly;
use crate::linalg::singular_values;
use crate::parallel::stream_rng;

#[derive(Clone, Debug)]
pub struct TransversalityConfig {
    pub radius: f64,
    pub seed: u64,
    /// Number of random starting points pushed onto `Z(h)`.
    pub budget: usize,
    pub min_margin: f64,
}

impl Default for TransversalityConfig {
    fn default() -> Self {
        Self { radius: 0.5, seed: 0, budget: 400, min_margin: 1e-6 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransversalityWitness {
    pub point: Vec<[f64; 2]>,
    pub rho: f64,
    pub h: f64,
    /// `|∂ρ − proj_{∂h} ∂ρ| / |∂ρ|`; zero exactly when `dρ` vanishes on `T Z(h)`.
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum TransversalityOutcome {
    Witness(TransversalityWitness),
    /// Budget exhausted; this is not a proof that no witness exists.
    NotFound { attempts: usize },
}

struct HoloEval {
    h: HoloPoly,
    grad: Vec<HoloPoly>,
}

impl HoloEval {
    fn value(&self, z: &[Complex64]) -> Complex64 {
        self.h.eval(z).expect("dimension checked")
    }

    fn gradient(&self, z: &[Complex64]) -> Vec<Complex64> {
        self.grad.iter().map(|g| g.eval(z).expect("dimension checked")).collect()
    }

    /// Minimum-norm Newton iteration onto `h = 0`.
    fn project(&self, start: &[Complex64]) -> Option<Vec<Complex64>> {
        let mut z = start.to_vec();
        for _ in 0..60 {
            let v = self.value(&z);
            if v.norm() < 1e-14 {
                return Some(z);
            }
            let g = self.gradient(&z);
            let gn: f64 = g.iter().map(|c| c.norm_sqr()).sum();
            if gn < 1e-24 {
                return None;
            }
            let step = v / gn;
            for (x, gj) in z.iter_mut().zip(&g) {
                *x -= step * gj.conj();
            }
        }
        (self.value(&z).norm() < 1e-12).then_some(z)
    }
}

fn margin(m: &Hypersurface, he: &HoloEval, q: &[Complex64]) -> f64 {
    let dr = m.gradient(q);
    let dh = he.gradient(q);
    let hn: f64 = dh.iter().map(|c| c.norm_sqr()).sum();
    let rn: f64 = dr.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if hn == 0.0 || rn == 0.0 {
        return 0.0;
    }
    // Component of ∂ρ orthogonal to ∂h in the Hermitian sense.
    let coef: Complex64 = dr.iter().zip(&dh).map(|(a, b)| a * b.conj()).sum::<Complex64>() / hn;
    let orth: f64 = dr.iter().zip(&dh).map(|(a, b)| (a - coef * b).norm_sqr()).sum::<f64>().sqrt();
    orth / rn
}

/// Searches `Z(h) ∩ B(p, radius)` for a smooth point of `Z(h)` on `M` where `M` cuts `Z(h)` transversally.
pub fn kn_transversality_probe(
    m: &Hypersurface,
    h: &HoloPoly,
    p: &[Complex64],
    cfg: &TransversalityConfig,
) -> Result<TransversalityOutcome, LeviError> {
    let n = m.n_ambient();
    if h.n() != n || p.len() != n {
        return Err(LeviError::InvalidInput("h and p must match the ambient dimension".into()));
    }
    if h.is_zero() {
        return Err(LeviError::InvalidInput("h is identically zero".into()));
    }
    let he = HoloEval { h: h.clone(), grad: (0..n).map(|j| h.derive(j)).collect::<Result<_, _>>()? };
    if he.value(p).norm() > 1e-9 {
        return Err(LeviError::InvalidInput(format!("h(p) = {} is not zero", he.value(p))));
    }
    let in_ball = |z: &[Complex64]| z.iter().zip(p).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt() <= cfg.radius;
    let mut pos: Vec<Vec<Complex64>> = Vec::new();
    let mut neg: Vec<Vec<Complex64>> = Vec::new();
    for i in 0..cfg.budget {
        let mut rng = stream_rng(cfg.seed, i);
        let dir: Vec<Complex64> =
            (0..n).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
        let dn = dir.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let r = cfg.radius * rng.random::<f64>().powf(1.0 / (2 * n) as f64);
        let start: Vec<Complex64> = p.iter().zip(&dir).map(|(a, d)| a + d * (r / dn)).collect();
        let Some(q) = he.project(&start) else { continue };
        if !in_ball(&q) {
            continue;
        }
        let v = m.eval(&q);
        if v == 0.0 {
            let mg = margin(m, &he, &q);
            if mg > cfg.min_margin {
                return Ok(TransversalityOutcome::Witness(witness(m, &he, &q, mg)));
            }
            continue;
        }
        if v > 0.0 {
            pos.push(q);
        } else {
            neg.push(q);
        }
        for a in &pos {
            for b in &neg {
                if let Some(w) = bisect_on_zero_set(m, &he, a, b, cfg) {
                    return Ok(TransversalityOutcome::Witness(w));
                }
            }
        }
        // Keep the pair search bounded.
        pos.truncate(8);
        neg.truncate(8);
    }
    Ok(TransversalityOutcome::NotFound { attempts: cfg.budget })
}

fn witness(m: &Hypersurface, he: &HoloEval, q: &[Complex64], mg: f64) -> TransversalityWitness {
    TransversalityWitness { point: point_pairs(q), rho: m.eval(q), h: he.value(q).norm(), margin: mg }
}

fn bisect_on_zero_set(
    m: &Hypersurface,
    he: &HoloEval,
    a: &[Complex64],
    b: &[Complex64],
    cfg: &TransversalityConfig,
) -> Option<TransversalityWitness> {
    let lerp = |s: f64| -> Option<Vec<Complex64>> {
        let z: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x + (y - x) * s).collect();
        he.project(&z)
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut best: Option<Vec<Complex64>> = None;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let q = lerp(mid)?;
        let v = m.eval(&q);
        best = Some(q);
        if v == 0.0 {
            break;
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let q = best?;
    if m.eval(&q).abs() > 1e-9 {
        return None;
    }
    let gh: f64 = he.gradient(&q).iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if gh < 1e-8 {
        return None;
    }
    let mg = margin(m, he, &q);
    (mg > cfg.min_margin).then(|| witness(m, he, &q, mg))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenericityReport {
    pub generic: bool,
    pub estimated_dimension: usize,
    pub cloud_singular_values: Vec<f64>,
    pub span_singular_values: Vec<f64>,
    pub span_rank: usize,
}

/// Estimates `T_p S` from a local sample cloud and tests whether `T_p S + i T_p S` is all of `ℂⁿ`.
pub fn genericity_probe(points: &[Vec<Complex64>], p: &[Complex64]) -> Result<GenericityReport, LeviError> {
    let n = p.len();
    if points.len() < 2 {
        return Err(LeviError::DegenerateCloud("need at least two sample points".into()));
    }
    if points.iter().any(|q| q.len() != n) {
        return Err(LeviError::InvalidInput("sample dimension differs from p".into()));
    }
    let rows = points.len();
    let d = DMatrix::from_fn(rows, 2 * n, |i, j| {
        let delta = points[i][j / 2] - p[j / 2];
        if j % 2 == 0 {
            delta.re
        } else {
            delta.im
        }
    });
    let svd = d.clone().svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| LeviError::DegenerateCloud("SVD failed".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sv: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    if sv.first().is_none_or(|&s| s <= 0.0) {
        return Err(LeviError::DegenerateCloud("all sample points coincide with p".into()));
    }
    // Dimension from the largest ratio gap among nonnegligible singular values.
    let mut dim = sv.len();
    let mut best_gap = 0.0;
    for k in 0..sv.len() {
        let next = sv.get(k + 1).copied().unwrap_or(0.0).max(sv[0] * 1e-15);
        let gap = sv[k] / next;
        if gap > best_gap {
            best_gap = gap;
            dim = k + 1;
        }
    }
    let tangent: Vec<Vec<f64>> = order.iter().take(dim).map(|&i| v_t.row(i).iter().copied().collect()).collect();
    // Rotation by i on (re, im) pairs: (x, y) ↦ (−y, x).
    let span = DMatrix::from_fn(2 * dim, 2 * n, |r, c| {
        let t = &tangent[r % dim];
        if r < dim {
            t[c]
        } else if c % 2 == 0 {
            -t[c + 1]
        } else {
            t[c - 1]
        }
    });
    let ssv = singular_values(&span);
    let top = ssv.first().copied().unwrap_or(0.0);
    let rank = ssv.iter().filter(|&&s| s > 1e-6 * top.max(1e-300)).count();
    Ok(GenericityReport {
        generic: rank == 2 * n,
        estimated_dimension: dim,
        cloud_singular_values: sv,
        span_singular_values: ssv,
        span_rank: rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn complex_line_is_not_generic() {
        let p = vec![c(0.0, 0.0), c(0.0, 0.0)];
        let pts: Vec<Vec<Complex64>> =
            (0..20).map(|k| vec![c(0.0, 0.0), c(1e-3 * (k as f64).cos(), 1e-3 * (k as f64 * 0.7).sin())]).collect();
        let r = genericity_probe(&pts, &p).unwrap();
        assert_eq!(r.estimated_dimension, 2);
        assert!(!r.generic);
    }

    #[test]
    fn totally_real_plane_is_generic() {
        let p = vec![c(0.0, 0.0), c(0.0, 0.0)];
        let pts: Vec<Vec<Complex64>> =
            (0..20).map(|k| vec![c(1e-3 * (k as f64).cos(), 0.0), c(1e-3 * (k as f64 * 1.3).sin(), 0.0)]).collect();
        let r = genericity_probe(&pts, &p).unwrap();
        assert_eq!(r.estimated_dimension, 2);
        assert!(r.generic);
    }

    #[test]
    fn single_point_cloud_rejected() {
        assert!(genericity_probe(&[vec![c(0.0, 0.0)]], &[c(0.0, 0.0)]).is_err());
    }
}
