use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::tensor::Quartic22Tensor;
use crate::parallel::{map_indexed, stream_rng};

/// Float copy of a tensor for evaluating `q(X) = s(X, X̄, X, X̄)`.
#[derive(Clone, Debug)]
pub struct FloatTensor {
    pub n: usize,
    pub ell: usize,
    s: Vec<Complex64>,
}

impl FloatTensor {
    pub fn new(n: usize, ell: usize, s: Vec<Complex64>) -> Self {
        assert_eq!(s.len(), n.pow(4), "tensor needs n^4 entries");
        Self { n, ell, s }
    }

    fn at(&self, a: usize, b: usize, c: usize, d: usize) -> Complex64 {
        self.s[((a * self.n + b) * self.n + c) * self.n + d]
    }

    pub fn value(&self, x: &[Complex64]) -> f64 {
        let n = self.n;
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..n {
            for c in 0..n {
                let xac = x[a] * x[c];
                for b in 0..n {
                    for d in 0..n {
                        acc += self.at(a, b, c, d) * xac * (x[b] * x[d]).conj();
                    }
                }
            }
        }
        acc.re
    }

    /// `G = 2 ∂q/∂X̄`, so that `dq = Re Σ conj(G_j) dX_j`.
    pub fn gradient(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut g = vec![Complex64::new(0.0, 0.0); n];
        for a in 0..n {
            for c in 0..n {
                let xac = x[a] * x[c];
                for b in 0..n {
                    for d in 0..n {
                        let s = self.at(a, b, c, d) * xac;
                        g[b] += s * x[d].conj();
                        g[d] += s * x[b].conj();
                    }
                }
            }
        }
        g.into_iter().map(|v| v * 2.0).collect()
    }
}

/// `| −Σ_{j<ℓ}|X_j|² + Σ_{j≥ℓ}|X_j|² |`
pub fn cone_residual(ell: usize, x: &[Complex64]) -> f64 {
    x.iter().enumerate().map(|(j, c)| if j < ell { -c.norm_sqr() } else { c.norm_sqr() }).sum::<f64>().abs()
}

fn normalize(v: &mut [Complex64]) {
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for c in v.iter_mut() {
            *c /= norm;
        }
    }
}

/// Rescales both blocks to unit length.
pub fn retract(ell: usize, x: &mut [Complex64]) {
    let (u, v) = x.split_at_mut(ell);
    normalize(u);
    normalize(v);
}

/// Projection onto the tangent space of the product of unit spheres at `x`.
pub fn project_tangent(ell: usize, x: &[Complex64], g: &[Complex64]) -> Vec<Complex64> {
    let mut out = g.to_vec();
    for range in [0..ell, ell..x.len()] {
        let inner: f64 = range.clone().map(|j| (g[j].conj() * x[j]).re).sum();
        for j in range {
            out[j] -= x[j] * inner;
        }
    }
    out
}

fn unit_gaussian<R: Rng>(rng: &mut R, k: usize) -> Vec<Complex64> {
    loop {
        let mut v: Vec<Complex64> =
            (0..k).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
        if v.iter().map(|c| c.norm_sqr()).sum::<f64>() > 1e-20 {
            normalize(&mut v);
            return v;
        }
    }
}

/// Uniform samples `X = (u, v)` with `u` on the unit sphere of `ℂ^ℓ` and `v` on that of `ℂ^{n−ℓ}`.
pub fn cone_sample(ell: usize, n: usize, count: usize, seed: u64) -> Vec<Vec<Complex64>> {
    if ell == 0 || ell >= n {
        return Vec::new();
    }
    map_indexed(count, |i| {
        let mut rng = stream_rng(seed, i);
        let mut x = unit_gaussian(&mut rng, ell);
        x.extend(unit_gaussian(&mut rng, n - ell));
        x
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Definiteness {
    PseudoPositiveSemiDef,
    PseudoNegativeSemiDef,
    PseudoPositiveDef,
    PseudoNegativeDef,
    Indefinite,
    /// Both semi-definite classes at once.
    ZeroOnCone,
    /// Empty cone (`ℓ = 0`).
    Vacuous,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConeWitness {
    pub x: Vec<[f64; 2]>,
    pub value: f64,
    pub cone_residual: f64,
}

impl ConeWitness {
    pub fn vector(&self) -> Vec<Complex64> {
        self.x.iter().map(|p| Complex64::new(p[0], p[1])).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DefinitenessVerdict {
    pub classification: Definiteness,
    pub positive_witness: Option<ConeWitness>,
    pub negative_witness: Option<ConeWitness>,
    pub samples_used: usize,
    pub refined: bool,
    pub max_value: f64,
    pub min_value: f64,
    /// Values with `|q| ≤ threshold` count as zero.
    pub threshold: f64,
    pub seed: u64,
    pub note: String,
}

impl DefinitenessVerdict {
    pub fn is_pseudo_negative_semidefinite(&self) -> bool {
        matches!(
            self.classification,
            Definiteness::PseudoNegativeSemiDef | Definiteness::PseudoNegativeDef | Definiteness::ZeroOnCone
        )
    }

    pub fn is_pseudo_positive_semidefinite(&self) -> bool {
        matches!(
            self.classification,
            Definiteness::PseudoPositiveSemiDef | Definiteness::PseudoPositiveDef | Definiteness::ZeroOnCone
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConeConfig {
    pub samples: usize,
    pub refine: bool,
    pub seed: u64,
    /// Starting points taken from each end of the sorted samples.
    pub refine_starts: usize,
    pub refine_iters: usize,
    pub rel_tol: f64,
}

impl Default for ConeConfig {
    fn default() -> Self {
        Self { samples: 20_000, refine: true, seed: 0, refine_starts: 8, refine_iters: 200, rel_tol: 1e-10 }
    }
}

/// Projected gradient ascent (`sign = 1`) or descent (`sign = −1`) of `q` with Armijo backtracking.
fn refine(t: &FloatTensor, start: &[Complex64], sign: f64, iters: usize) -> (Vec<Complex64>, f64) {
    let ell = t.ell;
    let mut x = start.to_vec();
    let mut fx = sign * t.value(&x);
    for _ in 0..iters {
        let g: Vec<Complex64> = t.gradient(&x).into_iter().map(|c| c * sign).collect();
        let dir = project_tangent(ell, &x, &g);
        let dn2: f64 = dir.iter().map(|c| c.norm_sqr()).sum();
        if dn2 < 1e-28 {
            break;
        }
        let mut step = 1.0 / dn2.sqrt();
        let mut moved = false;
        for _ in 0..40 {
            let mut y: Vec<Complex64> = x.iter().zip(&dir).map(|(a, d)| a + d * step).collect();
            retract(ell, &mut y);
            let fy = sign * t.value(&y);
            if fy >= fx + 1e-4 * step * dn2 {
                x = y;
                fx = fy;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
    }
    (x, sign * fx)
}

/// Coordinate pairs `e_i + e_j` with `i < ℓ ≤ j`.
fn structured_points(ell: usize, n: usize) -> Vec<Vec<Complex64>> {
    let mut out = Vec::new();
    for i in 0..ell {
        for j in ell..n {
            let mut x = vec![Complex64::new(0.0, 0.0); n];
            x[i] = Complex64::new(1.0, 0.0);
            x[j] = Complex64::new(1.0, 0.0);
            out.push(x);
        }
    }
    out
}

fn witness(ell: usize, x: &[Complex64], value: f64) -> ConeWitness {
    ConeWitness { x: x.iter().map(|c| [c.re, c.im]).collect(), value, cone_residual: cone_residual(ell, x) }
}

/// Sign pattern of `q` on the null cone from samples plus optional local refinement.
pub fn cone_definiteness(t: &Quartic22Tensor, cfg: &ConeConfig) -> DefinitenessVerdict {
    let ft = t.to_float();
    let (n, ell) = (ft.n, ft.ell);
    if ell == 0 || ell >= n {
        return DefinitenessVerdict {
            classification: Definiteness::Vacuous,
            positive_witness: None,
            negative_witness: None,
            samples_used: 0,
            refined: false,
            max_value: 0.0,
            min_value: 0.0,
            threshold: 0.0,
            seed: cfg.seed,
            note: "the null cone is {0}; no sign condition applies".into(),
        };
    }
    let mut points = structured_points(ell, n);
    points.extend(cone_sample(ell, n, cfg.samples, cfg.seed));
    let values: Vec<f64> = map_indexed(points.len(), |i| ft.value(&points[i]));
    let mut evaluated: Vec<(Vec<Complex64>, f64)> = points.into_iter().zip(values).collect();
    let samples_used = evaluated.len();
    if cfg.refine && cfg.refine_starts > 0 {
        let mut order: Vec<usize> = (0..evaluated.len()).collect();
        order.sort_by(|&a, &b| evaluated[a].1.total_cmp(&evaluated[b].1));
        let k = cfg.refine_starts.min(order.len());
        let starts: Vec<(usize, f64)> = order[..k]
            .iter()
            .map(|&i| (i, -1.0))
            .chain(order[order.len() - k..].iter().map(|&i| (i, 1.0)))
            .collect();
        let refined: Vec<(Vec<Complex64>, f64)> =
            map_indexed(starts.len(), |j| refine(&ft, &evaluated[starts[j].0].0, starts[j].1, cfg.refine_iters));
        evaluated.extend(refined);
    }
    let (mut imax, mut imin) = (0, 0);
    for (i, (_, v)) in evaluated.iter().enumerate() {
        if *v > evaluated[imax].1 {
            imax = i;
        }
        if *v < evaluated[imin].1 {
            imin = i;
        }
    }
    let (max_value, min_value) = (evaluated[imax].1, evaluated[imin].1);
    let scale = max_value.abs().max(min_value.abs());
    let threshold = cfg.rel_tol * scale;
    let has_pos = max_value > threshold;
    let has_neg = min_value < -threshold;
    let positive_witness = has_pos.then(|| witness(ell, &evaluated[imax].0, max_value));
    let negative_witness = has_neg.then(|| witness(ell, &evaluated[imin].0, min_value));
    let (classification, note) = match (has_pos, has_neg) {
        (true, true) => (Definiteness::Indefinite, "certified by the two witnesses"),
        (false, false) => (Definiteness::ZeroOnCone, "identically zero on cone (both semi-definite)"),
        (true, false) if min_value > threshold => (Definiteness::PseudoPositiveDef, "sample evidence, not a certificate"),
        (true, false) => (Definiteness::PseudoPositiveSemiDef, "sample evidence, not a certificate"),
        (false, true) if max_value < -threshold => (Definiteness::PseudoNegativeDef, "sample evidence, not a certificate"),
        (false, true) => (Definiteness::PseudoNegativeSemiDef, "sample evidence, not a certificate"),
    };
    DefinitenessVerdict {
        classification,
        positive_witness,
        negative_witness,
        samples_used,
        refined: cfg.refine,
        max_value,
        min_value,
        threshold,
        seed: cfg.seed,
        note: note.into(),
    }
}
