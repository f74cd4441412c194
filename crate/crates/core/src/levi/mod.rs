//! Levi form, signature and degenerate locus of a real hypersurface `{ρ = 0}`.

mod line_type;
mod probes;
mod sampling;

pub use line_type::{default_directions, kn_parameter_check, line_type, DirectionOrder, KnBoundCheck, LineTypeReport};
pub use probes::{
    genericity_probe, kn_transversality_probe, GenericityReport, TransversalityConfig, TransversalityOutcome,
    TransversalityWitness,
};
pub use sampling::{
    project_to_m, pseudoconvexity_scan, sample_points, DirectionMode, SamplerConfig, ScanPoint, ScanReport,
};

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::hermpoly::{Bipoly, ComplexRational, FloatPoly, PolyError, RealBipoly};
use crate::linalg::hermitian_eigenvalues;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LeviError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("holomorphic gradient vanishes (norm {norm:e})")]
    ZeroGradient { norm: f64 },
    #[error("defining function has identically zero gradient")]
    ConstantDefiningFunction,
    #[error("hypersurfaces need ambient dimension at least 2, got {0}")]
    AmbientTooSmall(usize),
    #[error("point is not on the hypersurface (rho = {0})")]
    NotOnSurface(String),
    #[error("no sign change of rho along the probe line")]
    NoSignChange,
    #[error("projection residual {0:e} above 1e-12")]
    ProjectionResidual(f64),
    #[error("sampler found no point on M for sample {index} after {attempts} attempts")]
    SamplerFailure { index: usize, attempts: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("degenerate sample cloud: {0}")]
    DegenerateCloud(String),
}

/// `{ρ = 0} ⊂ ℂⁿ` together with compiled first and mixed second derivatives.
#[derive(Clone, Debug)]
pub struct Hypersurface {
    name: String,
    rho: RealBipoly,
    rho_f: FloatPoly,
    grad: Vec<FloatPoly>,
    hess: Vec<Vec<FloatPoly>>,
}

impl Hypersurface {
    pub fn new(name: impl Into<String>, rho: RealBipoly) -> Result<Self, LeviError> {
        let n = rho.n();
        if n < 2 {
            return Err(LeviError::AmbientTooSmall(n));
        }
        let mut grad_sym = Vec::with_capacity(n);
        for j in 0..n {
            grad_sym.push(rho.derive_z(j)?);
        }
        if grad_sym.iter().all(Bipoly::is_zero) {
            return Err(LeviError::ConstantDefiningFunction);
        }
        let mut hess = Vec::with_capacity(n);
        for g in &grad_sym {
            let mut row = Vec::with_capacity(n);
            for k in 0..n {
                row.push(g.derive_zbar(k)?.compile());
            }
            hess.push(row);
        }
        Ok(Self {
            name: name.into(),
            rho_f: rho.compile(),
            grad: grad_sym.iter().map(Bipoly::compile).collect(),
            hess,
            rho,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rho(&self) -> &RealBipoly {
        &self.rho
    }

    pub fn n_ambient(&self) -> usize {
        self.rho.n()
    }

    pub fn eval(&self, z: &[Complex64]) -> f64 {
        self.rho_f.eval(z).re
    }

    pub fn abs_term_sum(&self, z: &[Complex64]) -> f64 {
        self.rho_f.abs_term_sum(z)
    }

    /// `(∂ρ/∂z_j)(p)`
    pub fn gradient(&self, z: &[Complex64]) -> Vec<Complex64> {
        self.grad.iter().map(|g| g.eval(z)).collect()
    }

    /// `(∂²ρ/∂z_j∂z̄_k)(p)`
    pub fn complex_hessian(&self, z: &[Complex64]) -> DMatrix<Complex64> {
        let n = self.n_ambient();
        DMatrix::from_fn(n, n, |j, k| self.hess[j][k].eval(z))
    }

    fn check_point(&self, z: &[Complex64]) -> Result<(), LeviError> {
        if z.len() != self.n_ambient() {
            return Err(PolyError::DimensionMismatch { expected: self.n_ambient(), found: z.len() }.into());
        }
        Ok(())
    }
}

fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Orthonormal basis (as columns) of `T^{1,0}_p M = ker ∂ρ(p)`.
pub fn tangent_basis(m: &Hypersurface, p: &[Complex64]) -> Result<DMatrix<Complex64>, LeviError> {
    m.check_point(p)?;
    let g = m.gradient(p);
    tangent_basis_from_gradient(&g)
}

pub(crate) fn tangent_basis_from_gradient(g: &[Complex64]) -> Result<DMatrix<Complex64>, LeviError> {
    let n = g.len();
    let norm = vec_norm(g);
    if norm < 1e-12 {
        return Err(LeviError::ZeroGradient { norm });
    }
    // Σ g_j v_j = ⟨v, ḡ⟩, so the kernel is the orthogonal complement of ḡ.
    let normal: Vec<Complex64> = g.iter().map(|c| c.conj() / norm).collect();
    let drop = (0..n).max_by(|&a, &b| g[a].norm().total_cmp(&g[b].norm())).unwrap_or(0);
    let mut basis: Vec<Vec<Complex64>> = vec![normal];
    for e in (0..n).filter(|&j| j != drop) {
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v[e] = Complex64::new(1.0, 0.0);
        // Two Gram-Schmidt passes for numerical orthogonality.
        for _ in 0..2 {
            for b in &basis {
                let proj: Complex64 = v.iter().zip(b).map(|(x, y)| x * y.conj()).sum();
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= proj * y;
                }
            }
        }
        let nv = vec_norm(&v);
        for x in v.iter_mut() {
            *x /= nv;
        }
        basis.push(v);
    }
    Ok(DMatrix::from_fn(n, n - 1, |i, j| basis[j + 1][i]))
}

/// Levi matrix `V* Hᵀ V` in the basis `V`, so that `x* L x = Σ ρ_{j k̄} w_j w̄_k` for `w = V x`.
pub fn levi_matrix_in_basis(m: &Hypersurface, p: &[Complex64], basis: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let h = m.complex_hessian(p);
    basis.adjoint() * h.transpose() * basis
}

pub fn levi_matrix(m: &Hypersurface, p: &[Complex64]) -> Result<DMatrix<Complex64>, LeviError> {
    let basis = tangent_basis(m, p)?;
    Ok(levi_matrix_in_basis(m, p, &basis))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LeviVerdict {
    StronglyPseudoconvex,
    WeaklyPseudoconvexDegenerate,
    MixedSignature,
    Degenerate,
    Uncertain,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub n_plus: usize,
    pub n_minus: usize,
    pub n_zero: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LeviReport {
    /// `[re, im]` per coordinate.
    pub point: Vec<[f64; 2]>,
    /// Eigenvalues of the Levi matrix for the conormal of `ρ` as given, ascending.
    pub eigenvalues: Vec<f64>,
    /// Counts after orienting the conormal so that `n_plus ≥ n_minus`.
    pub signature: Signature,
    pub ell: usize,
    pub conormal_flipped: bool,
    pub verdict: LeviVerdict,
    pub tol: f64,
    /// Scale that `tol` is relative to: `max(max|λ|, ‖∂ρ(p)‖)`.
    pub scale: f64,
    pub gradient_norm: f64,
}

impl LeviReport {
    /// Eigenvalues with the orientation used for the signature.
    pub fn oriented_eigenvalues(&self) -> Vec<f64> {
        if self.conormal_flipped {
            let mut v: Vec<f64> = self.eigenvalues.iter().map(|x| -x).collect();
            v.sort_by(f64::total_cmp);
            v
        } else {
            self.eigenvalues.clone()
        }
    }
}

pub fn point_pairs(p: &[Complex64]) -> Vec<[f64; 2]> {
    p.iter().map(|c| [c.re, c.im]).collect()
}

/// Levi eigenvalues, signature and verdict at `p`.
pub fn levi_signature(m: &Hypersurface, p: &[Complex64], tol: f64) -> Result<LeviReport, LeviError> {
    m.check_point(p)?;
    let g = m.gradient(p);
    let gnorm = vec_norm(&g);
    let basis = tangent_basis_from_gradient(&g)?;
    let l = levi_matrix_in_basis(m, p, &basis);
    let eigenvalues = hermitian_eigenvalues(&l);
    Ok(classify(p, eigenvalues, gnorm, tol))
}

pub(crate) fn classify(p: &[Complex64], eigenvalues: Vec<f64>, gnorm: f64, tol: f64) -> LeviReport {
    let dim = eigenvalues.len();
    let max_abs = eigenvalues.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    let scale = max_abs.max(gnorm);
    let all_zero = max_abs < 1e-14 * gnorm;
    let (mut n_plus, mut n_minus, mut n_zero) = (0, 0, 0);
    if all_zero {
        n_zero = dim;
    } else {
        for &x in &eigenvalues {
            if x.abs() < tol * scale {
                n_zero += 1;
            } else if x > 0.0 {
                n_plus += 1;
            } else {
                n_minus += 1;
            }
        }
    }
    let flipped = n_minus > n_plus;
    if flipped {
        std::mem::swap(&mut n_plus, &mut n_minus);
    }
    let min_abs = eigenvalues.iter().fold(f64::INFINITY, |a, &x| a.min(x.abs()));
    let verdict = if n_zero > 0 {
        if n_plus > 0 && n_minus == 0 {
            LeviVerdict::WeaklyPseudoconvexDegenerate
        } else {
            LeviVerdict::Degenerate
        }
    } else if min_abs < 10.0 * tol * scale {
        LeviVerdict::Uncertain
    } else if n_minus > 0 {
        LeviVerdict::MixedSignature
    } else {
        LeviVerdict::StronglyPseudoconvex
    };
    LeviReport {
        point: point_pairs(p),
        eigenvalues,
        signature: Signature { n_plus, n_minus, n_zero },
        ell: n_minus,
        conormal_flipped: flipped,
        verdict,
        tol,
        scale,
        gradient_norm: gnorm,
    }
}

/// Determinant of `[[0, ∂̄ρ], [∂ρ, ∂∂̄ρ]]`; on `M` it vanishes exactly where the Levi form is singular.
///
/// In an orthonormal tangent frame it equals `−‖∂ρ‖² · det(Levi)`.
pub fn degenerate_locus_polynomial(m: &Hypersurface) -> Result<RealBipoly, LeviError> {
    let rho = m.rho();
    let n = rho.n();
    let size = n + 1;
    let mut entries: Vec<Vec<Bipoly>> = vec![vec![Bipoly::zero(n); size]; size];
    for k in 0..n {
        entries[0][k + 1] = rho.derive_zbar(k)?;
        entries[k + 1][0] = rho.derive_z(k)?;
    }
    for j in 0..n {
        let dj = rho.derive_z(j)?;
        for k in 0..n {
            entries[j + 1][k + 1] = dj.derive_zbar(k)?;
        }
    }
    let det = symbolic_det(&entries);
    Ok(RealBipoly::new(det)?)
}

/// Laplace expansion along rows with memoisation on the remaining column set.
fn symbolic_det(m: &[Vec<Bipoly>]) -> Bipoly {
    fn rec(m: &[Vec<Bipoly>], row: usize, cols: u32, memo: &mut HashMap<u32, Bipoly>) -> Bipoly {
        let size = m.len();
        let nvars = m[0][0].n();
        if row == size {
            return Bipoly::one(nvars);
        }
        if let Some(v) = memo.get(&cols) {
            return v.clone();
        }
        let mut acc = Bipoly::zero(nvars);
        let mut sign_pos = true;
        for c in 0..size {
            if cols & (1 << c) == 0 {
                continue;
            }
            if !m[row][c].is_zero() {
                let minor = rec(m, row + 1, cols & !(1 << c), memo);
                let term = &m[row][c] * &minor;
                acc = if sign_pos { &acc + &term } else { &acc - &term };
            }
            sign_pos = !sign_pos;
        }
        memo.insert(cols, acc.clone());
        acc
    }
    let mut memo = HashMap::new();
    rec(m, 0, (1u32 << m.len()) - 1, &mut memo)
}

/// Float evaluation of the bordered determinant at `p`, independent of the symbolic route.
pub fn bordered_determinant_at(m: &Hypersurface, p: &[Complex64]) -> f64 {
    let n = m.n_ambient();
    let g = m.gradient(p);
    let h = m.complex_hessian(p);
    let b = DMatrix::from_fn(n + 1, n + 1, |i, j| match (i, j) {
        (0, 0) => Complex64::new(0.0, 0.0),
        (0, k) => g[k - 1].conj(),
        (k, 0) => g[k - 1],
        (j, k) => h[(j - 1, k - 1)],
    });
    b.determinant().re
}

pub fn to_c64_point(p: &[ComplexRational]) -> Vec<Complex64> {
    p.iter().map(ComplexRational::to_c64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermpoly::{HoloPoly, RealBipoly};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn model() -> Hypersurface {
        // Im w − |z|²
        let rho = &RealBipoly::im_of(&HoloPoly::var(2, 1)) - &RealBipoly::abs_sq(2, 0);
        Hypersurface::new("model", rho).unwrap()
    }

    #[test]
    fn tangent_of_model_at_origin() {
        let b = tangent_basis(&model(), &[c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!((b[(0, 0)].norm() - 1.0).abs() < 1e-15);
        assert!(b[(1, 0)].norm() < 1e-15);
    }

    #[test]
    fn sphere_tangent() {
        let rho = &(&RealBipoly::abs_sq(2, 0) + &RealBipoly::abs_sq(2, 1)) - &RealBipoly::one(2);
        let m = Hypersurface::new("sphere", rho).unwrap();
        let b = tangent_basis(&m, &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(b[(0, 0)].norm() < 1e-15);
        assert!((b[(1, 0)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_gradient_rejected() {
        let rho = &RealBipoly::abs_sq(2, 0) + &RealBipoly::abs_sq(2, 1);
        let m = Hypersurface::new("cone", rho).unwrap();
        assert!(matches!(tangent_basis(&m, &[c(0.0, 0.0), c(0.0, 0.0)]), Err(LeviError::ZeroGradient { .. })));
    }

    #[test]
    fn model_is_strongly_pseudoconvex() {
        let r = levi_signature(&model(), &[c(0.3, 0.1), c(0.0, 0.1)], 1e-9).unwrap();
        // ρ = Im w − |z|² gives a negative eigenvalue, the flip normalises it.
        assert!(r.conormal_flipped);
        assert_eq!(r.verdict, LeviVerdict::StronglyPseudoconvex);
        assert_eq!(r.signature, Signature { n_plus: 1, n_minus: 0, n_zero: 0 });
    }

    #[test]
    fn model_locus_is_constant() {
        let d = degenerate_locus_polynomial(&model()).unwrap();
        assert_eq!(d.total_degree(), Some(0));
        assert!(!d.is_zero());
        let v = bordered_determinant_at(&model(), &[c(0.2, 0.0), c(0.0, 0.04)]);
        let s = d.eval_real(&[c(0.2, 0.0), c(0.0, 0.04)]).unwrap();
        assert!((v - s).abs() < 1e-15);
    }
}
