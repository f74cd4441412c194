use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::CmwError;
use crate::hermpoly::{Bipoly, ComplexRational, MultiIndex, RealBipoly};
use crate::linalg::{solve_rational, LinearSolution};

/// `|z|²_ℓ = −Σ_{j<ℓ}|z_j|² + Σ_{j≥ℓ}|z_j|²` (0-based).
pub fn signed_norm_sq(n: usize, ell: usize) -> RealBipoly {
    let mut q = RealBipoly::zero(n);
    for j in 0..n {
        let t = RealBipoly::abs_sq(n, j);
        q = if j < ell { &q - &t } else { &q + &t };
    }
    q
}

/// `Δ_ℓ = −Σ_{j<ℓ} ∂²/∂z_j∂z̄_j + Σ_{j≥ℓ} ∂²/∂z_j∂z̄_j`
pub fn laplacian_ell(q: &RealBipoly, ell: usize) -> RealBipoly {
    let n = q.n();
    let mut out = Bipoly::zero(n);
    for j in 0..n {
        let d = q.derive_z(j).and_then(|p| p.derive_zbar(j)).expect("index in range");
        out = if j < ell { out - d } else { out + d };
    }
    RealBipoly::new(out).expect("the signed Laplacian preserves reality")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HarmonicDecomposition {
    pub n: usize,
    pub ell: usize,
    /// Traceless part: `Δ_ℓ N = 0`.
    #[serde(serialize_with = "display")]
    pub n_part: RealBipoly,
    /// Hermitian (1,1) form with `Q = N + A·|z|²_ℓ`.
    #[serde(serialize_with = "display")]
    pub a_part: RealBipoly,
}

fn display<S: serde::Serializer>(p: &RealBipoly, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

/// Real basis of Hermitian (1,1) forms: `|z_j|²`, then `2 Re(z_j z̄_k)` and `2 Re(i z_j z̄_k)` for `j < k`.
fn hermitian_basis(n: usize) -> Vec<Bipoly> {
    let mut out: Vec<Bipoly> = (0..n).map(|j| Bipoly::abs_sq(n, j)).collect();
    for j in 0..n {
        for k in j + 1..n {
            let (ej, ek) = (MultiIndex::unit(n, j), MultiIndex::unit(n, k));
            let re = Bipoly::monomial(ej.clone(), ek.clone(), ComplexRational::one())
                + Bipoly::monomial(ek.clone(), ej.clone(), ComplexRational::one());
            let im = Bipoly::monomial(ej.clone(), ek.clone(), ComplexRational::i())
                + Bipoly::monomial(ek, ej, ComplexRational::from_ints(0, -1));
            out.push(re);
            out.push(im);
        }
    }
    out
}

/// Unique splitting `Q = N + A·|z|²_ℓ` with `Δ_ℓ N = 0`, by an exact solve for the `n²` real entries of `A`.
pub fn harmonic_decompose(q: &RealBipoly, ell: usize) -> Result<HarmonicDecomposition, CmwError> {
    let n = q.n();
    if ell > n {
        return Err(CmwError::InvalidInput(format!("ell = {ell} exceeds n = {n}")));
    }
    if let Some((a, b, _)) = q.terms().find(|(a, b, _)| a.degree() != 2 || b.degree() != 2) {
        return Err(CmwError::NotBidegree22(format!("term z^{a} zb^{b}")));
    }
    let g = signed_norm_sq(n, ell);
    let target = laplacian_ell(q, ell);
    let basis = hermitian_basis(n);
    let columns: Vec<RealBipoly> = basis
        .iter()
        .map(|b| laplacian_ell(&RealBipoly::new(b * &*g).expect("real product"), ell))
        .collect();
    let mut rows: BTreeMap<(MultiIndex, MultiIndex, bool), usize> = BTreeMap::new();
    for j in 0..n {
        for k in 0..n {
            for part in [false, true] {
                let len = rows.len();
                rows.insert((MultiIndex::unit(n, j), MultiIndex::unit(n, k), part), len);
            }
        }
    }
    let unknowns = basis.len();
    let mut a = vec![vec![BigRational::zero(); unknowns]; rows.len()];
    let mut rhs = vec![BigRational::zero(); rows.len()];
    for (col, p) in columns.iter().enumerate() {
        for (x, y, c) in p.terms() {
            a[rows[&(x.clone(), y.clone(), false)]][col] = c.re.clone();
            a[rows[&(x.clone(), y.clone(), true)]][col] = c.im.clone();
        }
    }
    for (x, y, c) in target.terms() {
        rhs[rows[&(x.clone(), y.clone(), false)]] = c.re.clone();
        rhs[rows[&(x.clone(), y.clone(), true)]] = c.im.clone();
    }
    let x = match solve_rational(&a, &rhs, unknowns) {
        LinearSolution::Solved { x, rank } if rank == unknowns => x,
        LinearSolution::Solved { rank, .. } => {
            return Err(CmwError::SingularSystem(format!("rank {rank} of {unknowns} (n = {n}, ell = {ell})")))
        }
        LinearSolution::Inconsistent { rank } => {
            return Err(CmwError::SingularSystem(format!("inconsistent, rank {rank} of {unknowns}")))
        }
    };
    let mut a_poly = Bipoly::zero(n);
    for (coef, b) in x.iter().zip(&basis) {
        if !coef.is_zero() {
            a_poly = a_poly + b.scale_real(coef);
        }
    }
    let a_part = RealBipoly::new(a_poly)?;
    let n_part = q - &(&a_part * &g);
    if !laplacian_ell(&n_part, ell).is_zero() {
        return Err(CmwError::SingularSystem("traceless part has nonzero Laplacian".into()));
    }
    Ok(HarmonicDecomposition { n, ell, n_part, a_part })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermpoly::rational::rat;

    #[test]
    fn laplacian_examples() {
        assert_eq!(laplacian_ell(&RealBipoly::abs_sq(2, 0), 0), RealBipoly::one(2));
        let q = RealBipoly::abs_sq(3, 0).pow(2);
        assert_eq!(laplacian_ell(&q, 1), RealBipoly::abs_sq(3, 0).scale(&rat(-4, 1)));
        assert_eq!(laplacian_ell(&signed_norm_sq(4, 2), 2), RealBipoly::constant(4, rat(4, 1)));
    }

    #[test]
    fn quartic_of_one_variable() {
        let q = RealBipoly::abs_sq(2, 0).pow(2);
        let h = harmonic_decompose(&q, 0).unwrap();
        let (z1, z2) = (RealBipoly::abs_sq(2, 0), RealBipoly::abs_sq(2, 1));
        let a = &z1.scale(&rat(5, 6)) - &z2.scale(&rat(1, 6));
        let n = &(&z1.pow(2) - &(&z1 * &z2).scale(&rat(4, 1))) + &z2.pow(2);
        assert_eq!(h.a_part, a);
        assert_eq!(h.n_part, n.scale(&rat(1, 6)));
    }

    #[test]
    fn traceless_input_is_fixed() {
        let q = harmonic_decompose(&RealBipoly::abs_sq(3, 0).pow(2), 1).unwrap().n_part;
        let again = harmonic_decompose(&q, 1).unwrap();
        assert_eq!(again.n_part, q);
        assert!(again.a_part.is_zero());
    }

    #[test]
    fn rejects_other_bidegrees() {
        assert!(matches!(harmonic_decompose(&RealBipoly::abs_sq(2, 0), 0), Err(CmwError::NotBidegree22(_))));
    }
}
