use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::harmonic::harmonic_decompose;
use super::prepare::PreparedSurface;
use super::CmwError;
use crate::hermpoly::json::rational_to_string;
use crate::hermpoly::rational::parse_rational;
use crate::hermpoly::{Bipoly, ComplexRational, MultiIndex, RealBipoly};

/// Coefficients `s_{αβ̄γδ̄}` of a (2,2) form, `s(z, z̄) = Σ s_{αβ̄γδ̄} z_α z̄_β z_γ z̄_δ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Quartic22Tensor {
    n: usize,
    ell: usize,
    s: Vec<ComplexRational>,
}

impl Quartic22Tensor {
    pub fn zero(n: usize, ell: usize) -> Self {
        Self { n, ell, s: vec![ComplexRational::zero(); n.pow(4)] }
    }

    fn idx(&self, a: usize, b: usize, c: usize, d: usize) -> usize {
        ((a * self.n + b) * self.n + c) * self.n + d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> &ComplexRational {
        &self.s[self.idx(a, b, c, d)]
    }

    pub fn set(&mut self, a: usize, b: usize, c: usize, d: usize, v: ComplexRational) {
        let i = self.idx(a, b, c, d);
        self.s[i] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.s.iter().all(ComplexRational::is_zero)
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self { n: self.n, ell: self.ell, s: self.s.iter().map(|x| x.scale(r)).collect() }
    }

    /// Symmetric tensor of `factor · p` for a bidegree (2,2) polynomial `p`.
    pub fn from_polynomial(p: &RealBipoly, ell: usize, factor: &BigRational) -> Result<Self, CmwError> {
        let n = p.n();
        let mut t = Self::zero(n, ell);
        for (mu, nu, c) in p.terms() {
            if mu.degree() != 2 || nu.degree() != 2 {
                return Err(CmwError::NotBidegree22(format!("term z^{mu} zb^{nu}")));
            }
            let denom = BigRational::from_integer((mu.multiplicity() * nu.multiplicity()).into());
            let v = c.scale(&(factor / denom));
            let (ac, bd) = (mu.indices(), nu.indices());
            for (a, cc) in [(ac[0], ac[1]), (ac[1], ac[0])] {
                for (b, d) in [(bd[0], bd[1]), (bd[1], bd[0])] {
                    t.set(a, b, cc, d, v.clone());
                }
            }
        }
        Ok(t)
    }

    pub fn to_polynomial(&self) -> RealBipoly {
        let n = self.n;
        let mut out = Bipoly::zero(n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let v = self.get(a, b, c, d);
                        if !v.is_zero() {
                            out.add_term(MultiIndex::from_indices(n, &[a, c]), MultiIndex::from_indices(n, &[b, d]), v.clone());
                        }
                    }
                }
            }
        }
        RealBipoly::new(out).expect("Hermitian symmetric tensor gives a real polynomial")
    }

    /// Index tuples where `s_{αβ̄γδ̄} = s_{γβ̄αδ̄} = s_{γδ̄αβ̄}` or `conj(s_{αβ̄γδ̄}) = s_{βᾱδγ̄}` fails.
    pub fn symmetry_violations(&self) -> Vec<[usize; 4]> {
        let n = self.n;
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let v = self.get(a, b, c, d);
                        if v != self.get(c, b, a, d) || v != self.get(c, d, a, b) || v.conj() != *self.get(b, a, d, c) {
                            out.push([a, b, c, d]);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn to_float(&self) -> super::cone::FloatTensor {
        super::cone::FloatTensor::new(self.n, self.ell, self.s.iter().map(ComplexRational::to_c64).collect())
    }

    pub fn to_json(&self) -> TensorJson {
        let n = self.n;
        let mut entries = Vec::new();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let v = self.get(a, b, c, d);
                        if !v.is_zero() {
                            entries.push(TensorEntryJson {
                                index: [a, b, c, d],
                                re: rational_to_string(&v.re),
                                im: rational_to_string(&v.im),
                            });
                        }
                    }
                }
            }
        }
        TensorJson { n, ell: self.ell, normalization: NORMALIZATION.into(), entries }
    }

    pub fn from_json(j: &TensorJson) -> Result<Self, CmwError> {
        if j.ell > j.n {
            return Err(CmwError::InvalidInput(format!("ell = {} exceeds n = {}", j.ell, j.n)));
        }
        let mut t = Self::zero(j.n, j.ell);
        for e in &j.entries {
            if e.index.iter().any(|&i| i >= j.n) {
                return Err(CmwError::InvalidInput(format!("index {:?} out of range", e.index)));
            }
            let [a, b, c, d] = e.index;
            t.set(a, b, c, d, ComplexRational::new(parse_rational(&e.re)?, parse_rational(&e.im)?));
        }
        let bad = t.symmetry_violations();
        if let Some(ix) = bad.first() {
            return Err(CmwError::InvalidInput(format!("tensor symmetries fail at {ix:?}")));
        }
        Ok(t)
    }

    pub fn values_c64(&self) -> Vec<Complex64> {
        self.s.iter().map(ComplexRational::to_c64).collect()
    }
}

pub const NORMALIZATION: &str = "sum s_{a b c d} z_a conj(z_b) z_c conj(z_d) = 4 N";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorEntryJson {
    pub index: [usize; 4],
    pub re: String,
    #[serde(default = "zero_string")]
    pub im: String,
}

fn zero_string() -> String {
    "0".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorJson {
    pub n: usize,
    pub ell: usize,
    #[serde(default)]
    pub normalization: String,
    pub entries: Vec<TensorEntryJson>,
}

/// `C_{γδ} = Σ_α g_α s_{αᾱγδ̄}` with `g_α = −1` for `α < ℓ`; `Δ_ℓ s = 4 Σ C_{γδ} z_γ z̄_δ`.
pub fn trace_contract(t: &Quartic22Tensor) -> Vec<Vec<ComplexRational>> {
    let n = t.n;
    let mut out = vec![vec![ComplexRational::zero(); n]; n];
    for (c, row) in out.iter_mut().enumerate() {
        for (d, entry) in row.iter_mut().enumerate() {
            for a in 0..n {
                let v = t.get(a, a, c, d);
                if a < t.ell {
                    *entry -= v;
                } else {
                    *entry += v;
                }
            }
        }
    }
    out
}

/// Tensor of the traceless part of the prepared quartic, `s = 4N`.
pub fn cmw_tensor(p: &PreparedSurface) -> Result<Quartic22Tensor, CmwError> {
    let h = harmonic_decompose(&p.quartic22, p.ell)?;
    Quartic22Tensor::from_polynomial(&h.n_part, p.ell, &BigRational::from_integer(4.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermpoly::rational::rat;

    #[test]
    fn round_trip_through_polynomial() {
        let n = 3;
        let q = &(&RealBipoly::abs_sq(n, 0) * &RealBipoly::abs_sq(n, 1))
            + &RealBipoly::re_monomial(MultiIndex(vec![2, 0, 0]), MultiIndex(vec![0, 1, 1]), ComplexRational::from_ints(1, 2));
        let t = Quartic22Tensor::from_polynomial(&q, 1, &rat(1, 1)).unwrap();
        assert!(t.symmetry_violations().is_empty());
        assert_eq!(t.to_polynomial(), q);
        let j = t.to_json();
        assert_eq!(Quartic22Tensor::from_json(&j).unwrap(), t);
    }

    #[test]
    fn contraction_of_single_quartic_is_nonzero() {
        let t = Quartic22Tensor::from_polynomial(&RealBipoly::abs_sq(2, 0).pow(2), 0, &rat(1, 1)).unwrap();
        let c = trace_contract(&t);
        assert_eq!(c[0][0], ComplexRational::one());
    }
}
