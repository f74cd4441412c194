use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::BigRational;

use super::monomial::MultiIndex;
use super::rational::ComplexRational;
use super::PolyError;

/// Polynomial in `z` only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HoloPoly {
    n: usize,
    terms: BTreeMap<MultiIndex, ComplexRational>,
}

impl HoloPoly {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: ComplexRational) -> Self {
        let mut h = Self::zero(n);
        h.add_term(MultiIndex::zeros(n), c);
        h
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, ComplexRational::one())
    }

    pub fn var(n: usize, j: usize) -> Self {
        Self::monomial(MultiIndex::unit(n, j), ComplexRational::one())
    }

    pub fn monomial(alpha: MultiIndex, c: ComplexRational) -> Self {
        let mut h = Self::zero(alpha.n());
        h.add_term(alpha, c);
        h
    }

    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (MultiIndex, ComplexRational)>,
    {
        let mut h = Self::zero(n);
        for (a, c) in terms {
            if a.n() != n {
                return Err(PolyError::DimensionMismatch { expected: n, found: a.n() });
            }
            h.add_term(a, c);
        }
        Ok(h)
    }

    /// `Σ c_j z_j + c_0`
    pub fn affine(constant: ComplexRational, linear: &[ComplexRational]) -> Self {
        let n = linear.len();
        let mut h = Self::constant(n, constant);
        for (j, c) in linear.iter().enumerate() {
            h.add_term(MultiIndex::unit(n, j), c.clone());
        }
        h
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &ComplexRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> ComplexRational {
        self.terms.get(alpha).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, alpha: MultiIndex, c: ComplexRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&alpha) {
            Some(v) => {
                *v += &c;
                if v.is_zero() {
                    self.terms.remove(&alpha);
                }
            }
            None => {
                self.terms.insert(alpha, c);
            }
        }
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(MultiIndex::degree).max()
    }

    pub fn scale(&self, c: &ComplexRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        Self { n: self.n, terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect() }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.n);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn derive(&self, j: usize) -> Result<Self, PolyError> {
        if j >= self.n {
            return Err(PolyError::IndexOutOfRange { index: j, n: self.n });
        }
        let mut out = Self::zero(self.n);
        for (a, c) in &self.terms {
            let e = a.0[j];
            if e == 0 {
                continue;
            }
            let mut a2 = a.clone();
            a2.0[j] -= 1;
            out.add_term(a2, c.scale(&BigRational::from_integer(e.into())));
        }
        Ok(out)
    }

    pub fn truncate_weighted(&self, weights: &[u32], max: u32) -> Self {
        let terms =
            self.terms.iter().filter(|(a, _)| a.weighted_degree(weights) <= max).map(|(k, v)| (k.clone(), v.clone())).collect();
        Self { n: self.n, terms }
    }

    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64, PolyError> {
        if z.len() != self.n {
            return Err(PolyError::DimensionMismatch { expected: self.n, found: z.len() });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, c) in &self.terms {
            let mut m = c.to_c64();
            for (j, &e) in a.0.iter().enumerate() {
                if e > 0 {
                    m *= z[j].powu(e);
                }
            }
            acc += m;
        }
        Ok(acc)
    }

    pub fn eval_exact(&self, z: &[ComplexRational]) -> Result<ComplexRational, PolyError> {
        if z.len() != self.n {
            return Err(PolyError::DimensionMismatch { expected: self.n, found: z.len() });
        }
        let mut acc = ComplexRational::zero();
        for (a, c) in &self.terms {
            let mut m = c.clone();
            for (j, &e) in a.0.iter().enumerate() {
                if e > 0 {
                    m *= &z[j].pow(e);
                }
            }
            acc += &m;
        }
        Ok(acc)
    }

    /// `h ∘ s`
    pub fn substitute(&self, s: &BiholoSubstitution) -> Result<Self, PolyError> {
        if s.target_n() != self.n {
            return Err(PolyError::DimensionMismatch { expected: self.n, found: s.target_n() });
        }
        let m = s.source_n();
        let mut out = Self::zero(m);
        for (a, c) in &self.terms {
            let mut t = Self::constant(m, c.clone());
            for (j, &e) in a.0.iter().enumerate() {
                if e > 0 {
                    t = &t * &s.components()[j].pow(e);
                }
            }
            out = &out + &t;
        }
        Ok(out)
    }
}

impl fmt::Display for HoloPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (a, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (j, &e) in a.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*z{}", j + 1)?,
                    _ => write!(f, "*z{}^{e}", j + 1)?,
                }
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a HoloPoly> for &'a HoloPoly {
    type Output = HoloPoly;
    fn add(self, o: &HoloPoly) -> HoloPoly {
        assert_eq!(self.n, o.n, "adding holomorphic polynomials of different dimension");
        let mut out = self.clone();
        for (a, c) in &o.terms {
            out.add_term(a.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a HoloPoly> for &'a HoloPoly {
    type Output = HoloPoly;
    fn sub(self, o: &HoloPoly) -> HoloPoly {
        self + &(-o)
    }
}

impl<'a> Mul<&'a HoloPoly> for &'a HoloPoly {
    type Output = HoloPoly;
    fn mul(self, o: &HoloPoly) -> HoloPoly {
        assert_eq!(self.n, o.n, "multiplying holomorphic polynomials of different dimension");
        let mut out = HoloPoly::zero(self.n);
        for (a1, c1) in &self.terms {
            for (a2, c2) in &o.terms {
                out.add_term(a1.add(a2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &HoloPoly {
    type Output = HoloPoly;
    fn neg(self) -> HoloPoly {
        self.scale(&ComplexRational::from_ints(-1, 0))
    }
}

/// Polynomial map `z ↦ (s_1(z), …, s_N(z))` used as a change of variables.
///
/// Substituting into a polynomial in `N` variables yields a polynomial in `source_n` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiholoSubstitution {
    source_n: usize,
    components: Vec<HoloPoly>,
}

impl BiholoSubstitution {
    pub fn new(source_n: usize, components: Vec<HoloPoly>) -> Result<Self, PolyError> {
        for c in &components {
            if c.n() != source_n {
                return Err(PolyError::DimensionMismatch { expected: source_n, found: c.n() });
            }
        }
        Ok(Self { source_n, components })
    }

    pub fn identity(n: usize) -> Self {
        Self { source_n: n, components: (0..n).map(|j| HoloPoly::var(n, j)).collect() }
    }

    /// `z ↦ z + p`
    pub fn translation(p: &[ComplexRational]) -> Self {
        let n = p.len();
        let components = (0..n).map(|j| &HoloPoly::var(n, j) + &HoloPoly::constant(n, p[j].clone())).collect();
        Self { source_n: n, components }
    }

    /// `z ↦ M z` with `M` given row by row (`target_n × source_n`).
    pub fn linear(rows: &[Vec<ComplexRational>]) -> Result<Self, PolyError> {
        let source_n = rows.first().map_or(0, Vec::len);
        let mut components = Vec::with_capacity(rows.len());
        for row in rows {
            if row.len() != source_n {
                return Err(PolyError::DimensionMismatch { expected: source_n, found: row.len() });
            }
            components.push(HoloPoly::affine(ComplexRational::zero(), row));
        }
        Ok(Self { source_n, components })
    }

    pub fn source_n(&self) -> usize {
        self.source_n
    }

    pub fn target_n(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[HoloPoly] {
        &self.components
    }

    /// `self ∘ inner`: first apply `inner`, then `self`.
    pub fn compose(&self, inner: &BiholoSubstitution) -> Result<Self, PolyError> {
        let components = self.components.iter().map(|c| c.substitute(inner)).collect::<Result<Vec<_>, _>>()?;
        Self::new(inner.source_n, components)
    }

    pub fn truncate_weighted(&self, weights: &[u32], max: u32) -> Self {
        Self { source_n: self.source_n, components: self.components.iter().map(|c| c.truncate_weighted(weights, max)).collect() }
    }

    pub fn eval(&self, z: &[Complex64]) -> Result<Vec<Complex64>, PolyError> {
        self.components.iter().map(|c| c.eval(z)).collect()
    }

    pub fn eval_exact(&self, z: &[ComplexRational]) -> Result<Vec<ComplexRational>, PolyError> {
        self.components.iter().map(|c| c.eval_exact(z)).collect()
    }

    /// Linear part at the origin as a `target_n × source_n` matrix.
    pub fn jacobian_at_origin(&self) -> Vec<Vec<ComplexRational>> {
        self.components
            .iter()
            .map(|c| (0..self.source_n).map(|j| c.coeff(&MultiIndex::unit(self.source_n, j))).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_order() {
        let x = HoloPoly::var(1, 0);
        let sq = BiholoSubstitution::new(1, vec![&x * &x]).unwrap();
        let shift = BiholoSubstitution::translation(&[ComplexRational::one()]);
        // sq ∘ shift : z ↦ (z+1)²
        let c = sq.compose(&shift).unwrap();
        let v = c.eval_exact(&[ComplexRational::from_ints(2, 0)]).unwrap();
        assert_eq!(v[0], ComplexRational::from_ints(9, 0));
    }

    #[test]
    fn rejects_mixed_dimensions() {
        assert!(BiholoSubstitution::new(2, vec![HoloPoly::var(2, 0), HoloPoly::var(3, 0)]).is_err());
    }
}
