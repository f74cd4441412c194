use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Deref, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::float::FloatPoly;
use super::holo::{BiholoSubstitution, HoloPoly};
use super::monomial::MultiIndex;
use super::rational::ComplexRational;
use super::PolyError;

type Key = (MultiIndex, MultiIndex);

/// Which kind of variable a Wirtinger derivative acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    Z(usize),
    Zbar(usize),
}

/// Sparse polynomial `Σ c_{αβ} z^α z̄^β` with no reality constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bipoly {
    n: usize,
    terms: BTreeMap<Key, ComplexRational>,
}

impl Bipoly {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: ComplexRational) -> Self {
        let mut p = Self::zero(n);
        p.add_term(MultiIndex::zeros(n), MultiIndex::zeros(n), c);
        p
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, ComplexRational::one())
    }

    pub fn monomial(alpha: MultiIndex, beta: MultiIndex, c: ComplexRational) -> Self {
        assert_eq!(alpha.n(), beta.n(), "monomial exponent lengths differ");
        let mut p = Self::zero(alpha.n());
        p.add_term(alpha, beta, c);
        p
    }

    pub fn z(n: usize, j: usize) -> Self {
        Self::monomial(MultiIndex::unit(n, j), MultiIndex::zeros(n), ComplexRational::one())
    }

    pub fn zbar(n: usize, j: usize) -> Self {
        Self::monomial(MultiIndex::zeros(n), MultiIndex::unit(n, j), ComplexRational::one())
    }

    /// `|z_j|²`
    pub fn abs_sq(n: usize, j: usize) -> Self {
        Self::monomial(MultiIndex::unit(n, j), MultiIndex::unit(n, j), ComplexRational::one())
    }

    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (MultiIndex, MultiIndex, ComplexRational)>,
    {
        let mut p = Self::zero(n);
        for (a, b, c) in terms {
            if a.n() != n {
                return Err(PolyError::DimensionMismatch { expected: n, found: a.n() });
            }
            if b.n() != n {
                return Err(PolyError::DimensionMismatch { expected: n, found: b.n() });
            }
            p.add_term(a, b, c);
        }
        Ok(p)
    }

    pub fn from_holo(h: &HoloPoly) -> Self {
        let n = h.n();
        let mut p = Self::zero(n);
        for (a, c) in h.terms() {
            p.add_term(a.clone(), MultiIndex::zeros(n), c.clone());
        }
        p
    }

    /// `conj(h(z))` as a polynomial in `z̄`.
    pub fn from_antiholo(h: &HoloPoly) -> Self {
        let n = h.n();
        let mut p = Self::zero(n);
        for (a, c) in h.terms() {
            p.add_term(MultiIndex::zeros(n), a.clone(), c.conj());
        }
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &MultiIndex, &ComplexRational)> {
        self.terms.iter().map(|((a, b), c)| (a, b, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, alpha: &MultiIndex, beta: &MultiIndex) -> ComplexRational {
        self.terms.get(&(alpha.clone(), beta.clone())).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, alpha: MultiIndex, beta: MultiIndex, c: ComplexRational) {
        if c.is_zero() {
            return;
        }
        let key = (alpha, beta);
        match self.terms.get_mut(&key) {
            Some(v) => {
                *v += &c;
                if v.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    fn add_assign_ref(&mut self, other: &Bipoly) {
        assert_eq!(self.n, other.n, "adding polynomials of different dimension");
        for ((a, b), c) in &other.terms {
            self.add_term(a.clone(), b.clone(), c.clone());
        }
    }

    pub fn scale(&self, c: &ComplexRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        let terms = self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect();
        Self { n: self.n, terms }
    }

    pub fn scale_real(&self, r: &BigRational) -> Self {
        self.scale(&ComplexRational::real(r.clone()))
    }

    pub fn conj(&self) -> Self {
        let terms = self.terms.iter().map(|((a, b), c)| ((b.clone(), a.clone()), c.conj())).collect();
        Self { n: self.n, terms }
    }

    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|((a, b), c)| {
            self.terms.get(&(b.clone(), a.clone())).is_some_and(|d| *d == c.conj())
        })
    }

    /// First term that violates `c_{βα} = conj(c_{αβ})`, for diagnostics.
    pub fn reality_defect(&self) -> Option<String> {
        for ((a, b), c) in &self.terms {
            let d = self.coeff(b, a);
            if d != c.conj() {
                return Some(format!("coefficient of z^{a} zbar^{b} is {c}, mirror term has {d}"));
            }
        }
        None
    }

    fn mul_filtered(&self, other: &Bipoly, keep: impl Fn(&MultiIndex, &MultiIndex) -> bool) -> Bipoly {
        assert_eq!(self.n, other.n, "multiplying polynomials of different dimension");
        let mut out = Bipoly::zero(self.n);
        for ((a1, b1), c1) in &self.terms {
            for ((a2, b2), c2) in &other.terms {
                let a = a1.add(a2);
                let b = b1.add(b2);
                if keep(&a, &b) {
                    out.add_term(a, b, c1 * c2);
                }
            }
        }
        out
    }

    pub fn mul_truncated(&self, other: &Bipoly, weights: &[u32], max: u32) -> Bipoly {
        self.mul_filtered(other, |a, b| a.weighted_degree(weights) + b.weighted_degree(weights) <= max)
    }

    pub fn pow(&self, e: u32) -> Bipoly {
        let mut acc = Bipoly::one(self.n);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn derive(&self, var: Var) -> Result<Bipoly, PolyError> {
        let (j, on_z) = match var {
            Var::Z(j) => (j, true),
            Var::Zbar(j) => (j, false),
        };
        if j >= self.n {
            return Err(PolyError::IndexOutOfRange { index: j, n: self.n });
        }
        let mut out = Bipoly::zero(self.n);
        for ((a, b), c) in &self.terms {
            let e = if on_z { a.0[j] } else { b.0[j] };
            if e == 0 {
                continue;
            }
            let (mut a2, mut b2) = (a.clone(), b.clone());
            if on_z {
                a2.0[j] -= 1;
            } else {
                b2.0[j] -= 1;
            }
            out.add_term(a2, b2, c.scale(&BigRational::from_integer(e.into())));
        }
        Ok(out)
    }

    pub fn derive_z(&self, j: usize) -> Result<Bipoly, PolyError> {
        self.derive(Var::Z(j))
    }

    pub fn derive_zbar(&self, j: usize) -> Result<Bipoly, PolyError> {
        self.derive(Var::Zbar(j))
    }

    fn filter(&self, keep: impl Fn(&MultiIndex, &MultiIndex) -> bool) -> Bipoly {
        let terms = self.terms.iter().filter(|((a, b), _)| keep(a, b)).map(|(k, v)| (k.clone(), v.clone())).collect();
        Bipoly { n: self.n, terms }
    }

    pub fn bidegree_part(&self, p: u32, q: u32) -> Bipoly {
        self.filter(|a, b| a.degree() == p && b.degree() == q)
    }

    pub fn truncate_order(&self, d: u32) -> Bipoly {
        self.filter(|a, b| a.degree() + b.degree() <= d)
    }

    pub fn homogeneous_part(&self, d: u32) -> Bipoly {
        self.filter(|a, b| a.degree() + b.degree() == d)
    }

    /// Drops terms whose weighted degree exceeds `max`; `weights` applies equally to `z_j` and `z̄_j`.
    pub fn truncate_weighted(&self, weights: &[u32], max: u32) -> Bipoly {
        self.filter(|a, b| a.weighted_degree(weights) + b.weighted_degree(weights) <= max)
    }

    /// All distinct bidegrees present, ascending.
    pub fn bidegrees(&self) -> Vec<(u32, u32)> {
        let mut v: Vec<(u32, u32)> = self.terms.keys().map(|(a, b)| (a.degree(), b.degree())).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|(a, b)| a.degree() + b.degree()).max()
    }

    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(|(a, b)| a.degree() + b.degree()).min()
    }

    pub fn constant_term(&self) -> ComplexRational {
        self.coeff(&MultiIndex::zeros(self.n), &MultiIndex::zeros(self.n))
    }

    fn check_dim(&self, len: usize) -> Result<(), PolyError> {
        if len != self.n {
            return Err(PolyError::DimensionMismatch { expected: self.n, found: len });
        }
        Ok(())
    }

    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64, PolyError> {
        self.check_dim(z.len())?;
        let zb: Vec<Complex64> = z.iter().map(|v| v.conj()).collect();
        Ok(self.eval_pair(z, &zb))
    }

    /// Evaluates with `z̄` replaced by an independent vector.
    pub(crate) fn eval_pair(&self, z: &[Complex64], xi: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for ((a, b), c) in &self.terms {
            let mut m = c.to_c64();
            for j in 0..self.n {
                if a.0[j] > 0 {
                    m *= z[j].powu(a.0[j]);
                }
                if b.0[j] > 0 {
                    m *= xi[j].powu(b.0[j]);
                }
            }
            acc += m;
        }
        acc
    }

    pub fn eval_exact(&self, z: &[ComplexRational]) -> Result<ComplexRational, PolyError> {
        self.check_dim(z.len())?;
        let zb: Vec<ComplexRational> = z.iter().map(|v| v.conj()).collect();
        Ok(self.eval_pair_exact(z, &zb))
    }

    pub(crate) fn eval_pair_exact(&self, z: &[ComplexRational], xi: &[ComplexRational]) -> ComplexRational {
        let mut cache: HashMap<(bool, usize, u32), ComplexRational> = HashMap::new();
        let mut power = |bar: bool, j: usize, e: u32| -> ComplexRational {
            cache
                .entry((bar, j, e))
                .or_insert_with(|| if bar { xi[j].pow(e) } else { z[j].pow(e) })
                .clone()
        };
        let mut acc = ComplexRational::zero();
        for ((a, b), c) in &self.terms {
            let mut m = c.clone();
            for j in 0..self.n {
                if a.0[j] > 0 {
                    m *= &power(false, j, a.0[j]);
                }
                if b.0[j] > 0 {
                    m *= &power(true, j, b.0[j]);
                }
            }
            acc += &m;
        }
        acc
    }

    /// Composite `p(s(z), conj(s(z)))`: `z̄` automatically receives the conjugate substitution.
    pub fn substitute(&self, s: &BiholoSubstitution) -> Result<Bipoly, PolyError> {
        self.substitute_impl(s, None)
    }

    /// As [`Bipoly::substitute`], dropping every intermediate term above the weighted degree `max`.
    pub fn substitute_truncated(&self, s: &BiholoSubstitution, weights: &[u32], max: u32) -> Result<Bipoly, PolyError> {
        if weights.len() != s.source_n() {
            return Err(PolyError::DimensionMismatch { expected: s.source_n(), found: weights.len() });
        }
        self.substitute_impl(s, Some((weights, max)))
    }

    fn substitute_impl(&self, s: &BiholoSubstitution, trunc: Option<(&[u32], u32)>) -> Result<Bipoly, PolyError> {
        self.check_dim(s.target_n())?;
        let m = s.source_n();
        let mul = |x: &Bipoly, y: &Bipoly| match trunc {
            Some((w, max)) => x.mul_truncated(y, w, max),
            None => x * y,
        };
        let holo: Vec<Bipoly> = s.components().iter().map(Bipoly::from_holo).collect();
        let anti: Vec<Bipoly> = s.components().iter().map(Bipoly::from_antiholo).collect();
        let mut cache: HashMap<(bool, usize, u32), Bipoly> = HashMap::new();
        let mut power = |bar: bool, j: usize, e: u32| -> Bipoly {
            if let Some(p) = cache.get(&(bar, j, e)) {
                return p.clone();
            }
            let base = if bar { &anti[j] } else { &holo[j] };
            let mut start = 0;
            let mut acc = Bipoly::one(m);
            for k in (1..e).rev() {
                if let Some(p) = cache.get(&(bar, j, k)) {
                    acc = p.clone();
                    start = k;
                    break;
                }
            }
            for k in start + 1..=e {
                acc = mul(&acc, base);
                cache.insert((bar, j, k), acc.clone());
            }
            acc
        };
        let mut out = Bipoly::zero(m);
        let one = Bipoly::one(m);
        for ((a, b), c) in &self.terms {
            let mut t = one.scale(c);
            for j in 0..self.n {
                if a.0[j] > 0 {
                    t = mul(&t, &power(false, j, a.0[j]));
                }
                if b.0[j] > 0 {
                    t = mul(&t, &power(true, j, b.0[j]));
                }
                if t.is_zero() {
                    break;
                }
            }
            out.add_assign_ref(&t);
        }
        Ok(out)
    }

    pub fn complexify(&self) -> Complexified {
        Complexified(self.clone())
    }

    /// Returns `k` with `self = k · other`, if such a constant exists.
    pub fn proportional_to(&self, other: &Bipoly) -> Option<ComplexRational> {
        if self.n != other.n {
            return None;
        }
        if other.is_zero() {
            return if self.is_zero() { Some(ComplexRational::zero()) } else { None };
        }
        let ((a, b), c) = other.terms.iter().next()?;
        let k = self.coeff(a, b).checked_div(c).ok()?;
        if &other.scale(&k) == self {
            Some(k)
        } else {
            None
        }
    }

    /// Renames variables into a larger space: variable `j` becomes `map[j]` of `new_n`.
    pub fn embed(&self, new_n: usize, map: &[usize]) -> Result<Bipoly, PolyError> {
        self.check_dim(map.len())?;
        let mut out = Bipoly::zero(new_n);
        for ((a, b), c) in &self.terms {
            let mut a2 = MultiIndex::zeros(new_n);
            let mut b2 = MultiIndex::zeros(new_n);
            for j in 0..self.n {
                let t = map[j];
                if t >= new_n {
                    return Err(PolyError::IndexOutOfRange { index: t, n: new_n });
                }
                a2.0[t] += a.0[j];
                b2.0[t] += b.0[j];
            }
            out.add_term(a2, b2, c.clone());
        }
        Ok(out)
    }

    pub fn compile(&self) -> FloatPoly {
        FloatPoly::new(self)
    }

    /// Sum of `|c|` over all terms.
    pub fn coefficient_l1(&self) -> f64 {
        self.terms.values().map(|c| c.to_c64().norm()).sum()
    }
}

impl fmt::Display for Bipoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((a, b), c) in &self.terms {
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
            for (j, &e) in b.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*zb{}", j + 1)?,
                    _ => write!(f, "*zb{}^{e}", j + 1)?,
                }
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a Bipoly> for &'a Bipoly {
    type Output = Bipoly;
    fn add(self, o: &Bipoly) -> Bipoly {
        let mut out = self.clone();
        out.add_assign_ref(o);
        out
    }
}

impl<'a> Sub<&'a Bipoly> for &'a Bipoly {
    type Output = Bipoly;
    fn sub(self, o: &Bipoly) -> Bipoly {
        let mut out = self.clone();
        out.add_assign_ref(&-o);
        out
    }
}

impl<'a> Mul<&'a Bipoly> for &'a Bipoly {
    type Output = Bipoly;
    fn mul(self, o: &Bipoly) -> Bipoly {
        self.mul_filtered(o, |_, _| true)
    }
}

impl Neg for &Bipoly {
    type Output = Bipoly;
    fn neg(self) -> Bipoly {
        self.scale(&ComplexRational::from_ints(-1, 0))
    }
}

impl Add for Bipoly {
    type Output = Bipoly;
    fn add(self, o: Bipoly) -> Bipoly {
        &self + &o
    }
}

impl Sub for Bipoly {
    type Output = Bipoly;
    fn sub(self, o: Bipoly) -> Bipoly {
        &self - &o
    }
}

impl Mul for Bipoly {
    type Output = Bipoly;
    fn mul(self, o: Bipoly) -> Bipoly {
        &self * &o
    }
}

impl Neg for Bipoly {
    type Output = Bipoly;
    fn neg(self) -> Bipoly {
        -&self
    }
}

/// A [`Bipoly`] satisfying `c_{βα} = conj(c_{αβ})`, so it takes real values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealBipoly(Bipoly);

impl RealBipoly {
    pub fn new(p: Bipoly) -> Result<Self, PolyError> {
        match p.reality_defect() {
            None => Ok(RealBipoly(p)),
            Some(msg) => Err(PolyError::NotReal(msg)),
        }
    }

    pub(crate) fn wrap(p: Bipoly) -> Self {
        debug_assert!(p.is_real(), "reality invariant violated: {:?}", p.reality_defect());
        RealBipoly(p)
    }

    pub fn zero(n: usize) -> Self {
        RealBipoly(Bipoly::zero(n))
    }

    pub fn constant(n: usize, r: BigRational) -> Self {
        RealBipoly(Bipoly::constant(n, ComplexRational::real(r)))
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, BigRational::one())
    }

    /// `|z_j|²`
    pub fn abs_sq(n: usize, j: usize) -> Self {
        RealBipoly(Bipoly::abs_sq(n, j))
    }

    /// `Re h = (h + h̄)/2`
    pub fn re_of(h: &HoloPoly) -> Self {
        let half = ComplexRational::from_ratio(1, 2);
        RealBipoly::wrap((&Bipoly::from_holo(h) + &Bipoly::from_antiholo(h)).scale(&half))
    }

    /// `Im h = (h − h̄)/(2i)`
    pub fn im_of(h: &HoloPoly) -> Self {
        let k = ComplexRational::new(BigRational::zero(), BigRational::new((-1).into(), 2.into()));
        RealBipoly::wrap((&Bipoly::from_holo(h) - &Bipoly::from_antiholo(h)).scale(&k))
    }

    /// `Re(c · z^α z̄^β)`
    pub fn re_monomial(alpha: MultiIndex, beta: MultiIndex, c: ComplexRational) -> Self {
        let half = ComplexRational::from_ratio(1, 2);
        let p = Bipoly::monomial(alpha.clone(), beta.clone(), c.clone());
        let q = Bipoly::monomial(beta, alpha, c.conj());
        RealBipoly::wrap((&p + &q).scale(&half))
    }

    pub fn as_bipoly(&self) -> &Bipoly {
        &self.0
    }

    pub fn into_inner(self) -> Bipoly {
        self.0
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        RealBipoly(self.0.scale_real(r))
    }

    pub fn pow(&self, e: u32) -> Self {
        RealBipoly::wrap(self.0.pow(e))
    }

    pub fn substitute(&self, s: &BiholoSubstitution) -> Result<Self, PolyError> {
        Ok(RealBipoly::wrap(self.0.substitute(s)?))
    }

    pub fn substitute_truncated(&self, s: &BiholoSubstitution, weights: &[u32], max: u32) -> Result<Self, PolyError> {
        Ok(RealBipoly::wrap(self.0.substitute_truncated(s, weights, max)?))
    }

    pub fn bidegree_part(&self, p: u32, q: u32) -> Bipoly {
        self.0.bidegree_part(p, q)
    }

    /// The `(p,p)` part, which is itself real.
    pub fn diagonal_bidegree_part(&self, p: u32) -> Self {
        RealBipoly::wrap(self.0.bidegree_part(p, p))
    }

    pub fn truncate_order(&self, d: u32) -> Self {
        RealBipoly(self.0.truncate_order(d))
    }

    pub fn truncate_weighted(&self, weights: &[u32], max: u32) -> Self {
        RealBipoly(self.0.truncate_weighted(weights, max))
    }

    pub fn homogeneous_part(&self, d: u32) -> Self {
        RealBipoly(self.0.homogeneous_part(d))
    }

    pub fn embed(&self, new_n: usize, map: &[usize]) -> Result<Self, PolyError> {
        Ok(RealBipoly(self.0.embed(new_n, map)?))
    }

    /// Real value `ρ(z, z̄)`.
    pub fn eval_real(&self, z: &[Complex64]) -> Result<f64, PolyError> {
        Ok(self.0.eval(z)?.re)
    }

    pub fn eval_exact_real(&self, z: &[ComplexRational]) -> Result<BigRational, PolyError> {
        Ok(self.0.eval_exact(z)?.re)
    }
}

impl Deref for RealBipoly {
    type Target = Bipoly;
    fn deref(&self) -> &Bipoly {
        &self.0
    }
}

impl fmt::Display for RealBipoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl TryFrom<Bipoly> for RealBipoly {
    type Error = PolyError;
    fn try_from(p: Bipoly) -> Result<Self, PolyError> {
        RealBipoly::new(p)
    }
}

impl<'a> Add<&'a RealBipoly> for &'a RealBipoly {
    type Output = RealBipoly;
    fn add(self, o: &RealBipoly) -> RealBipoly {
        RealBipoly::wrap(&self.0 + &o.0)
    }
}

impl<'a> Sub<&'a RealBipoly> for &'a RealBipoly {
    type Output = RealBipoly;
    fn sub(self, o: &RealBipoly) -> RealBipoly {
        RealBipoly::wrap(&self.0 - &o.0)
    }
}

impl<'a> Mul<&'a RealBipoly> for &'a RealBipoly {
    type Output = RealBipoly;
    fn mul(self, o: &RealBipoly) -> RealBipoly {
        RealBipoly::wrap(&self.0 * &o.0)
    }
}

impl Neg for &RealBipoly {
    type Output = RealBipoly;
    fn neg(self) -> RealBipoly {
        RealBipoly(-&self.0)
    }
}

impl Add for RealBipoly {
    type Output = RealBipoly;
    fn add(self, o: RealBipoly) -> RealBipoly {
        &self + &o
    }
}

impl Sub for RealBipoly {
    type Output = RealBipoly;
    fn sub(self, o: RealBipoly) -> RealBipoly {
        &self - &o
    }
}

impl Mul for RealBipoly {
    type Output = RealBipoly;
    fn mul(self, o: RealBipoly) -> RealBipoly {
        &self * &o
    }
}

impl Neg for RealBipoly {
    type Output = RealBipoly;
    fn neg(self) -> RealBipoly {
        -&self
    }
}

/// `ρ(z, ξ)`: the polynomial with `z̄` replaced by an independent variable `ξ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complexified(Bipoly);

impl Complexified {
    pub fn n(&self) -> usize {
        self.0.n()
    }

    pub fn eval(&self, z: &[Complex64], xi: &[Complex64]) -> Result<Complex64, PolyError> {
        self.0.check_dim(z.len())?;
        self.0.check_dim(xi.len())?;
        Ok(self.0.eval_pair(z, xi))
    }

    pub fn eval_exact(&self, z: &[ComplexRational], xi: &[ComplexRational]) -> Result<ComplexRational, PolyError> {
        self.0.check_dim(z.len())?;
        self.0.check_dim(xi.len())?;
        Ok(self.0.eval_pair_exact(z, xi))
    }

    /// Fixes `ξ`, leaving a holomorphic polynomial in `z`.
    pub fn specialize_xi(&self, xi: &[ComplexRational]) -> Result<HoloPoly, PolyError> {
        self.0.check_dim(xi.len())?;
        let n = self.n();
        let mut h = HoloPoly::zero(n);
        for ((a, b), c) in &self.0.terms {
            let mut k = c.clone();
            for j in 0..n {
                if b.0[j] > 0 {
                    k *= &xi[j].pow(b.0[j]);
                }
            }
            h.add_term(a.clone(), k);
        }
        Ok(h)
    }

    /// Restriction `ξ = z̄`.
    pub fn restrict(&self) -> Bipoly {
        self.0.clone()
    }

    /// Coefficients keyed by `(z-exponent, ξ-exponent)`.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &MultiIndex, &ComplexRational)> {
        self.0.terms()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermpoly::rational::rat;

    fn circle() -> RealBipoly {
        &RealBipoly::abs_sq(1, 0) - &RealBipoly::one(1)
    }

    #[test]
    fn evaluates_unit_circle() {
        let v = circle().eval_real(&[Complex64::new(1.0, 0.0)]).unwrap();
        assert_eq!(v, 0.0);
        assert!(circle().eval_real(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]).is_err());
    }

    #[test]
    fn wirtinger_power_rule() {
        let p = RealBipoly::abs_sq(1, 0).pow(2);
        let d = p.derive_z(0).unwrap();
        let expected = Bipoly::monomial(MultiIndex(vec![1]), MultiIndex(vec![2]), ComplexRational::from_ints(2, 0));
        assert_eq!(d, expected);
        let dd = d.derive_zbar(0).unwrap();
        assert_eq!(dd, Bipoly::abs_sq(1, 0).scale(&ComplexRational::from_ints(4, 0)));
        assert!(p.derive_z(1).is_err());
    }

    #[test]
    fn truncation_chain() {
        let z2 = RealBipoly::abs_sq(1, 0);
        let p = &(&RealBipoly::one(1) + &z2) + &z2.pow(3);
        assert_eq!(p.truncate_order(4), &RealBipoly::one(1) + &z2);
        assert_eq!(p.truncate_order(0), RealBipoly::one(1));
        assert_eq!(p.truncate_order(4).truncate_order(2), p.truncate_order(2));
    }

    #[test]
    fn rejects_non_real() {
        let p = Bipoly::z(1, 0);
        assert!(RealBipoly::new(p).is_err());
        let q = Bipoly::monomial(MultiIndex(vec![1]), MultiIndex(vec![1]), ComplexRational::new(rat(1, 1), rat(1, 1)));
        assert!(RealBipoly::new(q).is_err());
    }

    #[test]
    fn proportionality() {
        let p = circle();
        let q = p.scale(&rat(-3, 4));
        assert_eq!(q.proportional_to(&p), Some(ComplexRational::from_ratio(-3, 4)));
        assert_eq!(RealBipoly::abs_sq(1, 0).proportional_to(&p), None);
    }

    #[test]
    fn im_of_w() {
        let w = HoloPoly::var(2, 1);
        let p = RealBipoly::im_of(&w);
        let v = p.eval_real(&[Complex64::new(0.0, 0.0), Complex64::new(0.3, 2.0)]).unwrap();
        assert!((v - 2.0).abs() < 1e-15);
    }
}
