use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::CmwError;
use crate::hermpoly::{Bipoly, ComplexRational, MultiIndex};

/// `z^a z̄^b u^pu v^pv`
pub(crate) type GKey = (MultiIndex, MultiIndex, u32, u32);

pub(crate) const MAX_WEIGHT: u32 = 4;

pub(crate) fn weight(k: &GKey) -> u32 {
    k.0.degree() + k.1.degree() + 2 * (k.2 + k.3)
}

/// Polynomial in `(z, z̄, u, v)` with `z` of weight 1 and `u, v` of weight 2.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct GraphPoly {
    pub(crate) n: usize,
    pub(crate) terms: BTreeMap<GKey, ComplexRational>,
}

fn i_pow(k: u32) -> ComplexRational {
    match k % 4 {
        0 => ComplexRational::one(),
        1 => ComplexRational::i(),
        2 => ComplexRational::from_ints(-1, 0),
        _ => ComplexRational::from_ints(0, -1),
    }
}

fn binomial(n: u32, k: u32) -> BigRational {
    let mut acc = BigRational::one();
    for j in 0..k {
        acc = acc * BigRational::from_integer((n - j).into()) / BigRational::from_integer((j + 1).into());
    }
    acc
}

impl GraphPoly {
    pub(crate) fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub(crate) fn add_term(&mut self, k: GKey, c: ComplexRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(k) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub(crate) fn coeff(&self, k: &GKey) -> ComplexRational {
        self.terms.get(k).cloned().unwrap_or_else(ComplexRational::zero)
    }

    pub(crate) fn add(&self, o: &GraphPoly) -> GraphPoly {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub(crate) fn neg(&self) -> GraphPoly {
        GraphPoly { n: self.n, terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect() }
    }

    pub(crate) fn mul(&self, o: &GraphPoly, max: u32) -> GraphPoly {
        let mut out = GraphPoly::zero(self.n);
        for (k1, c1) in &self.terms {
            for (k2, c2) in &o.terms {
                let k = (k1.0.add(&k2.0), k1.1.add(&k2.1), k1.2 + k2.2, k1.3 + k2.3);
                if weight(&k) <= max {
                    out.add_term(k, c1 * c2);
                }
            }
        }
        out
    }

    /// Rewrites a polynomial in `(z_1, …, z_n, w)` through `w = u + iv`, keeping weights `≤ max`.
    pub(crate) fn from_bipoly(r: &Bipoly, max: u32) -> GraphPoly {
        let n = r.n() - 1;
        let mut out = GraphPoly::zero(n);
        for (alpha, beta, c) in r.terms() {
            let a = MultiIndex(alpha.0[..n].to_vec());
            let b = MultiIndex(beta.0[..n].to_vec());
            let (p, q) = (alpha.0[n], beta.0[n]);
            if a.degree() + b.degree() + 2 * (p + q) > max {
                continue;
            }
            // (u + iv)^p (u − iv)^q
            for i in 0..=p {
                for j in 0..=q {
                    let coef = ComplexRational::real(binomial(p, i) * binomial(q, j)) * i_pow(i) * i_pow(3 * j);
                    out.add_term((a.clone(), b.clone(), p + q - i - j, i + j), c * &coef);
                }
            }
        }
        out
    }

    /// Back to `(z, w)` via `u = (w + w̄)/2`, `v = (w − w̄)/(2i)`.
    pub(crate) fn to_bipoly(&self) -> Bipoly {
        let nn = self.n + 1;
        let half = ComplexRational::from_ratio(1, 2);
        let u = Bipoly::z(nn, self.n).scale(&half) + Bipoly::zbar(nn, self.n).scale(&half);
        let v = Bipoly::z(nn, self.n).scale(&ComplexRational::new(BigRational::zero(), -half.re.clone()))
            + Bipoly::zbar(nn, self.n).scale(&ComplexRational::new(BigRational::zero(), half.re.clone()));
        let mut out = Bipoly::zero(nn);
        for ((a, b, pu, pv), c) in &self.terms {
            let mut ea = a.0.clone();
            ea.push(0);
            let mut eb = b.0.clone();
            eb.push(0);
            let t = Bipoly::monomial(MultiIndex(ea), MultiIndex(eb), c.clone());
            out = out + t * u.pow(*pu) * v.pow(*pv);
        }
        out
    }

    /// `self(z, z̄, u, v := phi)` where `phi` is free of `v`.
    pub(crate) fn subst_v(&self, phi: &GraphPoly, max: u32) -> GraphPoly {
        let mut by_power: BTreeMap<u32, GraphPoly> = BTreeMap::new();
        for ((a, b, pu, pv), c) in &self.terms {
            by_power
                .entry(*pv)
                .or_insert_with(|| GraphPoly::zero(self.n))
                .add_term((a.clone(), b.clone(), *pu, 0), c.clone());
        }
        let mut out = GraphPoly::zero(self.n);
        let mut power = GraphPoly::one(self.n);
        let mut current = 0;
        for (k, part) in by_power {
            while current < k {
                power = power.mul(phi, max);
                current += 1;
            }
            out = out.add(&part.mul(&power, max));
        }
        out
    }

    pub(crate) fn one(n: usize) -> GraphPoly {
        let mut g = GraphPoly::zero(n);
        g.add_term((MultiIndex::zeros(n), MultiIndex::zeros(n), 0, 0), ComplexRational::one());
        g
    }

    /// Terms of a `v`-free polynomial restricted to `u = 0` and bidegree `(p, q)`, as a bipolynomial in `z`.
    pub(crate) fn z_part(&self, p: u32, q: u32) -> Bipoly {
        let mut out = Bipoly::zero(self.n);
        for ((a, b, pu, pv), c) in &self.terms {
            if *pu == 0 && *pv == 0 && a.degree() == p && b.degree() == q {
                out.add_term(a.clone(), b.clone(), c.clone());
            }
        }
        out
    }
}

impl fmt::Display for GraphPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(k, c)| describe_term(k, c)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

pub(crate) fn describe_term(k: &GKey, c: &ComplexRational) -> String {
    let mut s = format!("({c})");
    for (j, &e) in k.0 .0.iter().enumerate() {
        if e > 0 {
            s.push_str(&format!("*z{}^{e}", j + 1));
        }
    }
    for (j, &e) in k.1 .0.iter().enumerate() {
        if e > 0 {
            s.push_str(&format!("*zb{}^{e}", j + 1));
        }
    }
    if k.2 > 0 {
        s.push_str(&format!("*u^{}", k.2));
    }
    if k.3 > 0 {
        s.push_str(&format!("*v^{}", k.3));
    }
    s
}

/// Solves `r(z, z̄, u + iφ) = 0` for `v = φ(z, z̄, u)` to weight `MAX_WEIGHT`, given that the linear part of `r` is exactly `v`.
pub(crate) fn graph_of(r: &Bipoly) -> Result<GraphPoly, CmwError> {
    let g = GraphPoly::from_bipoly(r, MAX_WEIGHT);
    let n = g.n;
    let zeros = MultiIndex::zeros(n);
    for (k, c) in &g.terms {
        if weight(k) <= 1 || (weight(k) == 2 && k.0.degree() + k.1.degree() == 0) {
            let is_v = *k == (zeros.clone(), zeros.clone(), 0, 1);
            if !(is_v && *c == ComplexRational::one()) {
                return Err(CmwError::InvalidInput(format!("linear part is not v: {}", describe_term(k, c))));
            }
        }
    }
    let v_key = (zeros.clone(), zeros, 0, 1);
    if g.coeff(&v_key) != ComplexRational::one() {
        return Err(CmwError::InvalidInput("linear part is not v".into()));
    }
    let mut rest = g.clone();
    rest.add_term(v_key, -ComplexRational::one());
    let mut phi = GraphPoly::zero(n);
    for _ in 0..=MAX_WEIGHT + 1 {
        let next = rest.subst_v(&phi, MAX_WEIGHT).neg();
        if next == phi {
            return Ok(phi);
        }
        phi = next;
    }
    Ok(phi)
}
