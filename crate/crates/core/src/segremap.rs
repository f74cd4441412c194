//! Segre varieties and verification that a polynomial map sends one hypersurface into another.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hermpoly::json::{holo_from_json, holo_to_json, HoloJson};
use crate::hermpoly::{BiholoSubstitution, Bipoly, ComplexRational, HoloPoly, MultiIndex, PolyError, RealBipoly};
use crate::levi::{sample_points, Hypersurface, LeviError, SamplerConfig};
use crate::linalg::{solve_rational, LinearSolution};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SegreError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Levi(#[from] LeviError),
    #[error("map dimensions do not match: {0}")]
    Dimension(String),
    #[error("cofactor system too large ({unknowns} unknowns)")]
    TooLarge { unknowns: usize },
}

/// `Q_w = {z : ρ(z, w̄) = 0}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SegreVariety {
    pub base: Vec<ComplexRational>,
    pub poly: HoloPoly,
}

pub fn segre_polynomial(m: &Hypersurface, w: &[ComplexRational]) -> Result<SegreVariety, SegreError> {
    let xi: Vec<ComplexRational> = w.iter().map(ComplexRational::conj).collect();
    let poly = m.rho().complexify().specialize_xi(&xi)?;
    Ok(SegreVariety { base: w.to_vec(), poly })
}

/// Float base point, converted exactly (every finite double is a dyadic rational).
pub fn segre_polynomial_f64(m: &Hypersurface, w: &[Complex64]) -> Result<SegreVariety, SegreError> {
    let exact: Vec<ComplexRational> = w.iter().map(|c| ComplexRational::from_c64_exact(*c)).collect();
    segre_polynomial(m, &exact)
}

/// `ρ(z, w̄)` in exact arithmetic.
pub fn segre_value_exact(m: &Hypersurface, z: &[ComplexRational], w: &[ComplexRational]) -> Result<ComplexRational, SegreError> {
    let xi: Vec<ComplexRational> = w.iter().map(ComplexRational::conj).collect();
    Ok(m.rho().complexify().eval_exact(z, &xi)?)
}

pub fn segre_contains_exact(m: &Hypersurface, z: &[ComplexRational], w: &[ComplexRational]) -> Result<bool, SegreError> {
    Ok(segre_value_exact(m, z, w)?.is_zero())
}

/// `|ρ(z, w̄)| < tol`
pub fn segre_membership(m: &Hypersurface, z: &[Complex64], w: &[Complex64], tol: f64) -> Result<bool, SegreError> {
    let xi: Vec<Complex64> = w.iter().map(|c| c.conj()).collect();
    Ok(m.rho().complexify().eval(z, &xi)?.norm() < tol)
}

/// Holomorphic polynomial map `ℂⁿ → ℂᴺ`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMap {
    source_n: usize,
    components: Vec<HoloPoly>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PolyMapJson {
    pub source_n: usize,
    pub target_n: usize,
    pub components: Vec<HoloJson>,
}

impl PolyMap {
    pub fn new(source_n: usize, components: Vec<HoloPoly>) -> Result<Self, SegreError> {
        if let Some(c) = components.iter().find(|c| c.n() != source_n) {
            return Err(SegreError::Dimension(format!("component in {} variables, expected {source_n}", c.n())));
        }
        Ok(Self { source_n, components })
    }

    pub fn identity(n: usize) -> Self {
        Self { source_n: n, components: (0..n).map(|j| HoloPoly::var(n, j)).collect() }
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

    pub fn as_substitution(&self) -> BiholoSubstitution {
        BiholoSubstitution::new(self.source_n, self.components.clone()).expect("components validated")
    }

    pub fn eval(&self, z: &[Complex64]) -> Result<Vec<Complex64>, PolyError> {
        self.components.iter().map(|c| c.eval(z)).collect()
    }

    pub fn to_json(&self) -> PolyMapJson {
        PolyMapJson {
            source_n: self.source_n,
            target_n: self.target_n(),
            components: self.components.iter().map(holo_to_json).collect(),
        }
    }

    pub fn from_json(j: &PolyMapJson) -> Result<Self, SegreError> {
        if j.components.len() != j.target_n {
            return Err(SegreError::Dimension(format!(
                "target_n = {} but {} components given",
                j.target_n,
                j.components.len()
            )));
        }
        let comps = j.components.iter().map(|c| holo_from_json(j.source_n, c)).collect::<Result<Vec<_>, _>>()?;
        Self::new(j.source_n, comps)
    }

    pub fn from_json_str(text: &str) -> Result<Self, SegreError> {
        let j: PolyMapJson = serde_json::from_str(text).map_err(PolyError::from)?;
        Self::from_json(&j)
    }
}

#[derive(Clone, Debug)]
pub enum MapCheckMode {
    Exact,
    Numeric { sampler: SamplerConfig, samples: usize, seed: u64, tol: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum MapVerdict {
    /// `ρ′∘F = λ·ρ` with the returned real cofactor `λ`.
    ExactYes { cofactor: RealBipoly },
    ExactNo { reason: String },
    NumericYes { max_residual: f64, samples: usize },
    NumericNo { max_residual: f64, samples: usize, worst_point: Vec<[f64; 2]> },
}

impl MapVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            MapVerdict::ExactYes { .. } => "ExactYes",
            MapVerdict::ExactNo { .. } => "ExactNo",
            MapVerdict::NumericYes { .. } => "NumericYes",
            MapVerdict::NumericNo { .. } => "NumericNo",
        }
    }

    pub fn is_yes(&self) -> bool {
        matches!(self, MapVerdict::ExactYes { .. } | MapVerdict::NumericYes { .. })
    }
}

pub const COFACTOR_LIMITATION: &str = "the cofactor is sought only up to the complementary degree; \
an infeasible system gives ExactNo even though a higher-degree relation could exist for reducible rho";

const MAX_UNKNOWNS: usize = 4000;

pub fn verify_map_sends(
    f: &PolyMap,
    m: &Hypersurface,
    mprime: &Hypersurface,
    mode: &MapCheckMode,
) -> Result<MapVerdict, SegreError> {
    if f.source_n() != m.n_ambient() {
        return Err(SegreError::Dimension(format!("map source {} vs surface {}", f.source_n(), m.n_ambient())));
    }
    if f.target_n() != mprime.n_ambient() {
        return Err(SegreError::Dimension(format!("map target {} vs target surface {}", f.target_n(), mprime.n_ambient())));
    }
    match mode {
        MapCheckMode::Exact => exact_check(f, m, mprime),
        MapCheckMode::Numeric { sampler, samples, seed, tol } => numeric_check(f, m, mprime, sampler, *samples, *seed, *tol),
    }
}

fn exact_check(f: &PolyMap, m: &Hypersurface, mprime: &Hypersurface) -> Result<MapVerdict, SegreError> {
    let g = mprime.rho().substitute(&f.as_substitution())?;
    if g.is_zero() {
        return Ok(MapVerdict::ExactYes { cofactor: RealBipoly::zero(m.n_ambient()) });
    }
    let rho = m.rho();
    let dg = g.total_degree().unwrap_or(0);
    let dr = rho.total_degree().unwrap_or(0);
    if dg < dr {
        return Ok(MapVerdict::ExactNo { reason: format!("degree underflow: deg(rho' o F) = {dg} < deg(rho) = {dr}") });
    }
    match solve_cofactor(&g, rho, dg - dr)? {
        Some(lambda) => {
            let residual = &g - &(&lambda * rho);
            if !residual.is_zero() {
                return Ok(MapVerdict::ExactNo { reason: "cofactor replay failed".into() });
            }
            Ok(MapVerdict::ExactYes { cofactor: lambda })
        }
        None => Ok(MapVerdict::ExactNo { reason: format!("cofactor system of degree <= {} infeasible; {COFACTOR_LIMITATION}", dg - dr) }),
    }
}

/// Real unknown polynomial basis: `z^a z̄^a` and the pairs `Re`, `Im` of `z^a z̄^b` for `a < b`.
fn real_basis(n: usize, max_deg: u32) -> Vec<Bipoly> {
    let mut monos: Vec<(MultiIndex, MultiIndex)> = Vec::new();
    for d in 0..=max_deg {
        for da in 0..=d {
            for a in MultiIndex::all_of_degree(n, da) {
                for b in MultiIndex::all_of_degree(n, d - da) {
                    monos.push((a.clone(), b));
                }
            }
        }
    }
    let mut basis = Vec::new();
    for (a, b) in monos {
        match a.cmp(&b) {
            std::cmp::Ordering::Equal => basis.push(Bipoly::monomial(a, b, ComplexRational::one())),
            std::cmp::Ordering::Less => {
                let p = Bipoly::monomial(a.clone(), b.clone(), ComplexRational::one());
                let q = Bipoly::monomial(b.clone(), a.clone(), ComplexRational::one());
                basis.push(&p + &q);
                let pi = Bipoly::monomial(a.clone(), b.clone(), ComplexRational::i());
                let qi = Bipoly::monomial(b, a, ComplexRational::from_ints(0, -1));
                basis.push(&pi + &qi);
            }
            std::cmp::Ordering::Greater => {}
        }
    }
    basis
}

fn solve_cofactor(g: &Bipoly, rho: &Bipoly, max_deg: u32) -> Result<Option<RealBipoly>, SegreError> {
    let basis = real_basis(rho.n(), max_deg);
    if basis.len() > MAX_UNKNOWNS {
        return Err(SegreError::TooLarge { unknowns: basis.len() });
    }
    let products: Vec<Bipoly> = basis.iter().map(|b| b * rho).collect();
    let mut rows: BTreeMap<(MultiIndex, MultiIndex, bool), usize> = BTreeMap::new();
    let register = |p: &Bipoly, rows: &mut BTreeMap<_, usize>| {
        for (a, b, _) in p.terms() {
            for part in [false, true] {
                let len = rows.len();
                rows.entry((a.clone(), b.clone(), part)).or_insert(len);
            }
        }
    };
    register(g, &mut rows);
    for p in &products {
        register(p, &mut rows);
    }
    let unknowns = basis.len();
    let mut a = vec![vec![BigRational::zero(); unknowns]; rows.len()];
    let mut rhs = vec![BigRational::zero(); rows.len()];
    for (k, p) in products.iter().enumerate() {
        for (ma, mb, c) in p.terms() {
            a[rows[&(ma.clone(), mb.clone(), false)]][k] = c.re.clone();
            a[rows[&(ma.clone(), mb.clone(), true)]][k] = c.im.clone();
        }
    }
    for (ma, mb, c) in g.terms() {
        rhs[rows[&(ma.clone(), mb.clone(), false)]] = c.re.clone();
        rhs[rows[&(ma.clone(), mb.clone(), true)]] = c.im.clone();
    }
    match solve_rational(&a, &rhs, unknowns) {
        LinearSolution::Inconsistent { .. } => Ok(None),
        LinearSolution::Solved { x, .. } => {
            let mut lambda = Bipoly::zero(rho.n());
            for (coef, b) in x.iter().zip(&basis) {
                if !coef.is_zero() {
                    lambda = &lambda + &b.scale_real(coef);
                }
            }
            Ok(Some(RealBipoly::new(lambda)?))
        }
    }
}

fn numeric_check(
    f: &PolyMap,
    m: &Hypersurface,
    mprime: &Hypersurface,
    sampler: &SamplerConfig,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<MapVerdict, SegreError> {
    let points = sample_points(m, sampler, samples, seed)?;
    let mut worst = 0.0f64;
    let mut worst_point = Vec::new();
    for p in &points {
        let q = f.eval(p)?;
        let scale = mprime.abs_term_sum(&q).max(f64::MIN_POSITIVE);
        let r = mprime.eval(&q).abs() / scale;
        if r > worst || worst_point.is_empty() {
            worst = worst.max(r);
            worst_point = p.iter().map(|c| [c.re, c.im]).collect();
        }
    }
    if worst < tol {
        Ok(MapVerdict::NumericYes { max_residual: worst, samples: points.len() })
    } else {
        Ok(MapVerdict::NumericNo { max_residual: worst, samples: points.len(), worst_point })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermpoly::rational::rat;

    fn model(n: usize) -> Hypersurface {
        // Im z_n − Σ_{j<n} |z_j|²
        let mut rho = RealBipoly::im_of(&HoloPoly::var(n, n - 1));
        for j in 0..n - 1 {
            rho = &rho - &RealBipoly::abs_sq(n, j);
        }
        Hypersurface::new("model", rho).unwrap()
    }

    #[test]
    fn segre_of_model() {
        let m = model(2);
        let p = ComplexRational::new(rat(1, 2), rat(1, 3));
        let q = ComplexRational::new(rat(-2, 1), rat(5, 1));
        let s = segre_polynomial(&m, &[p.clone(), q.clone()]).unwrap();
        // (w − q̄)/(2i) − z p̄
        let half_i_inv = ComplexRational::new(rat(0, 1), rat(-1, 2));
        let w = HoloPoly::var(2, 1);
        let expected = &(&w - &HoloPoly::constant(2, q.conj())).scale(&half_i_inv) - &HoloPoly::var(2, 0).scale(&p.conj());
        assert_eq!(s.poly, expected);
    }

    #[test]
    fn sphere_segre_is_hyperplane() {
        let rho = &(&RealBipoly::abs_sq(2, 0) + &RealBipoly::abs_sq(2, 1)) - &RealBipoly::one(2);
        let m = Hypersurface::new("sphere", rho).unwrap();
        let s = segre_polynomial(&m, &[ComplexRational::one(), ComplexRational::zero()]).unwrap();
        assert_eq!(s.poly, &HoloPoly::var(2, 0) - &HoloPoly::one(2));
    }

    #[test]
    fn model_membership() {
        let m = model(2);
        let on = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)];
        let off = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0)];
        assert!(segre_membership(&m, &on, &on, 1e-12).unwrap());
        assert!(!segre_membership(&m, &off, &off, 1e-12).unwrap());
    }

    #[test]
    fn identity_and_embedding() {
        let m2 = model(2);
        let r = verify_map_sends(&PolyMap::identity(2), &m2, &m2, &MapCheckMode::Exact).unwrap();
        match r {
            MapVerdict::ExactYes { cofactor } => assert_eq!(cofactor, RealBipoly::one(2)),
            other => panic!("{other:?}"),
        }
        let m3 = model(3);
        let f = PolyMap::new(2, vec![HoloPoly::var(2, 0), HoloPoly::zero(2), HoloPoly::var(2, 1)]).unwrap();
        assert!(verify_map_sends(&f, &m2, &m3, &MapCheckMode::Exact).unwrap().is_yes());
    }

    #[test]
    fn non_map_is_rejected() {
        let z2 = RealBipoly::abs_sq(2, 0);
        let rho = &(&RealBipoly::im_of(&HoloPoly::var(2, 1)) - &z2) + &z2.pow(2);
        let m = Hypersurface::new("quartic", rho).unwrap();
        let r = verify_map_sends(&PolyMap::identity(2), &m, &model(2), &MapCheckMode::Exact).unwrap();
        assert!(matches!(r, MapVerdict::ExactNo { .. }), "{r:?}");
    }

    #[test]
    fn map_json_round_trip() {
        let z = HoloPoly::var(2, 0);
        let f = PolyMap::new(2, vec![&z * &z, HoloPoly::var(2, 1)]).unwrap();
        let text = serde_json::to_string(&f.to_json()).unwrap();
        assert_eq!(PolyMap::from_json_str(&text).unwrap(), f);
    }
}
