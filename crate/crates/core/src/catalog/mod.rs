//! Named hypersurfaces with parameter validation and expected-invariant checks.

mod checks;

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;
use thiserror::Error;

use crate::cmw::ObstructionOutcome;
use crate::hermpoly::json::rational_to_string;
use crate::hermpoly::rational::{parse_rational, rat};
use crate::hermpoly::{ComplexRational, HoloPoly, MultiIndex, PolyError, RealBipoly};
use crate::levi::{kn_parameter_check, Hypersurface, LeviError, LeviVerdict};
use crate::segremap::PolyMap;

pub use checks::{run_expected_checks, CheckOptions, CheckReport, CheckResult};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatalogError {
    #[error("unknown catalog entry '{0}'")]
    UnknownEntry(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Levi(#[from] LeviError),
}

/// Where points are drawn for a scan check.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum ScanSpec {
    /// Rays from the origin.
    Radial { max_abs: Option<Vec<Option<f64>>> },
    /// Base points in a ball around the origin, projected along one coordinate axis (times `i` if `imaginary`).
    Axis { radius: f64, axis: usize, imaginary: bool },
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum ScanExpect {
    /// No mixed verdicts and no raw negative eigenvalues; points farther than `exclusion.1` from `exclusion.0`
    /// (or all points) are strongly pseudoconvex.
    Pseudoconvex { exclusion: Option<(Vec<ComplexRational>, f64)>, min_abs_z0: Option<f64> },
    /// Every sample has the given ℓ and a nondegenerate Levi form.
    Signature { ell: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum CheckKind {
    KnBound { l: u32, k: u32, c: BigRational },
    LineType { point: Vec<ComplexRational>, direction: Vec<ComplexRational>, expected: u32 },
    LeviAt { point: Vec<ComplexRational>, expected: Vec<LeviVerdict>, raw_signs: Option<Vec<i8>> },
    Transversality { h: HoloPoly, point: Vec<ComplexRational>, radius: f64, min_margin: f64 },
    Scan { spec: ScanSpec, count: usize, expect: ScanExpect },
    /// Bordered determinant proportional to the given factor.
    LocusFactor { factor: RealBipoly },
    /// Degenerate-circle sampling: `|z| = radius` on the graph `Im w = |z|² − |z|⁴`.
    CircleLocusSampling { radius: BigRational, count: usize },
    /// Levi-degenerate along `|z| = |w|` on a Reinhardt surface: on-locus residual vs off-locus margin.
    ReinhardtLocusSampling { count: usize, on_tol: f64, off_margin: f64 },
    /// The axis `z = 0` lies in the degenerate locus.
    ReinhardtAxes { count: usize },
    MapExact { target: RealBipoly, map: PolyMap, cofactor: Option<RealBipoly> },
    Obstruction { point: Vec<ComplexRational>, expected: ObstructionOutcome, zero_tensor: Option<bool> },
    /// Exact tensor values at `e_1 + e_{ℓ+1}` and `e_2 + e_n` equal `−4a` and `4a`.
    ConeWitnesses { point: Vec<ComplexRational>, ell: usize, a: BigRational },
    SegreReflexive { points: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpectedCheck {
    pub name: String,
    pub expected: String,
    pub anchor: String,
    pub(crate) kind: CheckKind,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub id: String,
    pub params: BTreeMap<String, BigRational>,
    pub display: String,
    pub surface: Hypersurface,
    /// Distinguished point, when the entry has one.
    pub base_point: Option<Vec<ComplexRational>>,
    pub expected: Vec<ExpectedCheck>,
    pub metadata: BTreeMap<String, String>,
}

impl CatalogEntry {
    pub fn surface_json(&self) -> String {
        crate::hermpoly::json::surface_to_string(self.surface.rho(), Some(&self.id))
    }

    pub fn params_display(&self) -> BTreeMap<String, String> {
        self.params.iter().map(|(k, v)| (k.clone(), rational_to_string(v))).collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EntryInfo {
    pub id: &'static str,
    pub description: &'static str,
    pub defaults: Vec<(&'static str, &'static str)>,
}

pub fn list() -> Vec<EntryInfo> {
    vec![
        EntryInfo { id: "kn", description: "Kohn-Nirenberg domain boundary in C^2", defaults: vec![("l", "1"), ("k", "4"), ("c", "15/7")] },
        EntryInfo {
            id: "kn-compact",
            description: "compactified Kohn-Nirenberg domain boundary in C^2",
            defaults: vec![("eps", "1/100"), ("l", "1"), ("k", "4"), ("c", "15/7")],
        },
        EntryInfo {
            id: "kn-highdim",
            description: "compactified Kohn-Nirenberg boundary extended by |z'|^2 in C^n",
            defaults: vec![("n", "3"), ("eps", "1/100"), ("l", "1"), ("k", "4"), ("c", "15/7")],
        },
        EntryInfo { id: "mixed-quartic", description: "Im z_n = sum_{j<n} |z_j|^2 - |z_1|^4", defaults: vec![("n", "3")] },
        EntryInfo { id: "degenerate-circle", description: "Im w = |z|^2 - |z|^4", defaults: vec![] },
        EntryInfo { id: "reinhardt", description: "(|z|^2+|w|^2)^4 + (|z|^2-|w|^2)^4 = 1", defaults: vec![] },
        EntryInfo { id: "reinhardt-image", description: "(|z|+|w|)^4 + (|z|-|w|)^4 = 1", defaults: vec![] },
        EntryInfo {
            id: "ra-truncated",
            description: "|w|^2 + |z|^2 + eps Re sum_{k=2}^{kmax} z^k zbar^{(k+2)!} = 1/2",
            defaults: vec![("kmax", "2"), ("eps", "1/100000000")],
        },
        EntryInfo {
            id: "m-eps",
            description: "quartic perturbation of a hyperquadric in the affine chart at P0",
            defaults: vec![("n", "5"), ("ell", "2"), ("eps", "1/1000")],
        },
        EntryInfo { id: "quadric", description: "-sum_{j<=ell}|z_j|^2 + sum_{j>ell}|z_j|^2 = 1", defaults: vec![("n", "2"), ("ell", "0")] },
        EntryInfo {
            id: "hyperquadric-l",
            description: "Im z_{n+1} = -sum_{j<=ell}|z_j|^2 + sum_{j>ell}|z_j|^2",
            defaults: vec![("n", "3"), ("ell", "1")],
        },
    ]
}

/// Parses `k=4,l=1,c=15/7`.
pub fn parse_params(text: &str) -> Result<BTreeMap<String, BigRational>, CatalogError> {
    let mut out = BTreeMap::new();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| CatalogError::InvalidParams(format!("expected key=value, got '{part}'")))?;
        out.insert(k.trim().to_string(), parse_rational(v.trim())?);
    }
    Ok(out)
}

struct Params {
    given: BTreeMap<String, BigRational>,
    used: BTreeMap<String, BigRational>,
}

impl Params {
    fn new(given: &BTreeMap<String, BigRational>, allowed: &[&str]) -> Result<Self, CatalogError> {
        if let Some(k) = given.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(CatalogError::InvalidParams(format!("unknown parameter '{k}' (allowed: {})", allowed.join(", "))));
        }
        Ok(Self { given: given.clone(), used: BTreeMap::new() })
    }

    fn rational(&mut self, key: &str, default: BigRational) -> BigRational {
        let v = self.given.get(key).cloned().unwrap_or(default);
        self.used.insert(key.to_string(), v.clone());
        v
    }

    fn integer(&mut self, key: &str, default: i64) -> Result<u32, CatalogError> {
        let v = self.rational(key, BigRational::from_integer(default.into()));
        if !v.is_integer() || v.is_negative() {
            return Err(CatalogError::InvalidParams(format!("{key} must be a nonnegative integer, got {v}")));
        }
        v.to_integer()
            .to_u32()
            .ok_or_else(|| CatalogError::InvalidParams(format!("{key} = {v} is too large")))
    }
}

fn cr(v: i64) -> ComplexRational {
    ComplexRational::from_ints(v, 0)
}

fn origin(n: usize) -> Vec<ComplexRational> {
    vec![ComplexRational::zero(); n]
}

fn unit_point(n: usize, j: usize) -> Vec<ComplexRational> {
    let mut p = origin(n);
    p[j] = ComplexRational::one();
    p
}

/// `|z_j|^{2e}`
fn abs_pow(n: usize, j: usize, e: u32) -> RealBipoly {
    RealBipoly::abs_sq(n, j).pow(e)
}

/// `c · Re(z_j^a z̄_j^b)`
fn re_power(n: usize, j: usize, a: u32, b: u32, c: &BigRational) -> RealBipoly {
    let mut ea = vec![0; n];
    ea[j] = a;
    let mut eb = vec![0; n];
    eb[j] = b;
    RealBipoly::re_monomial(MultiIndex(ea), MultiIndex(eb), ComplexRational::real(c.clone()))
}

fn check(name: &str, expected: &str, anchor: &str, kind: CheckKind) -> ExpectedCheck {
    ExpectedCheck { name: name.into(), expected: expected.into(), anchor: anchor.into(), kind }
}

fn validate_kn(l: u32, k: u32, c: &BigRational) -> Result<(), CatalogError> {
    let r = kn_parameter_check(l, k, c).map_err(|e| CatalogError::InvalidParams(e.to_string()))?;
    match r.violated {
        Some(v) => Err(CatalogError::InvalidParams(v)),
        None => Ok(()),
    }
}

/// `ε(|z_j(w−1)|² + |z_j|^{2k} + c|z_j|^{2l} Re z_j^{2k−2l}) + |w|² + |z_j|^{2k+2}` in `n` variables, `w` last.
fn compact_kn_core(n: usize, j: usize, eps: &BigRational, l: u32, k: u32, c: &BigRational) -> RealBipoly {
    let w = n - 1;
    let wm1 = &HoloPoly::var(n, w) - &HoloPoly::one(n);
    let zw = &HoloPoly::var(n, j) * &wm1;
    let abs_zw = RealBipoly::new(crate::hermpoly::Bipoly::from_holo(&zw) * crate::hermpoly::Bipoly::from_antiholo(&zw))
        .expect("|h|^2 is real");
    // |z|^{2l} Re z^{2k−2l} = Re(z^{2k−l} z̄^l)
    let inner = &(&abs_zw + &abs_pow(n, j, k)) + &re_power(n, j, 2 * k - l, l, c);
    &(&inner.scale(eps) + &RealBipoly::abs_sq(n, w)) + &abs_pow(n, j, k + 1)
}

pub fn make(id: &str, params: &BTreeMap<String, BigRational>) -> Result<CatalogEntry, CatalogError> {
    let mut metadata = BTreeMap::new();
    let (display, rho, base_point, expected, used): (String, RealBipoly, Option<Vec<ComplexRational>>, Vec<ExpectedCheck>, _) =
        match id {
            "kn" => {
                let mut p = Params::new(params, &["l", "k", "c"])?;
                let (l, k) = (p.integer("l", 1)?, p.integer("k", 4)?);
                let c = p.rational("c", rat(15, 7));
                validate_kn(l, k, &c)?;
                let n = 2;
                let rho = &(&-&RealBipoly::im_of(&HoloPoly::var(n, 1)) + &abs_pow(n, 0, k)) + &re_power(n, 0, l, 2 * k - l, &c);
                metadata.insert("bi-type".into(), format!("({l}, {})", 2 * k - l));
                metadata.insert("type at 0".into(), format!("{}", 2 * k));
                let expected = vec![
                    check("kn-parameter-bound", "2 < |c| < k^2/(l(2k-l)) holds", "Kohn-Nirenberg parameter range", CheckKind::KnBound { l, k, c: c.clone() }),
                    check(
                        "line-type-at-0",
                        &format!("{}", 2 * k),
                        "type 2k at the origin",
                        CheckKind::LineType { point: origin(2), direction: vec![cr(1), cr(0)], expected: 2 * k },
                    ),
                    check(
                        "strongly-pseudoconvex-off-L0",
                        "no negative Levi eigenvalue; strongly pseudoconvex for |z| > 0.1",
                        "positive Levi form away from z = 0",
                        CheckKind::Scan {
                            spec: ScanSpec::Axis { radius: 0.5, axis: 1, imaginary: true },
                            count: 400,
                            expect: ScanExpect::Pseudoconvex { exclusion: None, min_abs_z0: Some(0.1) },
                        },
                    ),
                    check(
                        "kn-property-probe",
                        "transversal intersection with {w = 0} near 0",
                        "Kohn-Nirenberg property at the origin",
                        CheckKind::Transversality { h: HoloPoly::var(2, 1), point: origin(2), radius: 0.5, min_margin: 1e-6 },
                    ),
                ];
                (format!("-Im w + |z|^{} + {} Re(z^{l} zbar^{})", 2 * k, c, 2 * k - l), rho, Some(origin(2)), expected, p.used)
            }
            "kn-compact" | "kn-highdim" => {
                let high = id == "kn-highdim";
                let allowed: &[&str] = if high { &["n", "eps", "l", "k", "c"] } else { &["eps", "l", "k", "c"] };
                let mut p = Params::new(params, allowed)?;
                let n = if high { p.integer("n", 3)? as usize } else { 2 };
                let eps = p.rational("eps", rat(1, 100));
                let (l, k) = (p.integer("l", 1)?, p.integer("k", 4)?);
                let c = p.rational("c", rat(15, 7));
                validate_kn(l, k, &c)?;
                if !eps.is_positive() {
                    return Err(CatalogError::InvalidParams(format!("0 < eps violated: eps = {eps}")));
                }
                if high && n < 3 {
                    return Err(CatalogError::InvalidParams(format!("n >= 3 violated: n = {n}")));
                }
                let mut rho = compact_kn_core(n, 0, &eps, l, k, &c);
                for j in 1..n - 1 {
                    rho = &rho + &RealBipoly::abs_sq(n, j);
                }
                rho = &rho - &RealBipoly::one(n);
                let p0 = unit_point(n, n - 1);
                metadata.insert("bi-type".into(), format!("({l}, {})", 2 * k - l));
                let mut expected = vec![check(
                    "degenerate-at-p0",
                    "Levi form degenerate at p0 = (0, ..., 0, 1)",
                    "weakly pseudoconvex point p0",
                    CheckKind::LeviAt {
                        point: p0.clone(),
                        expected: if high {
                            vec![LeviVerdict::WeaklyPseudoconvexDegenerate]
                        } else {
                            vec![LeviVerdict::Degenerate, LeviVerdict::WeaklyPseudoconvexDegenerate]
                        },
                        raw_signs: None,
                    },
                )];
                expected.push(check(
                    "strongly-pseudoconvex-away-from-p0",
                    "no mixed signature, no negative eigenvalue; strongly pseudoconvex at distance > 0.2 from p0",
                    "pseudoconvex and strongly pseudoconvex away from p0",
                    CheckKind::Scan {
                        spec: ScanSpec::Radial { max_abs: None },
                        count: if high { 500 } else { 2000 },
                        expect: ScanExpect::Pseudoconvex { exclusion: Some((p0.clone(), 0.2)), min_abs_z0: None },
                    },
                ));
                if !high {
                    let h = &HoloPoly::var(2, 1) - &HoloPoly::one(2);
                    // ρ < 0 on {w = 1} only where |z|² < ε(|c| − 1); the contact there is of order 2k, so ∂_z ρ is tiny
                    let radius = crate::hermpoly::rational::rat_to_f64(&(&eps * (c.abs() - BigRational::from_integer(1.into())))).sqrt();
                    expected.push(check(
                        "kn-property-probe",
                        "transversal intersection with {w = 1} near p0",
                        "Kohn-Nirenberg property at p0",
                        CheckKind::Transversality { h, point: p0.clone(), radius, min_margin: 1e-13 },
                    ));
                }
                let display = if high {
                    format!("eps(|z1(w-1)|^2 + |z1|^{} + c|z1|^{} Re z1^{}) + |w|^2 + |z'|^2 + |z1|^{} = 1", 2 * k, 2 * l, 2 * k - 2 * l, 2 * k + 2)
                } else {
                    format!("eps(|z(w-1)|^2 + |z|^{} + c|z|^{} Re z^{}) + |w|^2 + |z|^{} = 1", 2 * k, 2 * l, 2 * k - 2 * l, 2 * k + 2)
                };
                (display, rho, Some(p0), expected, p.used)
            }
            "mixed-quartic" => {
                let mut p = Params::new(params, &["n"])?;
                let n = p.integer("n", 3)? as usize;
                if n < 3 {
                    return Err(CatalogError::InvalidParams(format!("n >= 3 violated: n = {n}")));
                }
                let mut rho = -&RealBipoly::im_of(&HoloPoly::var(n, n - 1));
                for j in 0..n - 1 {
                    rho = &rho + &RealBipoly::abs_sq(n, j);
                }
                rho = &rho - &abs_pow(n, 0, 2);
                let expected = vec![
                    check(
                        "strongly-pseudoconvex-at-0",
                        "StronglyPseudoconvex",
                        "strongly pseudoconvex near 0",
                        CheckKind::LeviAt { point: origin(n), expected: vec![LeviVerdict::StronglyPseudoconvex], raw_signs: None },
                    ),
                    check(
                        "mixed-at-e1",
                        "MixedSignature with raw eigenvalue signs (-, +, ...)",
                        "mixed Levi signature point",
                        CheckKind::LeviAt {
                            point: unit_point(n, 0),
                            expected: vec![LeviVerdict::MixedSignature],
                            raw_signs: Some(std::iter::once(-1).chain(std::iter::repeat_n(1, n - 2)).collect()),
                        },
                    ),
                ];
                ("Im z_n = sum_{j<n} |z_j|^2 - |z_1|^4".into(), rho, Some(origin(n)), expected, p.used)
            }
            "degenerate-circle" => {
                let p = Params::new(params, &[])?;
                let n = 2;
                let rho = &(&RealBipoly::abs_sq(n, 0) - &abs_pow(n, 0, 2)) - &RealBipoly::im_of(&HoloPoly::var(n, 1));
                let factor = &RealBipoly::one(n) - &RealBipoly::abs_sq(n, 0).scale(&rat(4, 1));
                let expected = vec![
                    check(
                        "degenerate-locus-factor",
                        "bordered determinant proportional to 1 - 4|z|^2",
                        "Levi-degenerate set |z| = 1/2",
                        CheckKind::LocusFactor { factor },
                    ),
                    check(
                        "degenerate-locus-sampling",
                        "zero exactly on |z| = 1/2 over 1000 samples",
                        "Levi-degenerate set |z| = 1/2",
                        CheckKind::CircleLocusSampling { radius: rat(1, 2), count: 1000 },
                    ),
                ];
                ("Im w = |z|^2 - |z|^4".into(), rho, Some(origin(2)), expected, p.used)
            }
            "reinhardt" | "reinhardt-image" => {
                let p = Params::new(params, &[])?;
                let n = 2;
                let e = if id == "reinhardt" { 2 } else { 1 };
                let (z, w) = (RealBipoly::abs_sq(n, 0).pow(e), RealBipoly::abs_sq(n, 1).pow(e));
                let rho = &(&(&z.pow(2).scale(&rat(2, 1)) + &(&z * &w).scale(&rat(12, 1))) + &w.pow(2).scale(&rat(2, 1)))
                    - &RealBipoly::one(n);
                let mut expected = Vec::new();
                if id == "reinhardt" {
                    let image = make("reinhardt-image", &BTreeMap::new())?;
                    let map = PolyMap::new(2, vec![HoloPoly::var(2, 0).pow(2), HoloPoly::var(2, 1).pow(2)])
                        .expect("dimensions match");
                    expected.push(check(
                        "map-check-squares",
                        "ExactYes with cofactor 1",
                        "(z, w) -> (z^2, w^2) onto the image surface",
                        CheckKind::MapExact { target: image.surface.rho().clone(), map, cofactor: Some(RealBipoly::one(2)) },
                    ));
                    expected.push(check(
                        "degenerate-locus-|z|=|w|",
                        "bordered determinant vanishes on |z| = |w| (500 points, 1e-9) and not off it (500 points, margin 1e-4)",
                        "Levi-degenerate along |z| = |w|",
                        CheckKind::ReinhardtLocusSampling { count: 500, on_tol: 1e-9, off_margin: 1e-4 },
                    ));
                    expected.push(check(
                        "degenerate-on-axes",
                        "bordered determinant vanishes on M along z = 0 and w = 0",
                        "Levi form of a Reinhardt hypersurface at the coordinate axes",
                        CheckKind::ReinhardtAxes { count: 200 },
                    ));
                    expected.push(check(
                        "pseudoconvex",
                        "no mixed signature and no negative eigenvalue over 500 samples",
                        "pseudoconvex compact Reinhardt boundary",
                        CheckKind::Scan {
                            spec: ScanSpec::Radial { max_abs: None },
                            count: 500,
                            expect: ScanExpect::Pseudoconvex { exclusion: None, min_abs_z0: None },
                        },
                    ));
                    metadata.insert("stored form".into(), "2|z|^8 + 12|z|^4|w|^4 + 2|w|^8 - 1".into());
                    ("(|z|^2+|w|^2)^4 + (|z|^2-|w|^2)^4 = 1".into(), rho, None, expected, p.used)
                } else {
                    metadata.insert("stored form".into(), "2|z|^4 + 12|z|^2|w|^2 + 2|w|^4 - 1".into());
                    ("(|z|+|w|)^4 + (|z|-|w|)^4 = 1".into(), rho, None, expected, p.used)
                }
            }
            "ra-truncated" => {
                let mut p = Params::new(params, &["kmax", "eps"])?;
                let kmax = p.integer("kmax", 2)?;
                let eps = p.rational("eps", rat(1, 100_000_000));
                if !(2..=3).contains(&kmax) {
                    return Err(CatalogError::InvalidParams(format!("2 <= kmax <= 3 violated: kmax = {kmax}")));
                }
                if !eps.is_positive() || eps >= rat(1, 100) {
                    return Err(CatalogError::InvalidParams(format!("0 < eps < 1/100 violated: eps = {eps}")));
                }
                let n = 2;
                let mut rho = &(&RealBipoly::abs_sq(n, 1) + &RealBipoly::abs_sq(n, 0)) - &RealBipoly::constant(n, rat(1, 2));
                for k in 2..=kmax {
                    let fact: u32 = (1..=k + 2).product();
                    rho = &rho + &re_power(n, 0, k, fact, &eps);
                }
                metadata.insert("truncation".into(), format!("series truncated at k = {kmax}"));
                let expected = vec![check(
                    "strongly-pseudoconvex-scan",
                    "all 2000 samples with |z| <= 0.9 strongly pseudoconvex",
                    "compact strongly pseudoconvex hypersurface",
                    CheckKind::Scan {
                        spec: ScanSpec::Radial { max_abs: Some(vec![Some(0.9), None]) },
                        count: 2000,
                        expect: ScanExpect::Pseudoconvex { exclusion: None, min_abs_z0: None },
                    },
                )];
                (format!("|w|^2 + |z|^2 + eps Re sum_(k=2..{kmax}) z^k zbar^((k+2)!) = 1/2"), rho, None, expected, p.used)
            }
            "m-eps" => {
                let mut p = Params::new(params, &["n", "ell", "eps"])?;
                let n = p.integer("n", 5)? as usize;
                let ell = p.integer("ell", 2)? as usize;
                let eps = p.rational("eps", rat(1, 1000));
                if !(ell > 1 && 2 * ell <= n) {
                    return Err(CatalogError::InvalidParams(format!("1 < ell <= n/2 violated: ell = {ell}, n = {n}")));
                }
                if !eps.is_positive() {
                    return Err(CatalogError::InvalidParams(format!("0 < eps violated: eps = {eps}")));
                }
                let rho = m_eps_chart(n, ell, &eps);
                let nn = n + 1;
                metadata.insert("chart".into(), "Z = (1+s, eta_1..eta_ell, 1-s, eta_ell+1..eta_n), times 1/2; variables (eta, s)".into());
                metadata.insert("expected a".into(), rational_to_string(&(&eps / BigRational::from_integer(2.into()))));
                let expected = vec![
                    check(
                        "signature-scan",
                        &format!("ell = {ell} and nondegenerate at all 500 samples"),
                        "nondegenerate Levi form of signature ell at every point",
                        CheckKind::Scan {
                            spec: ScanSpec::Axis { radius: 1.0, axis: n, imaginary: false },
                            count: 500,
                            expect: ScanExpect::Signature { ell },
                        },
                    ),
                    check(
                        "cone-witnesses",
                        "tensor values -4a at X1 = e_1 + e_{ell+1} and 4a at X2 = e_2 + e_n, a = eps/2",
                        "values of opposite sign at X1 and X2",
                        CheckKind::ConeWitnesses { point: origin(nn), ell, a: &eps / BigRational::from_integer(2.into()) },
                    ),
                    check(
                        "obstruction-at-P0",
                        "Fires",
                        "no holomorphic embedding into a hyperquadric of signature ell",
                        CheckKind::Obstruction { point: origin(nn), expected: ObstructionOutcome::Fires, zero_tensor: Some(false) },
                    ),
                ];
                let display = format!(
                    "|Z|^2(-sum_(j<={ell})|Z_j|^2 + sum_(j>{ell})|Z_j|^2) + eps(|Z_1|^4 - |Z_{}|^4) = 0 in P^{}, affine chart at P0",
                    n + 1,
                    n + 1
                );
                (display, rho, Some(origin(nn)), expected, p.used)
            }
            "quadric" => {
                let mut p = Params::new(params, &["n", "ell"])?;
                let n = p.integer("n", 2)? as usize;
                let ell = p.integer("ell", 0)? as usize;
                if n < 2 || ell >= n {
                    return Err(CatalogError::InvalidParams(format!("n >= 2 and ell < n violated: n = {n}, ell = {ell}")));
                }
                let mut rho = -&RealBipoly::one(n);
                for j in 0..n {
                    let t = RealBipoly::abs_sq(n, j);
                    rho = if j < ell { &rho - &t } else { &rho + &t };
                }
                let p0 = unit_point(n, n - 1);
                let outcome = if ell == 0 || ell == n - 1 { ObstructionOutcome::Vacuous } else { ObstructionOutcome::DoesNotFire };
                let expected = vec![
                    check(
                        "obstruction",
                        &format!("{outcome:?} with zero tensor"),
                        "model quadric",
                        CheckKind::Obstruction { point: p0.clone(), expected: outcome, zero_tensor: Some(true) },
                    ),
                    check("segre-reflexive", "z in Q_w iff w in Q_z, exactly", "Segre variety symmetry", CheckKind::SegreReflexive { points: 20 }),
                ];
                (format!("-sum_(j<={ell})|z_j|^2 + sum_(j>{ell})|z_j|^2 = 1"), rho, Some(p0), expected, p.used)
            }
            "hyperquadric-l" => {
                let mut p = Params::new(params, &["n", "ell"])?;
                let n = p.integer("n", 3)? as usize;
                let ell = p.integer("ell", 1)? as usize;
                if n < 1 || ell > n {
                    return Err(CatalogError::InvalidParams(format!("n >= 1 and ell <= n violated: n = {n}, ell = {ell}")));
                }
                let nn = n + 1;
                let mut rho = -&RealBipoly::im_of(&HoloPoly::var(nn, n));
                for j in 0..n {
                    let t = RealBipoly::abs_sq(nn, j);
                    rho = if j < ell { &rho - &t } else { &rho + &t };
                }
                let oriented = ell.min(n - ell);
                let outcome = if oriented == 0 { ObstructionOutcome::Vacuous } else { ObstructionOutcome::DoesNotFire };
                let verdict = if oriented == 0 { LeviVerdict::StronglyPseudoconvex } else { LeviVerdict::MixedSignature };
                let expected = vec![
                    check(
                        "levi-at-0",
                        &format!("{verdict:?}"),
                        "model hyperquadric of signature ell",
                        CheckKind::LeviAt { point: origin(nn), expected: vec![verdict], raw_signs: None },
                    ),
                    check(
                        "obstruction",
                        &format!("{outcome:?} with zero tensor"),
                        "model hyperquadric",
                        CheckKind::Obstruction { point: origin(nn), expected: outcome, zero_tensor: Some(true) },
                    ),
                    check("segre-reflexive", "z in Q_w iff w in Q_z, exactly", "Segre variety symmetry", CheckKind::SegreReflexive { points: 20 }),
                ];
                (format!("Im z_(n+1) = -sum_(j<={ell})|z_j|^2 + sum_(j>{ell})|z_j|^2"), rho, Some(origin(nn)), expected, p.used)
            }
            other => return Err(CatalogError::UnknownEntry(other.to_string())),
        };
    let surface = Hypersurface::new(id, rho)?;
    Ok(CatalogEntry { id: id.to_string(), params: used, display, surface, base_point, expected, metadata })
}

/// `(1 + |s|² + ½|η|²)(−4 Re s + |η|²_ℓ) + (ε/2)(|η_1|⁴ − |η_n|⁴)` in variables `(η_1, …, η_n, s)`.
pub fn m_eps_chart(n: usize, ell: usize, eps: &BigRational) -> RealBipoly {
    let nn = n + 1;
    let s = n;
    let mut eta_sq = RealBipoly::zero(nn);
    let mut eta_l = RealBipoly::zero(nn);
    for j in 0..n {
        let t = RealBipoly::abs_sq(nn, j);
        eta_sq = &eta_sq + &t;
        eta_l = if j < ell { &eta_l - &t } else { &eta_l + &t };
    }
    let factor = &(&RealBipoly::one(nn) + &RealBipoly::abs_sq(nn, s)) + &eta_sq.scale(&rat(1, 2));
    let form = &RealBipoly::re_of(&HoloPoly::var(nn, s)).scale(&rat(-4, 1)) + &eta_l;
    let quartic = &abs_pow(nn, 0, 2) - &abs_pow(nn, n - 1, 2);
    &(&factor * &form) + &quartic.scale(&(eps / BigRational::from_integer(2.into())))
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub eps: String,
    pub samples: usize,
    /// Samples whose Levi form is nondegenerate of signature `ell`.
    pub matching: usize,
    pub constant: bool,
}

/// Signature scans of the `m-eps` chart over a list of `ε`; the largest `ε` of an unbroken run of
/// constant-signature rows is an empirical bound only.
pub fn m_eps_signature_sweep(
    n: usize,
    ell: usize,
    eps_values: &[BigRational],
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<Vec<SweepRow>, CatalogError> {
    let mut rows = Vec::new();
    for eps in eps_values {
        let m = Hypersurface::new("m-eps", m_eps_chart(n, ell, eps))?;
        let zero = vec![num_complex::Complex64::new(0.0, 0.0); n + 1];
        let mut dir = zero.clone();
        dir[n] = num_complex::Complex64::new(1.0, 0.0);
        let cfg = crate::levi::SamplerConfig::fixed(zero, 1.0, dir);
        let scan = crate::levi::pseudoconvexity_scan(&m, &cfg, samples, seed, tol)?;
        let matching = scan.samples.iter().filter(|s| s.report.ell == ell && s.report.signature.n_zero == 0).count();
        rows.push(SweepRow { eps: rational_to_string(eps), samples: scan.samples.len(), matching, constant: matching == scan.samples.len() });
    }
    Ok(rows)
}

/// Exact `ρ(p)`, for checking that a base point lies on the surface.
pub fn value_at(entry: &CatalogEntry, p: &[ComplexRational]) -> Result<BigRational, CatalogError> {
    Ok(entry.surface.rho().eval_exact_real(p)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn params_parse_and_validate() {
        let p = parse_params("k=4, l=1,c=15/7").unwrap();
        assert_eq!(p["c"], rat(15, 7));
        assert!(make("kn", &p).is_ok());
        let bad = parse_params("c=3").unwrap();
        assert!(matches!(make("kn", &bad), Err(CatalogError::InvalidParams(_))));
        assert!(matches!(make("kn", &parse_params("q=1").unwrap()), Err(CatalogError::InvalidParams(_))));
        assert!(matches!(make("m-eps", &parse_params("n=3,ell=2").unwrap()), Err(CatalogError::InvalidParams(_))));
        assert!(matches!(make("nope", &BTreeMap::new()), Err(CatalogError::UnknownEntry(_))));
        assert!(parse_params("k").is_err());
    }

    #[test]
    fn every_entry_builds_with_defaults() {
        for info in list() {
            let e = make(info.id, &BTreeMap::new()).unwrap();
            if let Some(p) = &e.base_point {
                assert!(value_at(&e, p).unwrap().is_zero(), "{} base point off the surface", info.id);
            }
        }
    }

    #[test]
    fn m_eps_matches_projective_form_at_p0() {
        let (n, ell, eps) = (4, 2, rat(1, 10));
        let rho = m_eps_chart(n, ell, &eps);
        assert!(rho.constant_term().is_zero());
        // |z|²(−Σ_{j≤ℓ}|z_j|² + Σ_{j>ℓ}|z_j|²) + ε(|z_1|⁴ − |z_{n+1}|⁴) at the homogeneous point
        // (1+s, η_1..η_ℓ, 1−s, η_{ℓ+1}..η_n); the chart is half of it.
        let projective = |x: &[ComplexRational]| {
            let (eta, s) = (&x[..n], &x[n]);
            let one = ComplexRational::one();
            let mut z = vec![&one + s];
            z.extend(eta[..ell].iter().cloned());
            z.push(&one - s);
            z.extend(eta[ell..].iter().cloned());
            let abs: Vec<BigRational> = z.iter().map(ComplexRational::norm_sqr).collect();
            let total: BigRational = abs.iter().sum();
            let signed = abs.iter().enumerate().fold(BigRational::zero(), |acc, (j, a)| if j <= ell { acc - a } else { acc + a });
            total * signed + &eps * (&abs[1] * &abs[1] - &abs[n + 1] * &abs[n + 1])
        };
        let points = [[(1, 2), (0, 1), (-1, 3), (2, 5), (1, 7)], [(3, 4), (-2, 3), (1, 1), (0, 2), (-1, 5)]];
        for pts in points {
            let x: Vec<ComplexRational> =
                pts.iter().enumerate().map(|(j, &(a, b))| ComplexRational::new(rat(a, j as i64 + 2), rat(b, 3))).collect();
            assert_eq!(rho.eval_exact_real(&x).unwrap() * rat(2, 1), projective(&x));
        }
    }
}
