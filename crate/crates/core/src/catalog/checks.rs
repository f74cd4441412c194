use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::Rng;
use serde::Serialize;

use super::{CatalogEntry, CheckKind, ScanExpect, ScanSpec};
use crate::cmw::{cmw_tensor, hyperquadric_obstruction, prepare_at_point, ConeConfig, ObstructionConfig};
use crate::hermpoly::json::rational_to_string;
use crate::hermpoly::rational::rat;
use crate::hermpoly::ComplexRational;
use crate::levi::{
    bordered_determinant_at, degenerate_locus_polynomial, kn_parameter_check, kn_transversality_probe, levi_signature,
    line_type, pseudoconvexity_scan, sample_points, to_c64_point, Hypersurface, LeviVerdict, SamplerConfig,
    TransversalityConfig, TransversalityOutcome,
};
use crate::parallel::stream_rng;
use crate::segremap::{segre_value_exact, verify_map_sends, MapCheckMode, MapVerdict};

#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub seed: u64,
    pub tol: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self { seed: 0, tol: 1e-9 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub expected: String,
    pub observed: String,
    pub passed: bool,
    pub anchor: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub entry: String,
    pub params: std::collections::BTreeMap<String, String>,
    pub seed: u64,
    pub tol: f64,
    pub results: Vec<CheckResult>,
    pub all_passed: bool,
}

type Outcome = (bool, String);

pub fn run_expected_checks(entry: &CatalogEntry, opts: &CheckOptions) -> CheckReport {
    let results: Vec<CheckResult> = entry
        .expected
        .iter()
        .map(|c| {
            let (passed, observed) = run_one(entry, &c.kind, opts).unwrap_or_else(|e| (false, format!("error: {e}")));
            CheckResult { name: c.name.clone(), expected: c.expected.clone(), observed, passed, anchor: c.anchor.clone() }
        })
        .collect();
    CheckReport {
        entry: entry.id.clone(),
        params: entry.params_display(),
        seed: opts.seed,
        tol: opts.tol,
        all_passed: results.iter().all(|r| r.passed),
        results,
    }
}

fn run_one(entry: &CatalogEntry, kind: &CheckKind, opts: &CheckOptions) -> Result<Outcome, String> {
    let m = &entry.surface;
    let n = m.n_ambient();
    let err = |e: &dyn std::fmt::Display| e.to_string();
    match kind {
        CheckKind::KnBound { l, k, c } => {
            let r = kn_parameter_check(*l, *k, c).map_err(|e| err(&e))?;
            Ok((r.valid, format!("bound k^2/(l(2k-l)) = {}, |c| = {}", r.bound, c.abs())))
        }
        CheckKind::LineType { point, direction, expected } => {
            let r = line_type(m, point, std::slice::from_ref(direction)).map_err(|e| err(&e))?;
            let observed = r.max_order.map_or("no finite order".to_string(), |o| o.to_string());
            Ok((r.max_order == Some(*expected), observed))
        }
        CheckKind::LeviAt { point, expected, raw_signs } => {
            let r = levi_signature(m, &to_c64_point(point), opts.tol).map_err(|e| err(&e))?;
            let signs: Vec<i8> = r.eigenvalues.iter().map(|&l| if l > 0.0 { 1 } else if l < 0.0 { -1 } else { 0 }).collect();
            let signs_ok = raw_signs.as_ref().is_none_or(|s| *s == signs);
            Ok((expected.contains(&r.verdict) && signs_ok, format!("{:?}, eigenvalues {:?}", r.verdict, r.eigenvalues)))
        }
        CheckKind::Transversality { h, point, radius, min_margin } => {
            let cfg = TransversalityConfig { seed: opts.seed, radius: *radius, min_margin: *min_margin, ..Default::default() };
            match kn_transversality_probe(m, h, &to_c64_point(point), &cfg).map_err(|e| err(&e))? {
                TransversalityOutcome::Witness(w) => Ok((true, format!("witness at {:?}, margin {:.3e}", w.point, w.margin))),
                TransversalityOutcome::NotFound { attempts } => Ok((false, format!("no witness in {attempts} attempts"))),
            }
        }
        CheckKind::Scan { spec, count, expect } => run_scan(m, spec, *count, expect, opts),
        CheckKind::LocusFactor { factor } => {
            let det = degenerate_locus_polynomial(m).map_err(|e| err(&e))?;
            match det.proportional_to(factor) {
                Some(c) if c.is_real() && !c.is_zero() => Ok((true, format!("determinant = ({c}) * factor"))),
                _ => Ok((false, format!("determinant {det} is not a multiple of {factor}"))),
            }
        }
        CheckKind::CircleLocusSampling { radius, count } => circle_locus(m, radius, *count, opts.seed),
        CheckKind::ReinhardtLocusSampling { count, on_tol, off_margin } => {
            reinhardt_locus(m, *count, *on_tol, *off_margin, opts.seed)
        }
        CheckKind::ReinhardtAxes { count } => {
            let mut worst: f64 = 0.0;
            for i in 0..*count {
                let mut rng = stream_rng(opts.seed, i);
                let theta = rng.random::<f64>() * std::f64::consts::TAU;
                let r = 2f64.powf(-1.0 / 8.0);
                let z = Complex64::from_polar(r, theta);
                let p = if i % 2 == 0 { vec![z, Complex64::new(0.0, 0.0)] } else { vec![Complex64::new(0.0, 0.0), z] };
                let scale = m.gradient(&p).iter().map(|g| g.norm_sqr()).sum::<f64>().max(1.0);
                worst = worst.max(bordered_determinant_at(m, &p).abs() / scale);
            }
            Ok((worst <= opts.tol, format!("max normalized |det| on the axes = {worst:.3e}")))
        }
        CheckKind::MapExact { target, map, cofactor } => {
            let t = Hypersurface::new("target", target.clone()).map_err(|e| err(&e))?;
            match verify_map_sends(map, m, &t, &MapCheckMode::Exact).map_err(|e| err(&e))? {
                MapVerdict::ExactYes { cofactor: got } => {
                    let ok = cofactor.as_ref().is_none_or(|c| *c == got);
                    Ok((ok, format!("ExactYes, cofactor {got}")))
                }
                other => Ok((false, format!("{other:?}"))),
            }
        }
        CheckKind::Obstruction { point, expected, zero_tensor } => {
            let cfg = ObstructionConfig { cone: ConeConfig { seed: opts.seed, ..Default::default() } };
            let r = hyperquadric_obstruction(m, point, &cfg).map_err(|e| err(&e))?;
            let ok = r.outcome == *expected && zero_tensor.is_none_or(|z| z == r.tensor_is_zero);
            Ok((ok, format!("{:?}, tensor zero: {}, ell {}, cone {:?}", r.outcome, r.tensor_is_zero, r.ell, r.verdict.classification)))
        }
        CheckKind::ConeWitnesses { point, ell, a } => {
            let prepared = prepare_at_point(m, point).map_err(|e| err(&e))?;
            let q = cmw_tensor(&prepared).map_err(|e| err(&e))?.to_polynomial();
            let cr = prepared.n;
            let mut x1 = vec![ComplexRational::zero(); cr];
            x1[0] = ComplexRational::one();
            x1[*ell] = ComplexRational::one();
            let mut x2 = vec![ComplexRational::zero(); cr];
            x2[1] = ComplexRational::one();
            x2[cr - 1] = ComplexRational::one();
            let v1 = q.eval_exact_real(&x1).map_err(|e| err(&e))?;
            let v2 = q.eval_exact_real(&x2).map_err(|e| err(&e))?;
            let four_a = a * BigRational::from_integer(4.into());
            let ok = v1 == -four_a.clone() && v2 == four_a;
            Ok((ok, format!("q(X1) = {}, q(X2) = {}, a = {}", rational_to_string(&v1), rational_to_string(&v2), rational_to_string(a))))
        }
        CheckKind::SegreReflexive { points } => segre_reflexive(m, n, *points, opts.seed),
    }
}

fn run_scan(m: &Hypersurface, spec: &ScanSpec, count: usize, expect: &ScanExpect, opts: &CheckOptions) -> Result<Outcome, String> {
    let n = m.n_ambient();
    let zero = vec![Complex64::new(0.0, 0.0); n];
    let cfg = match spec {
        ScanSpec::Radial { max_abs } => {
            let c = SamplerConfig::radial(zero);
            match max_abs {
                Some(b) => c.with_max_abs(b.clone()),
                None => c,
            }
        }
        ScanSpec::Axis { radius, axis, imaginary } => {
            let mut dir = zero.clone();
            dir[*axis] = if *imaginary { Complex64::new(0.0, 1.0) } else { Complex64::new(1.0, 0.0) };
            SamplerConfig::fixed(zero, *radius, dir)
        }
    };
    let scan = pseudoconvexity_scan(m, &cfg, count, opts.seed, opts.tol).map_err(|e| e.to_string())?;
    match expect {
        ScanExpect::Pseudoconvex { exclusion, min_abs_z0 } => {
            let far = |p: &[Complex64]| match exclusion {
                Some((c, d)) => {
                    let c = to_c64_point(c);
                    p.iter().zip(&c).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt() > *d
                }
                None => min_abs_z0.is_none_or(|t| p[0].norm() > t),
            };
            let mut considered = 0;
            let mut not_strong = 0;
            for s in &scan.samples {
                if far(&scan.point(s.index)) {
                    considered += 1;
                    if s.report.verdict != LeviVerdict::StronglyPseudoconvex {
                        not_strong += 1;
                    }
                }
            }
            let ok = scan.mixed.is_empty() && scan.pseudoconvexity_violations.is_empty() && not_strong == 0;
            Ok((
                ok,
                format!(
                    "{} samples, mixed {}, negative eigenvalues {}, not strongly pseudoconvex {not_strong} of {considered} checked, min eigenvalue {:.3e}",
                    scan.samples.len(),
                    scan.mixed.len(),
                    scan.pseudoconvexity_violations.len(),
                    scan.min_eigenvalue
                ),
            ))
        }
        ScanExpect::Signature { ell } => {
            let wrong_ell = scan.samples.iter().filter(|s| s.report.ell != *ell).count();
            let degenerate = scan.samples.iter().filter(|s| s.report.signature.n_zero > 0).count();
            let mixed = scan.count(LeviVerdict::MixedSignature);
            Ok((
                wrong_ell == 0 && degenerate == 0 && mixed == scan.samples.len(),
                format!("{} samples, {mixed} mixed, {wrong_ell} with ell != {ell}, {degenerate} degenerate", scan.samples.len()),
            ))
        }
    }
}

/// Rational point `r (1 − t², 2t)/(1 + t²)` on the circle of radius `r`.
fn circle_point(r: &BigRational, t: &BigRational) -> ComplexRational {
    let one = BigRational::from_integer(1.into());
    let d = &one + t * t;
    ComplexRational::new(r * (&one - t * t) / &d, r * (t * BigRational::from_integer(2.into())) / &d)
}

fn random_rational<R: Rng>(rng: &mut R, den: i64) -> BigRational {
    rat(rng.random_range(-4 * den..=4 * den), den)
}

fn circle_locus(m: &Hypersurface, radius: &BigRational, count: usize, seed: u64) -> Result<Outcome, String> {
    let det = degenerate_locus_polynomial(m).map_err(|e| e.to_string())?;
    let rho = m.rho();
    let mut on_bad = 0;
    let mut off_bad = 0;
    let offsets = [rat(1, 4), rat(3, 4), rat(1, 3)];
    for i in 0..count {
        let mut rng = stream_rng(seed, i);
        let t = random_rational(&mut rng, 97);
        let u = random_rational(&mut rng, 31);
        for (r, on) in std::iter::once((radius.clone(), true)).chain(std::iter::once((offsets[i % 3].clone(), false))) {
            let z = circle_point(&r, &t);
            let r2 = z.norm_sqr();
            let w = ComplexRational::new(u.clone(), &r2 - &r2 * &r2);
            let p = [z, w];
            if !rho.eval_exact_real(&p).map_err(|e| e.to_string())?.is_zero() {
                return Err("parametrized point is off the surface".into());
            }
            let v = det.eval_exact_real(&p).map_err(|e| e.to_string())?;
            if on && !v.is_zero() {
                on_bad += 1;
            }
            if !on && v.is_zero() {
                off_bad += 1;
            }
        }
    }
    Ok((
        on_bad == 0 && off_bad == 0,
        format!("{count} points on |z| = {radius}: {on_bad} nonzero; {count} points off it: {off_bad} zero (exact)"),
    ))
}

fn reinhardt_locus(m: &Hypersurface, count: usize, on_tol: f64, off_margin: f64, seed: u64) -> Result<Outcome, String> {
    let normalized = |p: &[Complex64]| {
        let g: f64 = m.gradient(p).iter().map(|c| c.norm_sqr()).sum();
        bordered_determinant_at(m, p).abs() / g.max(1.0)
    };
    let r = 0.5f64.sqrt();
    let mut on_max: f64 = 0.0;
    for i in 0..count {
        let mut rng = stream_rng(seed, i);
        let (a, b) = (rng.random::<f64>() * std::f64::consts::TAU, rng.random::<f64>() * std::f64::consts::TAU);
        let p = [Complex64::from_polar(r, a), Complex64::from_polar(r, b)];
        if m.eval(&p).abs() > 1e-12 {
            return Err(format!("point {p:?} is off the surface"));
        }
        on_max = on_max.max(normalized(&p));
    }
    let cfg = SamplerConfig::radial(vec![Complex64::new(0.0, 0.0); 2]);
    let pool = sample_points(m, &cfg, 4 * count, seed.wrapping_add(1)).map_err(|e| e.to_string())?;
    let off: Vec<f64> =
        pool.iter().filter(|p| (p[0].norm() - p[1].norm()).abs() > 0.05).take(count).map(|p| normalized(p)).collect();
    let off_min = off.iter().copied().fold(f64::INFINITY, f64::min);
    let ok = on_max <= on_tol && off.len() == count && off_min >= off_margin;
    Ok((
        ok,
        format!(
            "max normalized |det| on |z| = |w|: {on_max:.3e} (tolerance {on_tol:e}); min off the set over {} points: {off_min:.3e}",
            off.len()
        ),
    ))
}

fn segre_reflexive(m: &Hypersurface, n: usize, points: usize, seed: u64) -> Result<Outcome, String> {
    let mut asym = 0;
    let mut membership_bad = 0;
    let mut membership_tested = 0;
    for i in 0..points {
        let mut rng = stream_rng(seed, i);
        let mut pt = || (0..n).map(|_| ComplexRational::new(random_rational(&mut rng, 7), random_rational(&mut rng, 7))).collect::<Vec<_>>();
        let (z, w) = (pt(), pt());
        let a = segre_value_exact(m, &z, &w).map_err(|e| e.to_string())?;
        let b = segre_value_exact(m, &w, &z).map_err(|e| e.to_string())?;
        if a != b.conj() {
            asym += 1;
        }
        // Solve for the last coordinate of z when z ↦ ρ(z, w̄) is affine in it.
        let at = |t: i64| {
            let mut zz = z.clone();
            zz[n - 1] = ComplexRational::from_ints(t, 0);
            segre_value_exact(m, &zz, &w).map_err(|e| e.to_string())
        };
        let (f0, f1, f2) = (at(0)?, at(1)?, at(2)?);
        let slope = &f1 - &f0;
        if slope.is_zero() || &(&f2 - &f1) != &slope {
            continue;
        }
        let mut zz = z.clone();
        zz[n - 1] = (-f0).checked_div(&slope).map_err(|e| e.to_string())?;
        membership_tested += 1;
        let forward = segre_value_exact(m, &zz, &w).map_err(|e| e.to_string())?;
        let back = segre_value_exact(m, &w, &zz).map_err(|e| e.to_string())?;
        if !forward.is_zero() || !back.is_zero() {
            membership_bad += 1;
        }
    }
    Ok((
        asym == 0 && membership_bad == 0 && membership_tested > 0,
        format!("{points} pairs: {asym} asymmetric values; {membership_bad} of {membership_tested} memberships not reflexive"),
    ))
}
