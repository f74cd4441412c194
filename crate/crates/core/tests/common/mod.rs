//! Random inputs and property cases shared by the acceptance target and the proptest suites.
#![allow(dead_code)]

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cr_core::cmw::{
    cmw_tensor, cone_definiteness, cone_residual, cone_sample, harmonic_decompose, prepare_at_point, trace_contract,
    ConeConfig, Quartic22Tensor,
};
use cr_core::hermpoly::rational::rat;
use cr_core::hermpoly::{BiholoSubstitution, Bipoly, ComplexRational, HoloPoly, MultiIndex, RealBipoly};
use cr_core::levi::{levi_signature, to_c64_point, Hypersurface};
use cr_core::segremap::segre_value_exact;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_rational<R: Rng>(rng: &mut R, bound: i64, den: i64) -> BigRational {
    rat(rng.random_range(-bound..=bound), den)
}

pub fn small_complex<R: Rng>(rng: &mut R, bound: i64, den: i64) -> ComplexRational {
    ComplexRational::new(small_rational(rng, bound, den), small_rational(rng, bound, den))
}

fn random_index<R: Rng>(rng: &mut R, n: usize, d: u32) -> MultiIndex {
    let all = MultiIndex::all_of_degree(n, d);
    all[rng.random_range(0..all.len())].clone()
}

/// Random real polynomial of bidegree (p, q) + (q, p) with `terms` monomials.
pub fn random_real_bidegree<R: Rng>(rng: &mut R, n: usize, p: u32, q: u32, terms: usize) -> RealBipoly {
    let mut out = RealBipoly::zero(n);
    for _ in 0..terms {
        let (a, b) = (random_index(rng, n, p), random_index(rng, n, q));
        out = &out + &RealBipoly::re_monomial(a, b, small_complex(rng, 5, 3));
    }
    out
}

/// Random Hermitian (1,1) form.
pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> RealBipoly {
    random_real_bidegree(rng, n, 1, 1, n * n)
}

/// `Δ_ℓ P = Σ_j g_j ∂²P/∂z_j∂z̄_j`, computed from the Wirtinger derivatives.
pub fn laplacian_oracle(p: &RealBipoly, ell: usize) -> Bipoly {
    let mut out = Bipoly::zero(p.n());
    for j in 0..p.n() {
        let d = p.derive_z(j).unwrap().derive_zbar(j).unwrap();
        out = if j < ell { &out - &d } else { &out + &d };
    }
    out
}

pub fn signed_norm(n: usize, ell: usize) -> RealBipoly {
    let mut g = RealBipoly::zero(n);
    for j in 0..n {
        let t = RealBipoly::abs_sq(n, j);
        g = if j < ell { &g - &t } else { &g + &t };
    }
    g
}

/// `tr_g` of a Hermitian (1,1) form.
fn trace_g(b: &Bipoly, ell: usize) -> BigRational {
    let n = b.n();
    let mut t = BigRational::zero();
    for j in 0..n {
        let c = b.coeff(&MultiIndex::unit(n, j), &MultiIndex::unit(n, j)).re;
        t = if j < ell { t - c } else { t + c };
    }
    t
}

/// Closed form: with `B = Δ_ℓ Q`, `tr_g A = tr_g B / (2n+2)` and `A = (B − tr_g A · |z|²_ℓ)/(n+2)`.
pub fn trace_part_oracle(q: &RealBipoly, ell: usize) -> RealBipoly {
    let n = q.n();
    let b = laplacian_oracle(q, ell);
    let tr_a = trace_g(&b, ell) / BigRational::from_integer((2 * n + 2).into());
    let g = signed_norm(n, ell);
    let a = &b - &g.scale(&tr_a).into_inner();
    RealBipoly::new(a).unwrap().scale(&rat(1, (n + 2) as i64))
}

pub fn random_ell_n<R: Rng>(rng: &mut R, max_n: usize) -> (usize, usize) {
    let n = rng.random_range(1..=max_n);
    (rng.random_range(0..=n), n)
}

/// Harmonic decomposition against the closed form; exact.
pub fn harmonic_case(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let (ell, n) = random_ell_n(&mut r, 4);
    let terms = r.random_range(1..=6);
    let q = random_real_bidegree(&mut r, n, 2, 2, terms);
    let h = harmonic_decompose(&q, ell).map_err(|e| e.to_string())?;
    let g = signed_norm(n, ell);
    if &h.n_part + &(&h.a_part * &g) != q {
        return Err(format!("reconstruction fails for {q} (ell {ell})"));
    }
    if !laplacian_oracle(&h.n_part, ell).is_zero() {
        return Err(format!("N is not ell-harmonic for {q} (ell {ell})"));
    }
    let oracle = trace_part_oracle(&q, ell);
    if h.a_part != oracle {
        return Err(format!("A = {} but closed form gives {oracle}", h.a_part));
    }
    Ok(())
}

/// `N(Q + A·|z|²_ℓ) = N(Q)`; exact.
pub fn trace_insensitivity_case(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let (ell, n) = random_ell_n(&mut r, 4);
    let q = random_real_bidegree(&mut r, n, 2, 2, 4);
    let a = random_hermitian(&mut r, n);
    let shifted = &q + &(&a * &signed_norm(n, ell));
    let n1 = harmonic_decompose(&q, ell).map_err(|e| e.to_string())?.n_part;
    let n2 = harmonic_decompose(&shifted, ell).map_err(|e| e.to_string())?.n_part;
    (n1 == n2).then_some(()).ok_or_else(|| format!("N changed: {n1} vs {n2}"))
}

/// Symmetries of the tensor of `N`, vanishing `ℓ`-trace, and agreement of the contraction with `Δ_ℓ`; exact.
pub fn tensor_case(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let (ell, n) = random_ell_n(&mut r, 4);
    let q = random_real_bidegree(&mut r, n, 2, 2, 5);
    let raw = Quartic22Tensor::from_polynomial(&q, ell, &rat(1, 1)).map_err(|e| e.to_string())?;
    if !raw.symmetry_violations().is_empty() {
        return Err("symmetry violated for a raw quartic".into());
    }
    if raw.to_polynomial() != q {
        return Err("tensor does not reproduce the quartic".into());
    }
    // Δ_ℓ Q = 4 Σ C_{γδ} z_γ z̄_δ
    let c = trace_contract(&raw);
    let lap = laplacian_oracle(&q, ell);
    for (g, row) in c.iter().enumerate() {
        for (d, v) in row.iter().enumerate() {
            let want = lap.coeff(&MultiIndex::unit(n, g), &MultiIndex::unit(n, d)).scale(&rat(1, 4));
            if *v != want {
                return Err(format!("contraction ({g},{d}) = {v}, laplacian gives {want}"));
            }
        }
    }
    let h = harmonic_decompose(&q, ell).map_err(|e| e.to_string())?;
    let t = Quartic22Tensor::from_polynomial(&h.n_part, ell, &rat(4, 1)).map_err(|e| e.to_string())?;
    if !t.symmetry_violations().is_empty() {
        return Err("symmetry violated for N".into());
    }
    if trace_contract(&t).iter().flatten().any(|v| !v.is_zero()) {
        return Err("traceless part has nonzero trace".into());
    }
    Ok(())
}

pub fn cone_residual_case(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let n = r.random_range(2..=6);
    let ell = r.random_range(1..n);
    let worst = cone_sample(ell, n, 50, seed).iter().map(|x| cone_residual(ell, x)).fold(0.0, f64::max);
    (worst < 1e-14).then_some(()).ok_or_else(|| format!("cone residual {worst:e} (ell {ell}, n {n})"))
}

pub fn random_float_tensor(seed: u64) -> (Quartic22Tensor, Vec<Complex64>) {
    let mut r = rng(seed);
    let n = r.random_range(2..=4);
    let ell = r.random_range(1..n);
    let q = random_real_bidegree(&mut r, n, 2, 2, 6);
    let t = Quartic22Tensor::from_polynomial(&q, ell, &rat(1, 1)).unwrap();
    let x = (0..n).map(|_| Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))).collect();
    (t, x)
}

/// `G = 2∂q/∂X̄` against central differences along `e_j` and `i e_j`.
pub fn gradient_case(seed: u64) -> Result<(), String> {
    let (t, x) = random_float_tensor(seed);
    let f = t.to_float();
    let g = f.gradient(&x);
    let h = 1e-5;
    for j in 0..x.len() {
        for (dir, part) in [(Complex64::new(1.0, 0.0), g[j].re), (Complex64::new(0.0, 1.0), g[j].im)] {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += dir * h;
            xm[j] -= dir * h;
            let fd = (f.value(&xp) - f.value(&xm)) / (2.0 * h);
            if (fd - part).abs() > 1e-5 * (1.0 + part.abs()) {
                return Err(format!("coordinate {j}: finite difference {fd}, gradient {part}"));
            }
        }
    }
    Ok(())
}

/// `ρ(z, w̄) = conj ρ(w, z̄)`, so `z ∈ Q_w ⟺ w ∈ Q_z`; exact.
pub fn segre_case(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let n = r.random_range(2..=3);
    let mut rho = -&RealBipoly::im_of(&HoloPoly::var(n, n - 1));
    rho = &rho + &random_real_bidegree(&mut r, n, 1, 1, 3);
    // Higher terms avoid z_n, so ρ(·, w̄) stays affine in z_n.
    let map: Vec<usize> = (0..n - 1).collect();
    for (p, q) in [(2, 0), (2, 1), (2, 2), (3, 1)] {
        rho = &rho + &random_real_bidegree(&mut r, n - 1, p, q, 2).embed(n, &map).map_err(|e| e.to_string())?;
    }
    let m = Hypersurface::new("random", rho).map_err(|e| e.to_string())?;
    let pt = |r: &mut ChaCha8Rng| (0..n).map(|_| small_complex(r, 6, 5)).collect::<Vec<_>>();
    let (z, w) = (pt(&mut r), pt(&mut r));
    let a = segre_value_exact(&m, &z, &w).map_err(|e| e.to_string())?;
    let b = segre_value_exact(&m, &w, &z).map_err(|e| e.to_string())?;
    if a != b.conj() {
        return Err(format!("rho(z, conj w) = {a}, conj rho(w, conj z) = {}", b.conj()));
    }
    // Solve for the last coordinate of z so that z ∈ Q_w, then test w ∈ Q_z.
    let mut z2 = z.clone();
    let base = {
        z2[n - 1] = ComplexRational::zero();
        segre_value_exact(&m, &z2, &w).map_err(|e| e.to_string())?
    };
    let slope = {
        let mut t = z2.clone();
        t[n - 1] = ComplexRational::one();
        &segre_value_exact(&m, &t, &w).map_err(|e| e.to_string())? - &base
    };
    if slope.is_zero() {
        return Ok(());
    }
    z2[n - 1] = (-base).checked_div(&slope).map_err(|e| e.to_string())?;
    let fwd = segre_value_exact(&m, &z2, &w).map_err(|e| e.to_string())?;
    let back = segre_value_exact(&m, &w, &z2).map_err(|e| e.to_string())?;
    (fwd.is_zero() && back.is_zero()).then_some(()).ok_or_else(|| "membership is not reflexive".to_string())
}

fn random_invertible<R: Rng>(rng: &mut R, n: usize) -> Vec<Vec<ComplexRational>> {
    // Unit lower triangular times unit upper triangular with a random diagonal.
    let mut l = vec![vec![ComplexRational::zero(); n]; n];
    let mut u = vec![vec![ComplexRational::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            if i > j {
                l[i][j] = small_complex(rng, 3, 2);
            } else if i < j {
                u[i][j] = small_complex(rng, 3, 2);
            }
        }
        l[i][i] = ComplexRational::one();
        let mut d = small_complex(rng, 3, 1);
        if d.is_zero() {
            d = ComplexRational::one();
        }
        u[i][i] = d;
    }
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut s = ComplexRational::zero();
                    for k in 0..n {
                        s += &(&l[i][k] * &u[k][j]);
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// Signature of `ρ` at `p` equals that of `ρ∘A` at `A⁻¹p`. Returns `Ok(false)` when the case is too close to
/// degenerate to be meaningful at tolerance `1e-8`.
pub fn levi_congruence_case(seed: u64) -> Result<bool, String> {
    let mut r = rng(seed);
    let n = r.random_range(2..=4);
    let mut rho = -&RealBipoly::im_of(&HoloPoly::var(n, n - 1));
    rho = &rho + &random_real_bidegree(&mut r, n, 1, 1, 2 * n);
    rho = &rho + &random_real_bidegree(&mut r, n, 2, 1, 2);
    rho = &rho + &random_real_bidegree(&mut r, n, 2, 2, 2);
    let a = random_invertible(&mut r, n);
    let p2: Vec<ComplexRational> = (0..n).map(|_| small_complex(&mut r, 2, 4)).collect();
    let p: Vec<ComplexRational> = a
        .iter()
        .map(|row| {
            let mut s = ComplexRational::zero();
            for (c, x) in row.iter().zip(&p2) {
                s += &(c * x);
            }
            s
        })
        .collect();
    let shift = rho.eval_exact_real(&p).map_err(|e| e.to_string())?;
    rho = &rho - &RealBipoly::constant(n, shift);
    let pulled = rho.substitute(&BiholoSubstitution::linear(&a).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let m1 = Hypersurface::new("rho", rho).map_err(|e| e.to_string())?;
    let m2 = Hypersurface::new("pulled", pulled).map_err(|e| e.to_string())?;
    let tol = 1e-8;
    let (Ok(r1), Ok(r2)) = (levi_signature(&m1, &to_c64_point(&p), tol), levi_signature(&m2, &to_c64_point(&p2), tol)) else {
        return Ok(false);
    };
    let margin = |rep: &cr_core::levi::LeviReport| {
        rep.eigenvalues.iter().map(|l| l.abs()).fold(f64::INFINITY, f64::min) / rep.scale.max(1e-300)
    };
    if margin(&r1) < 1e-4 || margin(&r2) < 1e-4 {
        return Ok(false);
    }
    let (s1, s2) = (&r1.signature, &r2.signature);
    if (s1.n_plus, s1.n_minus, s1.n_zero, r1.conormal_flipped) != (s2.n_plus, s2.n_minus, s2.n_zero, r2.conormal_flipped) {
        return Err(format!("signatures differ: {s1:?} vs {s2:?}"));
    }
    Ok(true)
}

/// Random Levi-nondegenerate surface through 0 with terms through weight 4.
pub fn random_prepared_input<R: Rng>(rng: &mut R) -> (Hypersurface, usize) {
    let n = rng.random_range(2..=3);
    let ell = rng.random_range(0..=n);
    let nn = n + 1;
    let mut rho = -&RealBipoly::im_of(&HoloPoly::var(nn, n));
    for j in 0..n {
        let t = RealBipoly::abs_sq(nn, j);
        rho = if j < ell { &rho - &t } else { &rho + &t };
    }
    // Quartic and cubic terms in z only, so the quadratic part stays nondegenerate.
    let mut extra = random_real_bidegree(rng, n, 2, 2, 3);
    extra = &extra + &random_real_bidegree(rng, n, 2, 1, 1);
    let map: Vec<usize> = (0..n).collect();
    rho = &rho + &extra.embed(nn, &map).unwrap();
    (Hypersurface::new("random", rho).unwrap(), ell)
}

/// `ρ → 4ρ` divides the tensor by 4, the tangent map by 2, and leaves the cone verdict unchanged.
pub fn scale_case(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let (m, _) = random_prepared_input(&mut r);
    let nn = m.n_ambient();
    let m4 = Hypersurface::new("scaled", m.rho().scale(&rat(4, 1))).map_err(|e| e.to_string())?;
    let origin = vec![ComplexRational::zero(); nn];
    let p1 = prepare_at_point(&m, &origin).map_err(|e| e.to_string())?;
    let p4 = prepare_at_point(&m4, &origin).map_err(|e| e.to_string())?;
    let t1 = cmw_tensor(&p1).map_err(|e| e.to_string())?;
    let t4 = cmw_tensor(&p4).map_err(|e| e.to_string())?;
    if t4 != t1.scale(&rat(1, 4)) {
        return Err("tensor did not scale by 1/4".into());
    }
    let half = ComplexRational::from_ratio(1, 2);
    let expected: Vec<Vec<ComplexRational>> = p1.tangent_map().iter().map(|row| row.iter().map(|c| c * &half).collect()).collect();
    if p4.tangent_map() != expected {
        return Err("tangent map did not scale by 1/2".into());
    }
    if p1.orientation != p4.orientation {
        return Err("orientation changed".into());
    }
    let cfg = ConeConfig { samples: 400, refine_iters: 50, seed, ..ConeConfig::default() };
    let (v1, v4) = (cone_definiteness(&t1, &cfg), cone_definiteness(&t4, &cfg));
    if v1.classification != v4.classification {
        return Err(format!("verdict changed: {:?} vs {:?}", v1.classification, v4.classification));
    }
    Ok(())
}

/// Runs `case` on seeds `0..count` and returns the first failure.
pub fn run_cases(count: u64, case: impl Fn(u64) -> Result<(), String>) -> Result<u64, String> {
    for s in 0..count {
        case(s).map_err(|e| format!("seed {s}: {e}"))?;
    }
    Ok(count)
}
