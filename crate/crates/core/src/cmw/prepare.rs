use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::graph::{describe_term, graph_of, GraphPoly, MAX_WEIGHT};
use super::CmwError;
use crate::hermpoly::rational::{rat_to_f64, rational_sqrt_approx};
use crate::hermpoly::{BiholoSubstitution, Bipoly, ComplexRational, HoloPoly, MultiIndex, RealBipoly};
use crate::levi::Hypersurface;

pub const MAX_PASSES: usize = 20;

/// A hypersurface in prepared coordinates at a point, through weight 4.
#[derive(Clone, Debug)]
pub struct PreparedSurface {
    /// Dimension of `T^{1,0}`.
    pub n: usize,
    pub ell: usize,
    pub point: Vec<ComplexRational>,
    /// Diagonal of the quadratic part, negatives first; equal to `±1` unless a pivot was not a rational square.
    pub levi_diagonal: Vec<BigRational>,
    /// `max |d_k| − 1` over the diagonal.
    pub normalization_residual: f64,
    /// `Q` with `v = Σ d_k|z_k|² − Q + …`.
    pub quartic22: RealBipoly,
    /// The (3,1)+(1,3) part of `v − φ`, kept out of the tensor.
    pub dropped: RealBipoly,
    /// Sum of the (2,1)+(1,2) parts of `φ` removed by changes of `z`.
    pub removed_21: RealBipoly,
    /// `ρ∘transform = orientation · (defining function of the prepared graph)` to first order.
    pub orientation: i32,
    /// Prepared coordinates `(z, w)` to original coordinates, truncated at weight 4.
    pub transform: BiholoSubstitution,
    pub passes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReplayReport {
    pub exact: bool,
    pub mismatched_terms: Vec<String>,
}

fn weights(n: usize) -> Vec<u32> {
    let mut w = vec![1; n];
    w.push(2);
    w
}

fn zero_matrix(n: usize) -> Vec<Vec<ComplexRational>> {
    vec![vec![ComplexRational::zero(); n]; n]
}

fn identity_matrix(n: usize) -> Vec<Vec<ComplexRational>> {
    let mut m = zero_matrix(n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ComplexRational::one();
    }
    m
}

/// `col_j += mu·col_i` on `P`, with `K ↦ EᵀKĒ`.
fn column_op(k: &mut [Vec<ComplexRational>], p: &mut [Vec<ComplexRational>], i: usize, j: usize, mu: &ComplexRational) {
    let n = k.len();
    let row_i = k[i].clone();
    for (c, ri) in row_i.iter().enumerate() {
        let add = mu * ri;
        k[j][c] += &add;
    }
    let mu_bar = mu.conj();
    for row in k.iter_mut().take(n) {
        let add = &mu_bar * &row[i];
        row[j] += &add;
    }
    for row in p.iter_mut() {
        let add = mu * &row[i];
        row[j] += &add;
    }
}

fn swap_op(k: &mut [Vec<ComplexRational>], p: &mut [Vec<ComplexRational>], i: usize, j: usize) {
    if i == j {
        return;
    }
    k.swap(i, j);
    for row in k.iter_mut() {
        row.swap(i, j);
    }
    for row in p.iter_mut() {
        row.swap(i, j);
    }
}

/// Lagrange reduction: returns `P` and real `d` with `PᵀKP̄ = diag(d)`, or the rank when `K` is singular.
fn congruence_diagonalize(k: &[Vec<ComplexRational>]) -> Result<(Vec<Vec<ComplexRational>>, Vec<BigRational>), usize> {
    let n = k.len();
    let mut k = k.to_vec();
    let mut p = identity_matrix(n);
    for i in 0..n {
        if let Some(r) = (i..n).find(|&r| !k[r][r].is_zero()) {
            swap_op(&mut k, &mut p, i, r);
        } else {
            let pair = (i..n).flat_map(|r| (i..n).map(move |s| (r, s))).find(|&(r, s)| r != s && !k[r][s].is_zero());
            let Some((r, s)) = pair else { return Err(i) };
            let t = if k[s][r].re.is_zero() { ComplexRational::i() } else { ComplexRational::one() };
            column_op(&mut k, &mut p, s, r, &t);
            swap_op(&mut k, &mut p, i, r);
        }
        let pivot = k[i][i].clone();
        for j in i + 1..n {
            if k[j][i].is_zero() {
                continue;
            }
            let mu = -(k[j][i].checked_div(&pivot).expect("nonzero pivot"));
            column_op(&mut k, &mut p, i, j, &mu);
        }
    }
    Ok((p, (0..n).map(|i| k[i][i].re.clone()).collect()))
}

/// Substitution `z_old = M z_new`, `w_old = w_new`.
fn z_linear(n: usize, m: &[Vec<ComplexRational>]) -> BiholoSubstitution {
    let nn = n + 1;
    let mut comps: Vec<HoloPoly> = m
        .iter()
        .map(|row| {
            let mut lin = row.clone();
            lin.push(ComplexRational::zero());
            HoloPoly::affine(ComplexRational::zero(), &lin)
        })
        .collect();
    comps.push(HoloPoly::var(nn, n));
    BiholoSubstitution::new(nn, comps).expect("square")
}

struct State {
    n: usize,
    r: Bipoly,
    transform: BiholoSubstitution,
}

impl State {
    fn apply(&mut self, s: &BiholoSubstitution) -> Result<(), CmwError> {
        let w = weights(self.n);
        self.r = self.r.substitute_truncated(s, &w, MAX_WEIGHT)?;
        self.transform = self.transform.compose(s)?.truncate_weighted(&w, MAX_WEIGHT);
        Ok(())
    }

    fn regraph(&mut self) -> Result<GraphPoly, CmwError> {
        let phi = graph_of(&self.r)?;
        self.r = &v_bipoly(self.n) - &phi.to_bipoly();
        Ok(phi)
    }
}

fn v_bipoly(n: usize) -> Bipoly {
    RealBipoly::im_of(&HoloPoly::var(n + 1, n)).into_inner()
}

fn hermitian_11(phi: &GraphPoly) -> Vec<Vec<ComplexRational>> {
    let n = phi.n;
    let mut k = zero_matrix(n);
    for (j, row) in k.iter_mut().enumerate() {
        for (l, entry) in row.iter_mut().enumerate() {
            *entry = phi.coeff(&(MultiIndex::unit(n, j), MultiIndex::unit(n, l), 0, 0));
        }
    }
    k
}

/// Pluriharmonic part of `φ` as `f` with `2 Re f(z, u) = ` those terms.
fn pluriharmonic_generator(phi: &GraphPoly) -> Option<HoloPoly> {
    let n = phi.n;
    let nn = n + 1;
    let mut f = HoloPoly::zero(nn);
    for ((a, b, pu, pv), c) in &phi.terms {
        if !b.is_zero() || *pv != 0 || (a.is_zero() && *pu == 0) {
            continue;
        }
        let mut e = a.0.clone();
        e.push(*pu);
        let coef = if a.is_zero() { c.scale(&BigRational::new(1.into(), 2.into())) } else { c.clone() };
        f.add_term(MultiIndex(e), coef);
    }
    (!f.is_zero()).then_some(f)
}

/// Prepares `M` at `p`: translation, transversal coordinate `w`, Levi diagonalization, and removal of all weight ≤ 4
/// terms other than (2,2), (3,1) and (1,3).
pub fn prepare_at_point(m: &Hypersurface, p: &[ComplexRational]) -> Result<PreparedSurface, CmwError> {
    let nn = m.n_ambient();
    if p.len() != nn {
        return Err(CmwError::InvalidInput(format!("point has {} coordinates, expected {nn}", p.len())));
    }
    let value = m.rho().eval_exact(p)?;
    if !value.is_zero() {
        return Err(CmwError::NotOnSurface(value.to_string()));
    }
    let n = nn - 1;
    let translation = BiholoSubstitution::translation(p);
    let r0 = m.rho().substitute_truncated(&translation, &vec![1; nn], MAX_WEIGHT)?.into_inner();

    // Linear step: the largest gradient coordinate becomes w.
    let c: Vec<ComplexRational> =
        (0..nn).map(|j| r0.coeff(&MultiIndex::unit(nn, j), &MultiIndex::zeros(nn))).collect();
    let mag: Vec<f64> = c.iter().map(|x| rat_to_f64(&x.norm_sqr())).collect();
    let idx = (0..nn).filter(|&j| !c[j].is_zero()).max_by(|&a, &b| mag[a].total_cmp(&mag[b]).then(b.cmp(&a)));
    let Some(mi) = idx else { return Err(CmwError::SingularPoint) };
    let inv_cm = c[mi].inv()?;
    let mut comps = Vec::with_capacity(nn);
    for k in 0..nn {
        if k == mi {
            // (w/(2i) − Σ_{j≠m} c_j z_j) / c_m
            let mut lin = vec![ComplexRational::zero(); nn];
            lin[n] = ComplexRational::new(BigRational::zero(), BigRational::new((-1).into(), 2.into())) * inv_cm.clone();
            for j in (0..nn).filter(|&j| j != mi) {
                let pos = if j < mi { j } else { j - 1 };
                lin[pos] = -(&c[j] * &inv_cm);
            }
            comps.push(HoloPoly::affine(ComplexRational::zero(), &lin));
        } else {
            comps.push(HoloPoly::var(nn, if k < mi { k } else { k - 1 }));
        }
    }
    let linear = BiholoSubstitution::new(nn, comps)?;
    let mut st = State { n, r: r0, transform: translation };
    st.apply(&linear)?;
    let mut phi = st.regraph()?;

    let mut orientation = 1;
    let k = hermitian_11(&phi);
    let (_, d) = congruence_diagonalize(&k).map_err(|rank| CmwError::LeviDegenerateAtPoint { rank, n })?;
    let negatives = d.iter().filter(|x| x.is_negative()).count();
    if 2 * negatives > n {
        let mut comps: Vec<HoloPoly> = (0..n).map(|j| HoloPoly::var(nn, j)).collect();
        comps.push(-&HoloPoly::var(nn, n));
        st.apply(&BiholoSubstitution::new(nn, comps)?)?;
        st.r = -&st.r;
        orientation = -1;
        phi = st.regraph()?;
    }

    let k = hermitian_11(&phi);
    let (pm, d) = congruence_diagonalize(&k).map_err(|rank| CmwError::LeviDegenerateAtPoint { rank, n })?;
    let mut order: Vec<usize> = (0..n).filter(|&i| d[i].is_negative()).collect();
    let ell = order.len();
    order.extend((0..n).filter(|&i| d[i].is_positive()));
    let mut scaled = zero_matrix(n);
    let mut levi_diagonal = Vec::with_capacity(n);
    let mut residual = 0.0f64;
    for (new_col, &old_col) in order.iter().enumerate() {
        let a = d[old_col].abs();
        let s = rational_sqrt_approx(&(BigRational::one() / &a), 2);
        let dk = &d[old_col] * &s * &s;
        residual = residual.max((rat_to_f64(&dk.abs()) - 1.0).abs());
        levi_diagonal.push(dk);
        for row in 0..n {
            scaled[row][new_col] = pm[row][old_col].scale(&s);
        }
    }
    st.apply(&z_linear(n, &scaled))?;
    phi = st.regraph()?;

    let mut removed_21 = Bipoly::zero(n);
    let mut passes = 0;
    loop {
        if passes >= MAX_PASSES {
            return Err(CmwError::NonRigidOrder4 { terms: offending_terms(&phi) });
        }
        passes += 1;
        if let Some(f) = pluriharmonic_generator(&phi) {
            let mut comps: Vec<HoloPoly> = (0..n).map(|j| HoloPoly::var(nn, j)).collect();
            comps.push(&HoloPoly::var(nn, n) + &f.scale(&ComplexRational::from_ints(0, 2)));
            st.apply(&BiholoSubstitution::new(nn, comps)?)?;
            phi = st.regraph()?;
            continue;
        }
        let part21 = phi.z_part(2, 1);
        let has_u11 = phi.terms.keys().any(|(a, b, pu, _)| *pu == 1 && a.degree() == 1 && b.degree() == 1);
        if part21.is_zero() && !has_u11 {
            break;
        }
        removed_21 = &removed_21 + &(&part21 + &part21.conj());
        // z_k ↦ z_k + w Σ_j C_kj z_j − P_k(z)/d_k
        let mut comps = Vec::with_capacity(nn);
        for kk in 0..n {
            let inv_d = BigRational::one() / &levi_diagonal[kk];
            let mut comp = HoloPoly::var(nn, kk);
            for j in 0..n {
                let b = phi.coeff(&(MultiIndex::unit(n, j), MultiIndex::unit(n, kk), 1, 0));
                if b.is_zero() {
                    continue;
                }
                let cc = b.scale(&(-&inv_d / BigRational::from_integer(2.into())));
                comp = &comp + &(&HoloPoly::var(nn, j) * &HoloPoly::var(nn, n)).scale(&cc);
            }
            for (a, bexp, coef) in part21.terms() {
                if *bexp == MultiIndex::unit(n, kk) {
                    let mut e = a.0.clone();
                    e.push(0);
                    comp.add_term(MultiIndex(e), coef.scale(&-&inv_d));
                }
            }
            comps.push(comp);
        }
        comps.push(HoloPoly::var(nn, n));
        st.apply(&BiholoSubstitution::new(nn, comps)?)?;
        phi = st.regraph()?;
    }

    let leftovers = offending_terms(&phi);
    if !leftovers.is_empty() {
        return Err(CmwError::NonRigidOrder4 { terms: leftovers });
    }
    let quartic22 = RealBipoly::new(-phi.z_part(2, 2))?;
    let dropped = RealBipoly::new(-(phi.z_part(3, 1) + phi.z_part(1, 3)))?;
    Ok(PreparedSurface {
        n,
        ell,
        point: p.to_vec(),
        levi_diagonal,
        normalization_residual: residual,
        quartic22,
        dropped,
        removed_21: RealBipoly::new(removed_21)?,
        orientation,
        transform: st.transform,
        passes,
    })
}

/// Terms of `φ` outside the diagonal (1,1), (2,2), (3,1) and (1,3) parts.
fn offending_terms(phi: &GraphPoly) -> Vec<String> {
    phi.terms
        .iter()
        .filter(|((a, b, pu, pv), _)| {
            let (p, q) = (a.degree(), b.degree());
            let allowed = *pu == 0
                && *pv == 0
                && ((p == 1 && q == 1 && a == b) || (p == 2 && q == 2) || (p == 3 && q == 1) || (p == 1 && q == 3));
            !allowed
        })
        .map(|(k, c)| describe_term(k, c))
        .collect()
}

impl PreparedSurface {
    /// `Σ d_k |z_k|²`
    pub fn quadratic_part(&self) -> RealBipoly {
        let mut q = RealBipoly::zero(self.n);
        for (k, d) in self.levi_diagonal.iter().enumerate() {
            q = &q + &RealBipoly::abs_sq(self.n, k).scale(d);
        }
        q
    }

    /// Original-coordinate images of the prepared tangent directions `∂/∂z_j`, one column per `j`.
    pub fn tangent_map(&self) -> Vec<Vec<ComplexRational>> {
        self.transform.jacobian_at_origin().into_iter().map(|row| row[..self.n].to_vec()).collect()
    }

    /// Applies the recorded transform to `ρ` and checks the resulting graph against the stored parts exactly.
    pub fn replay(&self, m: &Hypersurface) -> Result<ReplayReport, CmwError> {
        let w = weights(self.n);
        let mut r = m.rho().substitute_truncated(&self.transform, &w, MAX_WEIGHT)?.into_inner();
        if self.orientation < 0 {
            r = -r;
        }
        let phi = graph_of(&r)?;
        let expected = &(&*self.quadratic_part() - &*self.quartic22) - &*self.dropped;
        let mut actual = Bipoly::zero(self.n);
        let mut extra = Vec::new();
        for (k, c) in &phi.terms {
            if k.2 == 0 && k.3 == 0 {
                actual.add_term(k.0.clone(), k.1.clone(), c.clone());
            } else {
                extra.push(describe_term(k, c));
            }
        }
        let diff = &actual - &expected;
        let mut mismatched_terms = extra;
        mismatched_terms.extend(diff.terms().map(|(a, b, c)| format!("({c}) z^{a} zb^{b}")));
        Ok(ReplayReport { exact: mismatched_terms.is_empty(), mismatched_terms })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermpoly::rational::rat;

    fn hyperquadric(n: usize, ell: usize) -> Hypersurface {
        let nn = n + 1;
        let mut rho = -&RealBipoly::im_of(&HoloPoly::var(nn, n));
        for j in 0..n {
            let t = RealBipoly::abs_sq(nn, j);
            rho = if j < ell { &rho - &t } else { &rho + &t };
        }
        Hypersurface::new("hq", rho).unwrap()
    }

    fn origin(nn: usize) -> Vec<ComplexRational> {
        vec![ComplexRational::zero(); nn]
    }

    #[test]
    fn lagrange_handles_zero_diagonal() {
        // z1 z̄2 + z2 z̄1
        let mut k = zero_matrix(2);
        k[0][1] = ComplexRational::one();
        k[1][0] = ComplexRational::one();
        let (p, d) = congruence_diagonalize(&k).unwrap();
        assert_eq!(d.iter().filter(|x| x.is_negative()).count(), 1);
        // PᵀKP̄ is diagonal
        for a in 0..2 {
            for b in 0..2 {
                let mut s = ComplexRational::zero();
                for i in 0..2 {
                    for j in 0..2 {
                        s += &(&(&p[i][a] * &k[i][j]) * &p[j][b].conj());
                    }
                }
                if a == b {
                    assert_eq!(s, ComplexRational::real(d[a].clone()));
                } else {
                    assert!(s.is_zero());
                }
            }
        }
    }

    #[test]
    fn hyperquadric_is_already_prepared() {
        let m = hyperquadric(3, 1);
        let p = prepare_at_point(&m, &origin(4)).unwrap();
        assert_eq!(p.ell, 1);
        assert!(p.quartic22.is_zero());
        assert!(p.dropped.is_zero());
        assert!(p.replay(&m).unwrap().exact);
    }

    #[test]
    fn orientation_flip() {
        // v = −|z1|² − |z2|² + |z3|², expected ℓ = 1 after flipping
        let nn = 4;
        let mut rho = RealBipoly::im_of(&HoloPoly::var(nn, 3));
        rho = &(&(&rho + &RealBipoly::abs_sq(nn, 0)) + &RealBipoly::abs_sq(nn, 1)) - &RealBipoly::abs_sq(nn, 2);
        let m = Hypersurface::new("flip", rho).unwrap();
        let p = prepare_at_point(&m, &origin(nn)).unwrap();
        assert_eq!(p.ell, 1);
        assert_eq!(p.orientation, -1);
        assert!(p.replay(&m).unwrap().exact);
    }

    #[test]
    fn sphere_at_north_pole() {
        let rho = &(&RealBipoly::abs_sq(2, 0) + &RealBipoly::abs_sq(2, 1)) - &RealBipoly::one(2);
        let m = Hypersurface::new("sphere", rho).unwrap();
        let pt = vec![ComplexRational::zero(), ComplexRational::one()];
        let p = prepare_at_point(&m, &pt).unwrap();
        assert_eq!(p.ell, 0);
        assert!(p.replay(&m).unwrap().exact);
        // n = 1 has no traceless quartic; the sphere's Q is a multiple of |z|⁴.
        let q = &*p.quartic22;
        assert!(q.terms().all(|(a, b, _)| a.degree() == 2 && b.degree() == 2));
    }

    #[test]
    fn generic_terms_are_normalized() {
        // Im w = |z1|² − |z2|² + Re(z1² z̄2) + u|z1|² + Re(z1 w) + |z1|²|z2|²
        let nn = 3;
        let w = HoloPoly::var(nn, 2);
        let z1 = HoloPoly::var(nn, 0);
        let z2 = HoloPoly::var(nn, 1);
        let mut phi = &RealBipoly::abs_sq(nn, 0) - &RealBipoly::abs_sq(nn, 1);
        phi = &phi + &RealBipoly::re_monomial(MultiIndex(vec![2, 0, 0]), MultiIndex(vec![0, 1, 0]), ComplexRational::one());
        phi = &phi + &(&RealBipoly::re_of(&w) * &RealBipoly::abs_sq(nn, 0));
        phi = &phi + &RealBipoly::re_of(&(&z1 * &w));
        phi = &phi + &(&RealBipoly::abs_sq(nn, 0) * &RealBipoly::abs_sq(nn, 1)).scale(&rat(3, 2));
        let _ = z2;
        let rho = &RealBipoly::im_of(&w) - &phi;
        let m = Hypersurface::new("generic", rho).unwrap();
        let p = prepare_at_point(&m, &origin(nn)).unwrap();
        assert_eq!(p.ell, 1);
        assert!(p.passes > 1);
        assert!(!p.removed_21.is_zero());
        let rep = p.replay(&m).unwrap();
        assert!(rep.exact, "{:?}", rep.mismatched_terms);
    }

    #[test]
    fn spherical_images_have_zero_tensor() {
        // Hyperquadric and unit sphere pulled back by a nonlinear biholomorphism fixing the origin.
        let nn = 4;
        let v = |j| HoloPoly::var(nn, j);
        let c = |a, b| ComplexRational::from_ints(a, b);
        let f = BiholoSubstitution::new(
            nn,
            vec![
                &(&v(0) + &(&v(1) * &v(2)).scale(&c(1, 2))) + &(&v(0) * &v(3)).scale(&c(-1, 1)),
                &(&v(1) + &v(0).pow(2).scale(&c(0, 3))) + &(&(&v(2) * &v(3)) * &v(0)).scale(&c(2, 0)),
                &(&v(2) + &(&v(0) * &v(1)).scale(&c(1, -1))) + &v(1).pow(3),
                &(&v(3) + &v(1).pow(2).scale(&c(3, 1))) + &(&v(0) * &v(3)).scale(&c(1, 1)),
            ],
        )
        .unwrap();
        let hq = hyperquadric(3, 1);
        let m = Hypersurface::new("hq image", hq.rho().substitute(&f).unwrap()).unwrap();
        let p = prepare_at_point(&m, &origin(nn)).unwrap();
        assert!(p.replay(&m).unwrap().exact);
        let t = crate::cmw::cmw_tensor(&p).unwrap();
        assert!(t.is_zero(), "{}", p.quartic22);

        let mut rho = -&RealBipoly::one(nn);
        for j in 0..nn {
            rho = &rho + &RealBipoly::abs_sq(nn, j);
        }
        let sphere = Hypersurface::new("sphere", rho).unwrap();
        let mut pt = origin(nn);
        pt[3] = ComplexRational::one();
        let t = crate::cmw::cmw_tensor(&prepare_at_point(&sphere, &pt).unwrap()).unwrap();
        assert!(t.is_zero());
    }

    #[test]
    fn degenerate_point_is_rejected() {
        let nn = 3;
        let rho = &RealBipoly::im_of(&HoloPoly::var(nn, 2)) - &RealBipoly::abs_sq(nn, 0);
        let m = Hypersurface::new("degenerate", rho).unwrap();
        assert!(matches!(prepare_at_point(&m, &origin(nn)), Err(CmwError::LeviDegenerateAtPoint { .. })));
    }
}
