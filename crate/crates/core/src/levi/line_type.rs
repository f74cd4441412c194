use num_rational::BigRational;
use num_traits::Signed;
use rand::Rng;
use serde::Serialize;

use super::{Hypersurface, LeviError};
use crate::hermpoly::{BiholoSubstitution, ComplexRational, HoloPoly};
use crate::parallel::stream_rng;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DirectionOrder {
    pub direction: Vec<String>,
    /// `None` when `ρ(p + t v) ≡ 0`, i.e. the line lies in `M`.
    pub order: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LineTypeReport {
    pub per_direction: Vec<DirectionOrder>,
    /// Maximal order over the supplied directions; `None` means a complex line is contained.
    pub max_order: Option<u32>,
    pub argmax: usize,
    pub contains_line: bool,
    /// Directions are sampled, so this is a lower bound for the supremum over all lines.
    pub lower_bound_only: bool,
}

/// Order of vanishing at `t = 0` of `t ↦ ρ(p + t v)` as a polynomial in `(t, t̄)`, per direction.
pub fn line_type(m: &Hypersurface, p: &[ComplexRational], directions: &[Vec<ComplexRational>]) -> Result<LineTypeReport, LeviError> {
    let n = m.n_ambient();
    if p.len() != n {
        return Err(LeviError::InvalidInput(format!("point has {} coordinates, expected {n}", p.len())));
    }
    if directions.is_empty() {
        return Err(LeviError::InvalidInput("no directions supplied".into()));
    }
    let value = m.rho().eval_exact(p)?;
    if !value.is_zero() {
        return Err(LeviError::NotOnSurface(value.to_string()));
    }
    let mut per_direction = Vec::with_capacity(directions.len());
    for v in directions {
        if v.len() != n || v.iter().all(ComplexRational::is_zero) {
            return Err(LeviError::InvalidInput("direction must be a nonzero vector of the ambient dimension".into()));
        }
        let comps = (0..n)
            .map(|j| HoloPoly::affine(p[j].clone(), std::slice::from_ref(&v[j])))
            .collect();
        let line = BiholoSubstitution::new(1, comps)?;
        let restricted = m.rho().substitute(&line)?;
        per_direction.push(DirectionOrder { direction: v.iter().map(|c| c.to_string()).collect(), order: restricted.min_degree() });
    }
    let contains_line = per_direction.iter().any(|d| d.order.is_none());
    let (argmax, max_order) = if contains_line {
        (per_direction.iter().position(|d| d.order.is_none()).unwrap_or(0), None)
    } else {
        let (i, d) = per_direction
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.order.cmp(&b.1.order).then(b.0.cmp(&a.0)))
            .expect("directions are nonempty");
        (i, d.order)
    };
    Ok(LineTypeReport { per_direction, max_order, argmax, contains_line, lower_bound_only: true })
}

/// Coordinate directions followed by `random` seeded directions with small Gaussian-integer entries.
pub fn default_directions(n: usize, random: usize, seed: u64) -> Vec<Vec<ComplexRational>> {
    let mut out: Vec<Vec<ComplexRational>> = (0..n)
        .map(|j| (0..n).map(|k| if j == k { ComplexRational::one() } else { ComplexRational::zero() }).collect())
        .collect();
    for i in 0..random {
        let mut rng = stream_rng(seed, i);
        loop {
            let v: Vec<ComplexRational> =
                (0..n).map(|_| ComplexRational::from_ints(rng.random_range(-5..=5), rng.random_range(-5..=5))).collect();
            if v.iter().any(|c| !c.is_zero()) {
                out.push(v);
                break;
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KnBoundCheck {
    pub valid: bool,
    /// `k² / (l(2k − l))`
    pub bound: String,
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub violated: Option<String>,
}

/// Checks `2 < |c| < k²/(l(2k−l))` exactly.
pub fn kn_parameter_check(l: u32, k: u32, c: &BigRational) -> Result<KnBoundCheck, LeviError> {
    if l == 0 || l >= k {
        return Err(LeviError::InvalidInput(format!("need 0 < l < k, got l = {l}, k = {k}")));
    }
    let (l_r, k_r) = (BigRational::from_integer(l.into()), BigRational::from_integer(k.into()));
    let bound = &k_r * &k_r / (&l_r * (BigRational::from_integer(2.into()) * &k_r - &l_r));
    let abs_c = c.abs();
    let two = BigRational::from_integer(2.into());
    let lower_ok = abs_c > two;
    let upper_ok = abs_c < bound;
    let violated = if !lower_ok {
        Some(format!("2 < |c| violated: |c| = {abs_c}"))
    } else if !upper_ok {
        Some(format!("|c| < {bound} violated: |c| = {abs_c}"))
    } else {
        None
    };
    Ok(KnBoundCheck { valid: lower_ok && upper_ok, bound: bound.to_string(), lower_ok, upper_ok, violated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermpoly::rational::rat;
    use crate::hermpoly::RealBipoly;

    #[test]
    fn kn_bounds() {
        let ok = kn_parameter_check(1, 4, &rat(15, 7)).unwrap();
        assert!(ok.valid);
        assert_eq!(ok.bound, "16/7");
        assert!(!kn_parameter_check(1, 4, &rat(2, 1)).unwrap().valid);
        assert!(!kn_parameter_check(1, 4, &rat(7, 3)).unwrap().valid);
        assert!(kn_parameter_check(4, 4, &rat(3, 1)).is_err());
    }

    #[test]
    fn levi_flat_contains_line() {
        let rho = RealBipoly::im_of(&HoloPoly::var(2, 1));
        let m = Hypersurface::new("flat", rho).unwrap();
        let p = vec![ComplexRational::zero(), ComplexRational::zero()];
        let r = line_type(&m, &p, &[vec![ComplexRational::one(), ComplexRational::zero()]]).unwrap();
        assert!(r.contains_line);
        assert_eq!(r.max_order, None);
    }

    #[test]
    fn model_has_type_two() {
        let rho = &RealBipoly::im_of(&HoloPoly::var(2, 1)) - &RealBipoly::abs_sq(2, 0);
        let m = Hypersurface::new("model", rho).unwrap();
        let p = vec![ComplexRational::zero(), ComplexRational::zero()];
        let r = line_type(&m, &p, &[vec![ComplexRational::one(), ComplexRational::zero()]]).unwrap();
        assert_eq!(r.max_order, Some(2));
    }
}
