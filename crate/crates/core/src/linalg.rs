//! Exact rational linear solves and small Hermitian eigenproblems.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Outcome of a rational linear solve.
#[derive(Clone, Debug, PartialEq)]
pub enum LinearSolution {
    /// One solution; free variables set to zero. `rank` is the rank of the coefficient matrix.
    Solved { x: Vec<BigRational>, rank: usize },
    Inconsistent { rank: usize },
}

/// Solves `A x = b` exactly by Gauss-Jordan elimination.
pub fn solve_rational(a: &[Vec<BigRational>], b: &[BigRational], unknowns: usize) -> LinearSolution {
    let rows = a.len();
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.resize(unknowns, BigRational::zero());
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..unknowns {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = BigRational::from_integer(1.into()) / &m[r][c];
        for v in m[r].iter_mut().skip(c) {
            *v *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row).skip(c) {
                *v -= &f * pv;
            }
        }
        pivots.push(c);
        r += 1;
    }
    let rank = pivots.len();
    if m.iter().skip(rank).any(|row| !row[unknowns].is_zero()) {
        return LinearSolution::Inconsistent { rank };
    }
    let mut x = vec![BigRational::zero(); unknowns];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][unknowns].clone();
    }
    LinearSolution::Solved { x, rank }
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Largest deviation from Hermitian symmetry, `max |m_ij − conj(m_ji)|`.
pub fn hermitian_defect(m: &DMatrix<Complex64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Real singular values, descending.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn max_abs_rational(v: &[BigRational]) -> BigRational {
    v.iter().map(|x| x.abs()).fold(BigRational::zero(), |a, b| if b > a { b } else { a })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermpoly::rational::rat;

    #[test]
    fn solves_and_detects_inconsistency() {
        let a = vec![vec![rat(1, 1), rat(1, 1)], vec![rat(1, 1), rat(-1, 1)]];
        let b = vec![rat(3, 1), rat(1, 1)];
        match solve_rational(&a, &b, 2) {
            LinearSolution::Solved { x, rank } => {
                assert_eq!(x, vec![rat(2, 1), rat(1, 1)]);
                assert_eq!(rank, 2);
            }
            other => panic!("{other:?}"),
        }
        let a = vec![vec![rat(1, 1), rat(1, 1)], vec![rat(2, 1), rat(2, 1)]];
        let b = vec![rat(1, 1), rat(3, 1)];
        assert_eq!(solve_rational(&a, &b, 2), LinearSolution::Inconsistent { rank: 1 });
    }

    #[test]
    fn hermitian_spectrum() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(2.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0), Complex64::new(2.0, 0.0)],
        );
        let e = hermitian_eigenvalues(&m);
        assert!((e[0] - 1.0).abs() < 1e-12 && (e[1] - 3.0).abs() < 1e-12);
    }
}
