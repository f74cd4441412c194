use num_complex::Complex64;

use super::bipoly::Bipoly;

/// Double-precision copy of a [`Bipoly`] for fast repeated evaluation.
#[derive(Clone, Debug)]
pub struct FloatPoly {
    n: usize,
    max_exp: usize,
    // (variable index, exponent) pairs for z then z̄.
    terms: Vec<(Vec<(usize, usize)>, Vec<(usize, usize)>, Complex64)>,
}

impl FloatPoly {
    pub fn new(p: &Bipoly) -> Self {
        let mut max_exp = 0usize;
        let mut terms = Vec::with_capacity(p.num_terms());
        for (a, b, c) in p.terms() {
            let za: Vec<(usize, usize)> =
                a.0.iter().enumerate().filter(|(_, &e)| e > 0).map(|(j, &e)| (j, e as usize)).collect();
            let zb: Vec<(usize, usize)> =
                b.0.iter().enumerate().filter(|(_, &e)| e > 0).map(|(j, &e)| (j, e as usize)).collect();
            for &(_, e) in za.iter().chain(zb.iter()) {
                max_exp = max_exp.max(e);
            }
            terms.push((za, zb, c.to_c64()));
        }
        Self { n: p.n(), max_exp, terms }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn powers(&self, z: &[Complex64]) -> Vec<Vec<Complex64>> {
        z.iter()
            .map(|&v| {
                let mut row = Vec::with_capacity(self.max_exp + 1);
                let mut acc = Complex64::new(1.0, 0.0);
                row.push(acc);
                for _ in 0..self.max_exp {
                    acc *= v;
                    row.push(acc);
                }
                row
            })
            .collect()
    }

    /// Evaluates at `z` with `z̄ = conj(z)`. Panics on a dimension mismatch.
    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        let xi: Vec<Complex64> = z.iter().map(|v| v.conj()).collect();
        self.eval_pair(z, &xi)
    }

    pub fn eval_pair(&self, z: &[Complex64], xi: &[Complex64]) -> Complex64 {
        assert_eq!(z.len(), self.n, "FloatPoly dimension mismatch");
        assert_eq!(xi.len(), self.n, "FloatPoly dimension mismatch");
        let pz = self.powers(z);
        let px = self.powers(xi);
        let mut acc = Complex64::new(0.0, 0.0);
        for (za, zb, c) in &self.terms {
            let mut m = *c;
            for &(j, e) in za {
                m *= pz[j][e];
            }
            for &(j, e) in zb {
                m *= px[j][e];
            }
            acc += m;
        }
        acc
    }

    /// `Σ |c_{αβ} z^α z̄^β|`, the natural scale for residual tolerances.
    pub fn abs_term_sum(&self, z: &[Complex64]) -> f64 {
        let pz = self.powers(z);
        let mut acc = 0.0;
        for (za, zb, c) in &self.terms {
            let mut m = c.norm();
            for &(j, e) in za.iter().chain(zb.iter()) {
                m *= pz[j][e].norm();
            }
            acc += m;
        }
        acc
    }
}
