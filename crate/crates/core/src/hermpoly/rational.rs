//! Exact complex-rational coefficients.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::PolyError;

/// A complex number `re + i·im` with arbitrary-precision rational parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ComplexRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl ComplexRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Self { re, im: BigRational::zero() }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        Self::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::real(BigRational::new(num.into(), den.into()))
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_ints(1, 0)
    }

    pub fn i() -> Self {
        Self::from_ints(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self::new(&self.re * r, &self.im * r)
    }

    pub fn inv(&self) -> Result<Self, PolyError> {
        let d = self.norm_sqr();
        if d.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        Ok(Self::new(&self.re / &d, -&self.im / &d))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, PolyError> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    /// Exact conversion of a finite float pair (every finite `f64` is a dyadic rational).
    pub fn from_c64_exact(z: Complex64) -> Self {
        Self::new(rat_from_f64_exact(z.re), rat_from_f64_exact(z.im))
    }

    /// Conversion through the shortest decimal representation, so `0.1` becomes `1/10`.
    pub fn from_c64_decimal(z: Complex64) -> Self {
        Self::new(rat_from_f64_decimal(z.re), rat_from_f64_decimal(z.im))
    }
}

impl fmt::Display for ComplexRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) => {
                if self.im.is_negative() {
                    write!(f, "({} - {}i)", self.re, -self.im.clone())
                } else {
                    write!(f, "({} + {}i)", self.re, self.im)
                }
            }
        }
    }
}

impl<'a> Add<&'a ComplexRational> for &'a ComplexRational {
    type Output = ComplexRational;
    fn add(self, o: &ComplexRational) -> ComplexRational {
        ComplexRational::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl<'a> Sub<&'a ComplexRational> for &'a ComplexRational {
    type Output = ComplexRational;
    fn sub(self, o: &ComplexRational) -> ComplexRational {
        ComplexRational::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl<'a> Mul<&'a ComplexRational> for &'a ComplexRational {
    type Output = ComplexRational;
    fn mul(self, o: &ComplexRational) -> ComplexRational {
        ComplexRational::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl Add for ComplexRational {
    type Output = ComplexRational;
    fn add(self, o: Self) -> Self {
        &self + &o
    }
}

impl Sub for ComplexRational {
    type Output = ComplexRational;
    fn sub(self, o: Self) -> Self {
        &self - &o
    }
}

impl Mul for ComplexRational {
    type Output = ComplexRational;
    fn mul(self, o: Self) -> Self {
        &self * &o
    }
}

/// Panics on a zero divisor; use [`ComplexRational::checked_div`] where that can happen.
impl Div for ComplexRational {
    type Output = ComplexRational;
    fn div(self, o: Self) -> Self {
        self.checked_div(&o).expect("division by zero complex rational")
    }
}

impl Neg for ComplexRational {
    type Output = ComplexRational;
    fn neg(self) -> Self {
        ComplexRational::new(-self.re, -self.im)
    }
}

impl Neg for &ComplexRational {
    type Output = ComplexRational;
    fn neg(self) -> ComplexRational {
        ComplexRational::new(-self.re.clone(), -self.im.clone())
    }
}

impl AddAssign<&ComplexRational> for ComplexRational {
    fn add_assign(&mut self, o: &ComplexRational) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl SubAssign<&ComplexRational> for ComplexRational {
    fn sub_assign(&mut self, o: &ComplexRational) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

impl MulAssign<&ComplexRational> for ComplexRational {
    fn mul_assign(&mut self, o: &ComplexRational) {
        *self = &*self * o;
    }
}

impl From<BigRational> for ComplexRational {
    fn from(r: BigRational) -> Self {
        Self::real(r)
    }
}

impl From<i64> for ComplexRational {
    fn from(v: i64) -> Self {
        Self::from_ints(v, 0)
    }
}

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

pub fn rat_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Very large numerator/denominator pairs: scale by bit length first.
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = nb - db;
    let scaled = if shift > 0 {
        r / BigRational::from_integer(BigInt::one() << (shift as usize))
    } else {
        r * BigRational::from_integer(BigInt::one() << ((-shift) as usize))
    };
    scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
}

pub fn rat_from_f64_exact(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}

pub fn rat_from_f64_decimal(x: f64) -> BigRational {
    if !x.is_finite() {
        return BigRational::zero();
    }
    parse_rational(&format!("{x:e}")).unwrap_or_else(|_| rat_from_f64_exact(x))
}

/// Parses `"p/q"`, `"p"`, or a decimal such as `"-0.25"` / `"1e-3"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational, PolyError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(PolyError::Parse("empty rational".into()));
    }
    if s.contains('/') {
        let r = BigRational::from_str(s).map_err(|e| PolyError::Parse(format!("{s:?}: {e}")))?;
        return Ok(r);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i64 = s[pos + 1..]
                .parse()
                .map_err(|_| PolyError::Parse(format!("bad exponent in {s:?}")))?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((a, b)) => (a, b),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(PolyError::Parse(format!("no digits in {s:?}")));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(PolyError::Parse(format!("invalid rational {s:?}")));
    }
    let all: String = format!("{int_part}{frac_part}");
    let num = BigInt::from_str(if all.is_empty() { "0" } else { &all })
        .map_err(|e| PolyError::Parse(format!("{s:?}: {e}")))?;
    let scale = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10u32);
    let mut r = BigRational::from_integer(num);
    if scale >= 0 {
        r *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -r } else { r })
}

/// Exact square root when `r` is the square of a rational.
pub fn rational_sqrt_exact(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// Rational approximation of `sqrt(r)` for `r > 0`, refined by Newton steps in exact arithmetic.
/// Relative error after `steps` refinements from a double-precision seed is roughly `1e-16^(2^steps)`.
pub fn rational_sqrt_approx(r: &BigRational, steps: usize) -> BigRational {
    if let Some(s) = rational_sqrt_exact(r) {
        return s;
    }
    let seed = rat_to_f64(r).sqrt();
    let mut x = rat_from_f64_exact(seed);
    let two = BigRational::from_integer(2.into());
    for _ in 0..steps {
        x = (&x + r / &x) / &two;
    }
    x
}

pub fn rational_abs(r: &BigRational) -> BigRational {
    r.abs()
}

pub fn rational_one() -> BigRational {
    BigRational::one()
}
