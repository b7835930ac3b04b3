//! Exact rational scalars and dense univariate polynomials.
//!
//! Everything in this crate that claims to be "exact" bottoms out here. Scalars are
//! [`BigRational`] (always reduced, denominator positive), polynomials are
//! [`RationalPoly`], a dense ascending coefficient vector with trailing zeros trimmed.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use num_rational::BigRational;

/// `n / d` as an exact rational. Panics on `d == 0`.
pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn from_biguint(n: BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// The exact value of a finite float (every finite `f64` is a dyadic rational).
pub fn from_f64_exact(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

/// Nearest `f64` to an exact rational. Saturates to ±inf for out-of-range magnitudes.
pub fn to_f64(x: &BigRational) -> f64 {
    match x.to_f64() {
        Some(v) => v,
        None if x.is_negative() => f64::NEG_INFINITY,
        None => f64::INFINITY,
    }
}

/// Natural logarithm of a positive big integer, without overflowing through `f64`.
pub fn ln_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().map_or(f64::INFINITY, f64::ln);
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural logarithm of a positive rational. Returns NaN for non-positive input.
pub fn ln_rational(x: &BigRational) -> f64 {
    if !x.is_positive() {
        return f64::NAN;
    }
    let num = x.numer().magnitude();
    let den = x.denom().magnitude();
    ln_biguint(num) - ln_biguint(den)
}

/// Product of the integers in the half-open range `(lo, hi]`; 1 when the range is empty.
pub fn range_product(lo: u64, hi: u64) -> BigUint {
    let mut acc = BigUint::one();
    for v in (lo + 1)..=hi {
        acc *= v;
    }
    acc
}

pub fn factorial(n: u64) -> BigUint {
    range_product(0, n)
}

/// Binomial coefficient; zero outside `0 <= k <= n`.
pub fn binomial(n: u64, k: i64) -> BigUint {
    if k < 0 || k as u64 > n {
        return BigUint::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigUint::one();
    // acc = C(n - k + j, j) after step j, always an integer
    for j in 1..=k {
        acc *= n - k + j;
        acc /= j;
    }
    acc
}

/// Rising factorial `(alpha)_k = alpha (alpha + 1) ... (alpha + k - 1)`, with `(alpha)_0 = 1`.
pub fn pochhammer(alpha: &BigRational, k: u32) -> BigRational {
    let mut acc = BigRational::one();
    let mut term = alpha.clone();
    for _ in 0..k {
        acc *= &term;
        term += BigRational::one();
    }
    acc
}

/// Dense univariate polynomial with exact rational coefficients, ascending powers.
///
/// Trailing zero coefficients are never stored, so the zero polynomial is the empty
/// vector and equality is plain field-wise comparison.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RationalPoly {
    coeffs: Vec<BigRational>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Subtract,
    Multiply,
}

/// `a op b` in canonical form.
pub fn poly_arith(a: &RationalPoly, b: &RationalPoly, op: PolyOp) -> RationalPoly {
    match op {
        PolyOp::Add => a + b,
        PolyOp::Subtract => a - b,
        PolyOp::Multiply => a * b,
    }
}

impl RationalPoly {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The identity polynomial `x`.
    pub fn x() -> Self {
        Self::monomial(BigRational::one(), 1)
    }

    /// `c * x^degree`.
    pub fn monomial(c: BigRational, degree: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); degree + 1];
        coeffs[degree] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(coeffs: Vec<BigRational>) -> Self {
        let mut p = Self { coeffs };
        p.normalize();
        p
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| int(c)).collect())
    }

    /// Trims trailing zeros. Idempotent.
    pub fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigRational> {
        self.coeffs
    }

    /// Coefficient of `x^power`, zero beyond the degree.
    pub fn coeff(&self, power: usize) -> BigRational {
        self.coeffs.get(power).cloned().unwrap_or_else(BigRational::zero)
    }

    /// `None` for the zero polynomial (degree −∞).
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Multiplies by `x^power`.
    pub fn shift(&self, power: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigRational::zero(); power];
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    /// `self(inner(x))`, by Horner's scheme.
    pub fn compose(&self, inner: &RationalPoly) -> Self {
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &Self::constant(c.clone());
        }
        acc
    }

    /// k-th formal derivative.
    pub fn derivative(&self, k: usize) -> Self {
        if k == 0 {
            return self.clone();
        }
        if k >= self.coeffs.len() {
            return Self::zero();
        }
        let coeffs = self.coeffs[k..]
            .iter()
            .enumerate()
            .map(|(j, c)| {
                // falling factorial (j + k)! / j!
                let factor = range_product(j as u64, (j + k) as u64);
                c * from_biguint(factor)
            })
            .collect();
        Self::from_coeffs(coeffs)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        // Horner over integers with a single reduction at the end; reducing after every
        // step dominates the cost at high degree.
        let Some(degree) = self.degree() else {
            return BigRational::zero();
        };
        let denom = self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let scaled = |c: &BigRational| c.numer() * (&denom / c.denom());
        let (p, q) = (x.numer(), x.denom());
        let mut acc = scaled(&self.coeffs[degree]);
        let mut q_pow = BigInt::one();
        for c in self.coeffs[..degree].iter().rev() {
            q_pow *= q;
            acc = acc * p + scaled(c) * &q_pow;
        }
        BigRational::new(acc, denom * q_pow)
    }

    /// Horner evaluation with the coefficients rounded to `f64`. Only trustworthy for
    /// low degree or small coefficients; the radial module has stable routes.
    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + to_f64(c))
    }
}

pub fn poly_compose(outer: &RationalPoly, inner: &RationalPoly) -> RationalPoly {
    outer.compose(inner)
}

pub fn poly_derivative(a: &RationalPoly, k: usize) -> RationalPoly {
    a.derivative(k)
}

pub fn poly_eval(a: &RationalPoly, x: &BigRational) -> BigRational {
    a.eval(x)
}

impl Add for &RationalPoly {
    type Output = RationalPoly;

    fn add(self, rhs: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect();
        RationalPoly::from_coeffs(coeffs)
    }
}

impl Sub for &RationalPoly {
    type Output = RationalPoly;

    fn sub(self, rhs: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect();
        RationalPoly::from_coeffs(coeffs)
    }
}

impl Mul for &RationalPoly {
    type Output = RationalPoly;

    fn mul(self, rhs: &RationalPoly) -> RationalPoly {
        if self.is_zero() || rhs.is_zero() {
            return RationalPoly::zero();
        }
        let mut coeffs = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        RationalPoly::from_coeffs(coeffs)
    }
}

impl Neg for &RationalPoly {
    type Output = RationalPoly;

    fn neg(self) -> RationalPoly {
        RationalPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

macro_rules! forward_owned_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for RationalPoly {
            type Output = RationalPoly;

            fn $method(self, rhs: RationalPoly) -> RationalPoly {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (power, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let magnitude = c.abs();
            let sign = if c.numer().sign() == Sign::Minus { "-" } else { "+" };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let unit = magnitude.is_one() && power > 0;
            if !unit {
                if magnitude.is_integer() {
                    write!(f, "{magnitude}")?;
                } else {
                    write!(f, "({magnitude})")?;
                }
            }
            match power {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{power}")?,
            }
        }
        Ok(())
    }
}
