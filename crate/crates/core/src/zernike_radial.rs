//! Radial polynomials `R_n^|m|(r) = r^|m| P_{(n-|m|)/2}^(0,|m|)(2r^2 - 1)` and their
//! radial derivatives.
//!
//! Three independent ways to get `(R_n^|m|)^(k)`:
//!
//! 1. [`radial_derivative_exact`]: differentiate the exact coefficient vector.
//! 2. [`radial_derivative_recurrence`]: express `R'` as a combination of lower-order
//!    radial polynomials and iterate ([`RadialCombination`]).
//! 3. [`radial_derivative_gegenbauer`]: differentiate the Chebyshev expansion term by
//!    term, using `T_l^(k) = 2^(k-1) (k-1)! l C_{l-k}^k`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::classical_polys::{
    chebyshev_series_eval, gegenbauer_c_shared, gegenbauer_eval_float, jacobi_poly, JacobiParams,
};
use crate::connection::expansion;
use crate::error::{Error, Result};
use crate::exact_arith::{factorial, from_biguint, int, to_f64, BigRational, RationalPoly};

/// Admissible `(n, m)` pair: `n - |m|` even and non-negative. Only `|m|` is stored.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RadialIndex {
    n: u32,
    m: u32,
}

impl RadialIndex {
    pub fn new(n: i64, m: i64) -> Result<Self> {
        let abs_m = m.unsigned_abs();
        if n < 0 || abs_m > n as u64 || !(n as u64 - abs_m).is_multiple_of(2) || n > i64::from(u32::MAX) {
            return Err(Error::InvalidIndex { n, m });
        }
        Ok(Self { n: n as u32, m: abs_m as u32 })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// `|m|`.
    pub fn m(&self) -> u32 {
        self.m
    }

    /// Degree of the Jacobi factor, `(n - |m|) / 2`.
    pub fn jacobi_degree(&self) -> u32 {
        (self.n - self.m) / 2
    }

    /// All admissible indices with `n <= n_max`, ordered by `(n, m)`.
    pub fn all_up_to(n_max: u32) -> impl Iterator<Item = RadialIndex> {
        (0..=n_max).flat_map(|n| (n % 2..=n).step_by(2).map(move |m| RadialIndex { n, m }))
    }
}

impl fmt::Display for RadialIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R_{}^{}", self.n, self.m)
    }
}

/// Exact `R_n^|m|` as a polynomial in `r`.
pub fn radial_poly(idx: RadialIndex) -> RationalPoly {
    let jacobi = jacobi_poly(&JacobiParams::integer(idx.jacobi_degree(), 0, idx.m));
    let two_r2_minus_one = RationalPoly::from_integers(&[-1, 0, 2]);
    jacobi.compose(&two_r2_minus_one).shift(idx.m as usize)
}

/// Degrees up to which [`RadialEvaluator`] evaluates the exact polynomial at the exact
/// value of the input float. Past this it sums the Chebyshev series instead.
pub const EXACT_EVAL_MAX_DEGREE: u32 = 100;

/// Reusable floating-point evaluator for one `R_n^|m|` on `[0, 1]`.
#[derive(Clone, Debug)]
pub struct RadialEvaluator {
    idx: RadialIndex,
    route: EvalRoute,
}

#[derive(Clone, Debug)]
enum EvalRoute {
    Exact(RationalPoly),
    /// Dense Chebyshev coefficients indexed by order.
    Chebyshev(Vec<f64>),
}

impl RadialEvaluator {
    pub fn new(idx: RadialIndex) -> Self {
        let route = if idx.n <= EXACT_EVAL_MAX_DEGREE {
            EvalRoute::Exact(radial_poly(idx))
        } else {
            EvalRoute::Chebyshev(expansion(idx).dense_f64())
        };
        Self { idx, route }
    }

    pub fn index(&self) -> RadialIndex {
        self.idx
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        check_unit_interval(r)?;
        Ok(match &self.route {
            EvalRoute::Exact(poly) => {
                let x = BigRational::from_float(r).expect("finite after domain check");
                to_f64(&poly.eval(&x))
            }
            EvalRoute::Chebyshev(coeffs) => chebyshev_series_eval(coeffs, r),
        })
    }
}

/// `Error::Domain` unless `0 <= r <= 1`.
pub fn check_unit_interval(r: f64) -> Result<()> {
    if (0.0..=1.0).contains(&r) {
        Ok(())
    } else {
        Err(Error::Domain { value: r, domain: "[0, 1]" })
    }
}

/// `R_n^|m|(r)` in floating point for `0 <= r <= 1`.
pub fn radial_eval(idx: RadialIndex, r: f64) -> Result<f64> {
    RadialEvaluator::new(idx).eval(r)
}

/// Exact `(R_n^|m|)^(k)` by formal differentiation; zero when `k > n`.
pub fn radial_derivative_exact(idx: RadialIndex, k: u32) -> RationalPoly {
    radial_poly(idx).derivative(k as usize)
}

/// A finite linear combination `sum c_(n,m) R_n^m` of radial polynomials.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RadialCombination {
    terms: BTreeMap<RadialIndex, BigRational>,
}

impl RadialCombination {
    pub fn single(idx: RadialIndex) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(idx, BigRational::one());
        Self { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&RadialIndex, &BigRational)> {
        self.terms.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, idx: RadialIndex, c: BigRational) {
        let entry = self.terms.entry(idx).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&idx);
        }
    }

    /// Derivative, using
    /// `(R_n^m)' = sum_j (n - 2j) R_{n-1-2j}^{|m-1|} + sum_j (n - 2j) R_{n-1-2j}^{|m+1|}`
    /// where each sum runs over `0 <= j <= (n - 1 - |m ± 1|) / 2` and is empty when that
    /// bound is negative.
    pub fn differentiate(&self) -> Self {
        let mut out = Self::default();
        for (idx, c) in &self.terms {
            let n = i64::from(idx.n);
            let m = i64::from(idx.m);
            for shifted in [(m - 1).abs(), m + 1] {
                let top = n - 1 - shifted;
                if top < 0 {
                    continue;
                }
                for j in 0..=top / 2 {
                    let term = RadialIndex::new(n - 1 - 2 * j, shifted).expect("parity preserved");
                    out.add_term(term, c * int(n - 2 * j));
                }
            }
        }
        out
    }

    pub fn to_poly(&self) -> RationalPoly {
        self.terms
            .iter()
            .fold(RationalPoly::zero(), |acc, (idx, c)| &acc + &radial_poly(*idx).scale(c))
    }
}

/// `(R_n^|m|)'` through the lower-order recurrence, as an exact polynomial.
pub fn radial_derivative_recurrence(idx: RadialIndex) -> RationalPoly {
    RadialCombination::single(idx).differentiate().to_poly()
}

/// `(R_n^|m|)^(k)` by applying the first-derivative recurrence `k` times.
pub fn radial_derivative_recurrence_k(idx: RadialIndex, k: u32) -> RationalPoly {
    let mut combo = RadialCombination::single(idx);
    for _ in 0..k {
        if combo.is_empty() {
            break;
        }
        combo = combo.differentiate();
    }
    combo.to_poly()
}

/// `2^(k-1) (k-1)!`, the common factor in `T_l^(k) = 2^(k-1) (k-1)! l C_{l-k}^k`.
fn gegenbauer_prefactor(k: u32) -> BigRational {
    debug_assert!(k >= 1);
    from_biguint(factorial(u64::from(k - 1)) << (k - 1))
}

/// Exact `(R_n^|m|)^(k)` assembled as `sum_j a_{n-2j} 2^(k-1) (k-1)! (n-2j) C_{n-2j-k}^k`.
///
/// For `k = 0` this is the plain Chebyshev reconstruction.
pub fn radial_derivative_gegenbauer_poly(idx: RadialIndex, k: u32) -> RationalPoly {
    gegenbauer_route_poly(&expansion(idx), k)
}

pub(crate) fn gegenbauer_route_poly(exp: &crate::connection::ChebyshevExpansion, k: u32) -> RationalPoly {
    if k == 0 {
        return exp.to_poly();
    }
    let prefactor = gegenbauer_prefactor(k);
    let mut acc = RationalPoly::zero();
    for (order, a) in exp.terms() {
        if a.is_zero() {
            continue;
        }
        let Some(c) = gegenbauer_c_shared(i64::from(order) - i64::from(k), k) else {
            continue;
        };
        let scale = &prefactor * int(order.into()) * a;
        acc = &acc + &c.scale(&scale);
    }
    acc
}

/// Floating-point `(R_n^|m|)^(k)(r)` via the Gegenbauer form of the Chebyshev derivatives.
///
/// Every term is non-negative at `r = 1` and the Gegenbauer values come from a stable
/// forward recurrence, so this is the accurate route near the maximiser. `k = 0` sums the
/// Chebyshev series itself.
pub fn radial_derivative_gegenbauer(idx: RadialIndex, k: u32, r: f64) -> Result<f64> {
    check_unit_interval(r)?;
    Ok(GegenbauerRoute::new(idx).eval(k, r))
}

/// Cached floating-point expansion coefficients for repeated Gegenbauer-route evaluation.
#[derive(Clone, Debug)]
pub struct GegenbauerRoute {
    idx: RadialIndex,
    /// `(order, a_order)` with zero coefficients dropped.
    terms: Vec<(u32, f64)>,
    dense: Vec<f64>,
}

impl GegenbauerRoute {
    pub fn new(idx: RadialIndex) -> Self {
        let exp = expansion(idx);
        let terms = exp
            .terms()
            .filter(|(_, a)| !a.is_zero())
            .map(|(order, a)| (order, to_f64(a)))
            .collect();
        Self { idx, terms, dense: exp.dense_f64() }
    }

    pub fn index(&self) -> RadialIndex {
        self.idx
    }

    /// Caller guarantees `r` is in range.
    pub fn eval(&self, k: u32, r: f64) -> f64 {
        if k == 0 {
            return chebyshev_series_eval(&self.dense, r);
        }
        let prefactor = (1..k).fold(2f64.powi(k as i32 - 1), |acc, j| acc * f64::from(j));
        let sum: f64 = self
            .terms
            .iter()
            .map(|&(order, a)| a * f64::from(order) * gegenbauer_eval_float(i64::from(order) - i64::from(k), k, r))
            .sum();
        prefactor * sum
    }
}
