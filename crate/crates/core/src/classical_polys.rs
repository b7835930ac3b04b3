//! Jacobi, Chebyshev (first kind) and Gegenbauer polynomials.
//!
//! Exact constructions go through three-term recurrences over [`BigRational`]. The
//! floating-point paths (Clenshaw summation for Chebyshev series, forward recurrence for
//! Gegenbauer values) are what the radial module uses for grids.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact_arith::{from_biguint, int, pochhammer, BigRational, RationalPoly};

/// Degree and weight parameters of a Jacobi polynomial `P_p^(alpha, beta)`, orthogonal for
/// `(1 - x)^alpha (1 + x)^beta` on `[-1, 1]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct JacobiParams {
    pub degree: u32,
    pub alpha: BigRational,
    pub beta: BigRational,
}

impl JacobiParams {
    /// Rejects `alpha <= -1` or `beta <= -1`, where the weight is not integrable.
    pub fn new(degree: u32, alpha: BigRational, beta: BigRational) -> Result<Self> {
        let minus_one = -BigRational::one();
        if alpha <= minus_one || beta <= minus_one {
            return Err(Error::Precondition(format!(
                "Jacobi parameters must exceed -1, got alpha={alpha}, beta={beta}"
            )));
        }
        Ok(Self { degree, alpha, beta })
    }

    /// Non-negative integer parameters, the only kind the connection coefficients need.
    pub fn integer(degree: u32, alpha: u32, beta: u32) -> Self {
        Self { degree, alpha: int(alpha.into()), beta: int(beta.into()) }
    }

    fn integer_parameters(&self) -> Option<(u32, u32)> {
        let as_u32 = |v: &BigRational| -> Option<u32> {
            if v.is_integer() && !v.is_negative() {
                u32::try_from(v.to_integer()).ok()
            } else {
                None
            }
        };
        Some((as_u32(&self.alpha)?, as_u32(&self.beta)?))
    }
}

/// Coefficients `(a1, a2, a3, a4)` of
/// `a1 P_n = (a2 + a3 x) P_{n-1} - a4 P_{n-2}`, valid for `n >= 2`.
fn jacobi_recurrence(
    n: u32,
    alpha: &BigRational,
    beta: &BigRational,
) -> (BigRational, BigRational, BigRational, BigRational) {
    let n = int(n.into());
    let one = BigRational::one();
    let two = int(2);
    let ab = alpha + beta;
    let s = &two * &n + &ab; // 2n + alpha + beta
    let a1 = &two * &n * (&n + &ab) * (&s - &two);
    let a2 = (&s - &one) * (alpha * alpha - beta * beta);
    let a3 = (&s - &two) * (&s - &one) * &s;
    let a4 = &two * (&n + alpha - &one) * (&n + beta - &one) * &s;
    (a1, a2, a3, a4)
}

/// Exact coefficient vector of `P_p^(alpha, beta)`.
pub fn jacobi_poly(params: &JacobiParams) -> RationalPoly {
    let JacobiParams { degree, alpha, beta } = params;
    let p0 = RationalPoly::one();
    if *degree == 0 {
        return p0;
    }
    let two = int(2);
    let p1 = RationalPoly::from_coeffs(vec![
        (alpha - beta) / &two,
        (alpha + beta + &two) / &two,
    ]);
    let (mut prev, mut cur) = (p0, p1);
    for n in 2..=*degree {
        let (a1, a2, a3, a4) = jacobi_recurrence(n, alpha, beta);
        let linear = RationalPoly::from_coeffs(vec![a2 / &a1, a3 / &a1]);
        let next = &(&linear * &cur) - &prev.scale(&(a4 / &a1));
        prev = cur;
        cur = next;
    }
    cur
}

/// `P_p^(alpha, beta)(0)`, by the scalar recurrence at `x = 0`. Works for any parameters.
pub fn jacobi_at_zero_recurrence(params: &JacobiParams) -> BigRational {
    let JacobiParams { degree, alpha, beta } = params;
    let mut prev = BigRational::one();
    if *degree == 0 {
        return prev;
    }
    let mut cur = (alpha - beta) / int(2);
    for n in 2..=*degree {
        let (a1, a2, _, a4) = jacobi_recurrence(n, alpha, beta);
        let next = (a2 * &cur - a4 * &prev) / a1;
        prev = cur;
        cur = next;
    }
    cur
}

/// `P_p^(alpha, beta)(0)` for integer parameters from the finite sum
/// `2^-p sum_s C(p + alpha, s) C(p + beta, p - s) (-1)^(p - s)`, in integer arithmetic.
pub fn jacobi_at_zero_sum(degree: u32, alpha: u32, beta: u32) -> BigRational {
    let p = u64::from(degree);
    let pa = p + u64::from(alpha);
    let pb = p + u64::from(beta);
    // c1 = C(pa, s), c2 = C(pb, p - s), starting at s = 0
    let mut c1 = BigUint::one();
    let mut c2 = crate::exact_arith::binomial(pb, p as i64);
    let mut sum = BigInt::zero();
    for s in 0..=p {
        let term = BigInt::from(&c1 * &c2);
        if (p - s) % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        if s < p {
            c1 = c1 * (pa - s) / (s + 1);
            // C(pb, p-s-1) = C(pb, p-s) * (p-s) / (pb - p + s + 1)
            c2 = c2 * (p - s) / (pb - p + s + 1);
        }
    }
    BigRational::new(sum, BigInt::one() << degree)
}

/// Exact `P_p^(alpha, beta)(0)`.
///
/// Integer parameters take the integer finite sum; anything else falls back to the
/// scalar recurrence. The two routes are cross-checked in the tests.
pub fn jacobi_at_zero(params: &JacobiParams) -> BigRational {
    match params.integer_parameters() {
        Some((a, b)) => jacobi_at_zero_sum(params.degree, a, b),
        None => jacobi_at_zero_recurrence(params),
    }
}

/// Whether `P_p^(alpha, beta)(0) = 0`, decided by exact evaluation only.
pub fn jacobi_zero_decision(params: &JacobiParams) -> Result<bool> {
    let (a, b) = params.integer_parameters().ok_or_else(|| {
        Error::Precondition(format!(
            "zero decision needs non-negative integer parameters, got alpha={}, beta={}",
            params.alpha, params.beta
        ))
    })?;
    Ok(jacobi_at_zero_sum(params.degree, a, b).is_zero())
}

type PolyMemo<K> = OnceLock<RwLock<HashMap<K, Arc<RationalPoly>>>>;

fn memoized<K, F>(memo: &PolyMemo<K>, key: K, build: F) -> Arc<RationalPoly>
where
    K: std::hash::Hash + Eq + Copy,
    F: FnOnce() -> RationalPoly,
{
    let table = memo.get_or_init(Default::default);
    if let Some(hit) = table.read().unwrap_or_else(|e| e.into_inner()).get(&key) {
        return Arc::clone(hit);
    }
    let built = Arc::new(build());
    let mut guard = table.write().unwrap_or_else(|e| e.into_inner());
    Arc::clone(guard.entry(key).or_insert(built))
}

static CHEBYSHEV_MEMO: PolyMemo<u32> = OnceLock::new();
static GEGENBAUER_MEMO: PolyMemo<(u32, u32)> = OnceLock::new();

/// Shared handle to the exact `T_l`.
pub fn chebyshev_t_shared(l: u32) -> Arc<RationalPoly> {
    memoized(&CHEBYSHEV_MEMO, l, || match l {
        0 => RationalPoly::one(),
        1 => RationalPoly::x(),
        _ => {
            let two_x = RationalPoly::monomial(int(2), 1);
            let prev = chebyshev_t_shared(l - 2);
            let cur = chebyshev_t_shared(l - 1);
            &(&two_x * &cur) - &prev
        }
    })
}

/// Exact Chebyshev polynomial of the first kind, `T_l(cos t) = cos(l t)`.
pub fn chebyshev_t(l: u32) -> RationalPoly {
    (*chebyshev_t_shared(l)).clone()
}

/// Shared handle to the exact `C_i^k`; `None` stands for the zero polynomial at `i < 0`.
pub fn gegenbauer_c_shared(i: i64, k: u32) -> Option<Arc<RationalPoly>> {
    let i = u32::try_from(i).ok()?;
    Some(memoized(&GEGENBAUER_MEMO, (i, k), || {
        let lambda = int(k.into());
        match i {
            0 => RationalPoly::one(),
            1 => RationalPoly::monomial(int(2) * &lambda, 1),
            _ => {
                // i C_i = 2 (i + lambda - 1) x C_{i-1} - (i + 2 lambda - 2) C_{i-2}
                let n = int(i.into());
                let one = BigRational::one();
                let two = int(2);
                let prev = gegenbauer_c_shared(i64::from(i) - 2, k).expect("non-negative degree");
                let cur = gegenbauer_c_shared(i64::from(i) - 1, k).expect("non-negative degree");
                let x_coeff = &two * (&n + &lambda - &one) / &n;
                let prev_coeff = (&n + &two * &lambda - &two) / &n;
                &cur.shift(1).scale(&x_coeff) - &prev.scale(&prev_coeff)
            }
        }
    }))
}

/// Exact Gegenbauer polynomial `C_i^k`, orthogonal for `(1 - x^2)^(k - 1/2)`; zero for
/// negative degree.
///
/// `k = 0` is accepted and gives the degenerate limit (1 at degree zero, zero otherwise),
/// which is consistent with [`gegenbauer_at_one`].
pub fn gegenbauer_c(i: i64, k: u32) -> RationalPoly {
    gegenbauer_c_shared(i, k).map_or_else(RationalPoly::zero, |p| (*p).clone())
}

/// `C_i^k(1) = (2k)_i / i!`, the maximum of `|C_i^k|` on `[-1, 1]`.
pub fn gegenbauer_at_one(i: u32, k: u32) -> BigRational {
    pochhammer(&int(2 * i64::from(k)), i) / from_biguint(crate::exact_arith::factorial(i.into()))
}

/// Chebyshev coefficients of an exact polynomial: `poly = sum_i c[i] T_i`.
///
/// Peels the leading term against `T_d` (leading coefficient `2^(d-1)`) until nothing is
/// left, so it never consults any closed form for the coefficients.
pub fn chebyshev_coefficients(poly: &RationalPoly) -> Vec<BigRational> {
    let Some(degree) = poly.degree() else {
        return Vec::new();
    };
    let mut out = vec![BigRational::zero(); degree + 1];
    let mut rest = poly.clone();
    while let Some(d) = rest.degree() {
        let lead = rest.coeff(d);
        let t_lead = if d == 0 { BigRational::one() } else { from_biguint(BigUint::one() << (d - 1)) };
        let c = lead / t_lead;
        rest = &rest - &chebyshev_t_shared(d as u32).scale(&c);
        debug_assert!(rest.degree().is_none_or(|nd| nd < d));
        out[d] = c;
    }
    out
}

/// `sum_k coeffs[k] T_k(x)` by Clenshaw's backward recurrence.
///
/// For `|x| > 1/2` the Reinsch modification is used, which keeps the rounding error
/// linear in the series length near `x = ±1`.
pub fn chebyshev_series_eval(coeffs: &[f64], x: f64) -> f64 {
    let Some((&c0, rest)) = coeffs.split_first() else {
        return 0.0;
    };
    if x > 0.5 {
        let u = 2.0 * (x - 1.0);
        let (mut b, mut d) = (0.0, 0.0);
        for &c in rest.iter().rev() {
            d += c + u * b;
            b += d;
        }
        c0 + (x - 1.0) * b + d
    } else if x < -0.5 {
        let u = 2.0 * (x + 1.0);
        let (mut b, mut d) = (0.0, 0.0);
        for &c in rest.iter().rev() {
            d = c + u * b - d;
            b = d - b;
        }
        c0 + (x + 1.0) * b - d
    } else {
        let two_x = 2.0 * x;
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in rest.iter().rev() {
            let b0 = c + two_x * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        c0 + x * b1 - b2
    }
}

/// Floating-point `T_l(r)` for `|r| <= 1`.
pub fn chebyshev_eval_float(l: u32, r: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&r) {
        return Err(Error::Domain { value: r, domain: "[-1, 1]" });
    }
    let mut coeffs = vec![0.0; l as usize + 1];
    coeffs[l as usize] = 1.0;
    Ok(chebyshev_series_eval(&coeffs, r))
}

/// Floating-point `C_i^k(x)` by forward recurrence; zero for negative `i`.
pub fn gegenbauer_eval_float(i: i64, k: u32, x: f64) -> f64 {
    if i < 0 {
        return 0.0;
    }
    let lambda = f64::from(k);
    let mut prev = 1.0;
    if i == 0 {
        return prev;
    }
    let mut cur = 2.0 * lambda * x;
    for n in 2..=i {
        let n = n as f64;
        let next = (2.0 * x * (n + lambda - 1.0) * cur - (n + 2.0 * lambda - 2.0) * prev) / n;
        prev = cur;
        cur = next;
    }
    cur
}

/// `P_1^(alpha, beta) = ((alpha + beta + 2) x + alpha - beta) / 2`.
#[cfg(test)]
fn jacobi_degree_one(alpha: &BigRational, beta: &BigRational) -> RationalPoly {
    let two = int(2);
    RationalPoly::from_coeffs(vec![(alpha - beta) / &two, (alpha + beta + &two) / &two])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::{factorial, rational};

    #[test]
    fn jacobi_examples() {
        assert_eq!(jacobi_poly(&JacobiParams::integer(0, 3, 5)), RationalPoly::one());
        assert_eq!(jacobi_poly(&JacobiParams::integer(1, 0, 2)), RationalPoly::from_integers(&[-1, 2]));
        let legendre2 = RationalPoly::from_coeffs(vec![rational(-1, 2), int(0), rational(3, 2)]);
        assert_eq!(jacobi_poly(&JacobiParams::integer(2, 0, 0)), legendre2);
        let (a, b) = (rational(1, 3), rational(-1, 2));
        let params = JacobiParams::new(1, a.clone(), b.clone()).unwrap();
        assert_eq!(jacobi_poly(&params), jacobi_degree_one(&a, &b));
    }

    #[test]
    fn jacobi_rejects_nonintegrable_weight() {
        assert!(JacobiParams::new(2, int(-1), int(0)).is_err());
        assert!(JacobiParams::new(2, int(0), rational(-3, 2)).is_err());
        assert!(JacobiParams::new(2, rational(-1, 2), rational(-1, 2)).is_ok());
    }

    #[test]
    fn jacobi_value_at_one() {
        for p in 0..12u32 {
            for a in 0..5u32 {
                for b in 0..5u32 {
                    let poly = jacobi_poly(&JacobiParams::integer(p, a, b));
                    let expected =
                        pochhammer(&int(i64::from(a) + 1), p) / from_biguint(factorial(p.into()));
                    assert_eq!(poly.eval(&int(1)), expected, "P_{p}^({a},{b})(1)");
                }
            }
        }
    }

    #[test]
    fn jacobi_at_zero_examples() {
        assert_eq!(jacobi_at_zero(&JacobiParams::integer(0, 4, 9)), int(1));
        assert_eq!(jacobi_at_zero(&JacobiParams::integer(3, 1, 1)), int(0));
        assert_eq!(jacobi_at_zero(&JacobiParams::integer(2, 1, 1)), rational(-3, 4));
        assert_eq!(jacobi_at_zero(&JacobiParams::integer(2, 0, 0)), rational(-1, 2));
    }

    #[test]
    fn jacobi_at_zero_routes_agree() {
        for p in 0..=30u32 {
            for a in 0..=10u32 {
                for b in 0..=10u32 {
                    let params = JacobiParams::integer(p, a, b);
                    let sum = jacobi_at_zero_sum(p, a, b);
                    assert_eq!(sum, jacobi_at_zero_recurrence(&params), "P_{p}^({a},{b})(0)");
                    assert_eq!(sum, jacobi_poly(&params).eval(&int(0)), "P_{p}^({a},{b})(0)");
                }
            }
        }
    }

    #[test]
    fn jacobi_at_zero_non_integer_parameters() {
        let params = JacobiParams::new(5, rational(1, 2), rational(-1, 3)).unwrap();
        assert_eq!(jacobi_at_zero(&params), jacobi_poly(&params).eval(&int(0)));
    }

    #[test]
    fn zero_decision_examples() {
        assert!(jacobi_zero_decision(&JacobiParams::integer(5, 3, 3)).unwrap());
        assert!(!jacobi_zero_decision(&JacobiParams::integer(2, 0, 0)).unwrap());
        assert!(!jacobi_zero_decision(&JacobiParams::integer(0, 7, 2)).unwrap());
        let half = JacobiParams::new(3, rational(1, 2), int(0)).unwrap();
        assert!(jacobi_zero_decision(&half).is_err());
    }

    #[test]
    fn symmetric_jacobi_vanishes_at_zero_iff_odd() {
        for p in 0..=30u32 {
            for g in 0..=10u32 {
                let zero = jacobi_zero_decision(&JacobiParams::integer(p, g, g)).unwrap();
                assert_eq!(zero, p % 2 == 1, "P_{p}^({g},{g})(0)");
            }
        }
    }

    #[test]
    fn chebyshev_examples() {
        assert_eq!(chebyshev_t(0), RationalPoly::one());
        assert_eq!(chebyshev_t(2), RationalPoly::from_integers(&[-1, 0, 2]));
        assert_eq!(chebyshev_t(4), RationalPoly::from_integers(&[1, 0, -8, 0, 8]));
        for l in 0..40 {
            assert_eq!(chebyshev_t(l).eval(&int(1)), int(1));
        }
    }

    #[test]
    fn gegenbauer_examples() {
        assert_eq!(gegenbauer_c(0, 4), RationalPoly::one());
        assert_eq!(gegenbauer_c(1, 1), RationalPoly::from_integers(&[0, 2]));
        assert!(gegenbauer_c(-2, 3).is_zero());
        // C_2^1 is the Chebyshev U_2 = 4x^2 - 1
        assert_eq!(gegenbauer_c(2, 1), RationalPoly::from_integers(&[-1, 0, 4]));
    }

    #[test]
    fn gegenbauer_at_one_examples() {
        assert_eq!(gegenbauer_at_one(0, 5), int(1));
        assert_eq!(gegenbauer_at_one(2, 1), int(3));
        assert_eq!(gegenbauer_at_one(2, 2), int(10));
        for i in 0..=40u32 {
            for k in 0..=10u32 {
                assert_eq!(gegenbauer_at_one(i, k), gegenbauer_c(i.into(), k).eval(&int(1)), "C_{i}^{k}(1)");
            }
        }
    }

    #[test]
    fn gegenbauer_maximum_at_endpoints() {
        let grid: Vec<f64> = (0..2001).map(|j| -1.0 + 2.0 * j as f64 / 2000.0).collect();
        for i in 0..=20i64 {
            for k in 1..=6u32 {
                let at_one = gegenbauer_eval_float(i, k, 1.0);
                let at_minus_one = gegenbauer_eval_float(i, k, -1.0);
                assert!((at_one.abs() - at_minus_one.abs()).abs() <= 1e-9 * at_one.abs());
                let interior_max = grid[1..2000]
                    .iter()
                    .map(|&x| gegenbauer_eval_float(i, k, x).abs())
                    .fold(0.0, f64::max);
                assert!(interior_max <= at_one * (1.0 + 1e-9), "C_{i}^{k}");
                if i > 0 {
                    assert!(interior_max < at_one, "C_{i}^{k} interior not strictly smaller");
                }
            }
        }
    }

    #[test]
    fn chebyshev_float_examples() {
        for l in [0, 1, 7, 100, 1000] {
            assert_eq!(chebyshev_eval_float(l, 1.0).unwrap(), 1.0);
        }
        assert!((chebyshev_eval_float(3, 0.5).unwrap() + 1.0).abs() < 1e-15);
        assert!((chebyshev_eval_float(2, 0.0).unwrap() + 1.0).abs() < 1e-15);
        assert!(chebyshev_eval_float(2, 1.5).is_err());
        assert!(chebyshev_eval_float(2, f64::NAN).is_err());
    }

    #[test]
    fn chebyshev_float_matches_cosine() {
        for l in 0..=60u32 {
            for j in 0..2001 {
                let theta = std::f64::consts::PI * j as f64 / 2000.0;
                let x = theta.cos();
                let got = chebyshev_eval_float(l, x).unwrap();
                let want = (f64::from(l) * x.acos()).cos();
                assert!((got - want).abs() <= 1e-10, "T_{l}({x}): {got} vs {want}");
            }
        }
    }

    #[test]
    fn chebyshev_float_matches_exact_at_high_degree() {
        // Exact values at the dyadic rational nearest to each sample point.
        let points = [-1.0, -0.999_999, -0.97, -0.6, -0.3, 0.0, 0.123, 0.5, 0.77, 0.999, 0.999_999_9, 1.0];
        for l in [10u32, 257, 640, 1000] {
            let exact = chebyshev_t_shared(l);
            for &x in &points {
                let want = crate::exact_arith::to_f64(&exact.eval(&BigRational::from_float(x).unwrap()));
                let got = chebyshev_eval_float(l, x).unwrap();
                assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "T_{l}({x}): {got} vs {want}");
            }
        }
    }

    #[test]
    fn series_eval_matches_exact() {
        let coeffs = [0.25, 0.0, 0.5, 0.0, 0.25];
        let exact: RationalPoly = [rational(1, 4), int(0), rational(1, 2), int(0), rational(1, 4)]
            .iter()
            .enumerate()
            .fold(RationalPoly::zero(), |acc, (i, c)| &acc + &chebyshev_t(i as u32).scale(c));
        for j in 0..=40 {
            let x = -1.0 + j as f64 / 20.0;
            let want = exact.eval_f64(x);
            assert!((chebyshev_series_eval(&coeffs, x) - want).abs() < 1e-14);
        }
        assert_eq!(chebyshev_series_eval(&[], 0.3), 0.0);
    }

    #[test]
    fn chebyshev_coefficients_round_trip() {
        // 6x^4 - 6x^2 + 1 = (3/4) T_4 + 1/4
        let poly = RationalPoly::from_integers(&[1, 0, -6, 0, 6]);
        let c = chebyshev_coefficients(&poly);
        assert_eq!(c, vec![rational(1, 4), int(0), int(0), int(0), rational(3, 4)]);
        assert!(chebyshev_coefficients(&RationalPoly::zero()).is_empty());
    }
}
