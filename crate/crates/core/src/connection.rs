//! Chebyshev connection coefficients of the radial polynomials.
//!
//! `R_n^|m|(cos t) = sum_{j=0}^{floor(n/2)} a_{n-2j} cos((n-2j) t)`, with
//!
//! ```text
//! a_i = eps_i * p! q! / (s! t!) * 2^-l * P_p^(gamma, delta)(0)^2
//! l = max(|m|, i), r_min = min(|m|, i)
//! p = (n-l)/2, q = (n+l)/2, s = (n-r_min)/2, t = (n+r_min)/2
//! gamma = (l-r_min)/2, delta = (l+r_min)/2, eps_0 = 1, eps_i = 2 otherwise
//! ```
//!
//! Every `a_i` is non-negative and they sum to `R_n^|m|(1) = 1`. The minimum is called
//! `r_min` because `r` is already the radius.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::classical_polys::{chebyshev_t_shared, jacobi_at_zero, jacobi_zero_decision, JacobiParams};
use crate::error::{Error, Result};
use crate::exact_arith::{binomial, range_product, to_f64, BigRational, RationalPoly};
use crate::zernike_radial::RadialIndex;

/// The integers entering `a_i` for one `(n, m, i)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConnectionFactors {
    pub i: u32,
    pub l: u32,
    pub r_min: u32,
    pub p: u32,
    pub q: u32,
    pub s: u32,
    pub t: u32,
    pub gamma: u32,
    pub delta: u32,
    /// Neumann factor: 1 for `i = 0`, 2 otherwise.
    pub eps: u32,
}

fn check_order(idx: RadialIndex, i: u32) -> Result<()> {
    let n = idx.n();
    if i > n || !(n - i).is_multiple_of(2) {
        return Err(Error::InvalidOrder { n, i });
    }
    Ok(())
}

pub fn connection_factors(idx: RadialIndex, i: u32) -> Result<ConnectionFactors> {
    check_order(idx, i)?;
    let (n, m) = (idx.n(), idx.m());
    let l = m.max(i);
    let r_min = m.min(i);
    Ok(ConnectionFactors {
        i,
        l,
        r_min,
        p: (n - l) / 2,
        q: (n + l) / 2,
        s: (n - r_min) / 2,
        t: (n + r_min) / 2,
        gamma: (l - r_min) / 2,
        delta: (l + r_min) / 2,
        eps: if i == 0 { 1 } else { 2 },
    })
}

/// Exact `a_i(m)` for `R_n^|m|`.
pub fn connection_coefficient(idx: RadialIndex, i: u32) -> Result<BigRational> {
    let f = connection_factors(idx, i)?;
    let jacobi = jacobi_at_zero(&JacobiParams::integer(f.p, f.gamma, f.delta));
    if jacobi.is_zero() {
        return Ok(BigRational::zero());
    }
    // p <= s <= t <= q, so p! q! / (s! t!) = [(t, q]] / [(p, s]] with both ranges of length gamma
    let numer = range_product(f.t.into(), f.q.into()) * f.eps;
    let denom = range_product(f.p.into(), f.s.into()) << f.l;
    let factor = BigRational::new(BigInt::from(numer), BigInt::from(denom));
    Ok(factor * &jacobi * &jacobi)
}

/// Full list of `a_{n-2j}`, `j = 0 ..= floor(n/2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChebyshevExpansion {
    idx: RadialIndex,
    coeffs: Vec<BigRational>,
}

impl ChebyshevExpansion {
    /// Wraps externally supplied coefficients (entry `j` holds `a_{n-2j}`). No invariant is
    /// checked here; the verification sweeps use this to audit arbitrary sources.
    pub fn from_coefficients(idx: RadialIndex, coeffs: Vec<BigRational>) -> Result<Self> {
        let expected = idx.n() as usize / 2 + 1;
        if coeffs.len() != expected {
            return Err(Error::Precondition(format!(
                "{idx} needs {expected} coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok(Self { idx, coeffs })
    }

    pub fn index(&self) -> RadialIndex {
        self.idx
    }

    /// Entry `j` is `a_{n-2j}`.
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// `(order, a_order)` pairs, highest order first.
    pub fn terms(&self) -> impl Iterator<Item = (u32, &BigRational)> + '_ {
        let n = self.idx.n();
        self.coeffs.iter().enumerate().map(move |(j, a)| (n - 2 * j as u32, a))
    }

    /// `a_i`, or `None` when `i` does not occur.
    pub fn coefficient(&self, i: u32) -> Option<&BigRational> {
        let n = self.idx.n();
        if i > n || !(n - i).is_multiple_of(2) {
            return None;
        }
        self.coeffs.get(((n - i) / 2) as usize)
    }

    /// `a_n`, the coefficient of the top Chebyshev polynomial.
    pub fn leading(&self) -> &BigRational {
        &self.coeffs[0]
    }

    pub fn sum(&self) -> BigRational {
        self.coeffs.iter().fold(BigRational::zero(), |acc, a| acc + a)
    }

    /// `sum_j a_{n-2j} T_{n-2j}` as an exact polynomial.
    pub fn to_poly(&self) -> RationalPoly {
        self.terms()
            .filter(|(_, a)| !a.is_zero())
            .fold(RationalPoly::zero(), |acc, (order, a)| &acc + &chebyshev_t_shared(order).scale(a))
    }

    /// Coefficients rounded to `f64`, indexed densely by Chebyshev order `0 ..= n`.
    pub fn dense_f64(&self) -> Vec<f64> {
        let mut dense = vec![0.0; self.idx.n() as usize + 1];
        for (order, a) in self.terms() {
            dense[order as usize] = to_f64(a);
        }
        dense
    }

    pub const CSV_HEADER: [&'static str; 4] = ["n", "m", "i", "a_i"];

    /// One `[n, m, i, a_i]` record per coefficient, highest order first.
    pub fn csv_records(&self) -> Vec<[String; 4]> {
        let (n, m) = (self.idx.n().to_string(), self.idx.m().to_string());
        self.terms()
            .map(|(order, a)| [n.clone(), m.clone(), order.to_string(), a.to_string()])
            .collect()
    }
}

/// `{"n": .., "m": .., "coeffs": ["p/q", ...]}` with coefficients ordered `j = 0 ..= n/2`.
impl Serialize for ChebyshevExpansion {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let coeffs: Vec<String> = self.coeffs.iter().map(ToString::to_string).collect();
        let mut st = serializer.serialize_struct("ChebyshevExpansion", 3)?;
        st.serialize_field("n", &self.idx.n())?;
        st.serialize_field("m", &self.idx.m())?;
        st.serialize_field("coeffs", &coeffs)?;
        st.end()
    }
}

/// Degree above which [`expansion`] computes coefficients in parallel.
const PARALLEL_EXPANSION_DEGREE: u32 = 64;

/// All connection coefficients of `R_n^|m|`, each computed independently.
pub fn expansion(idx: RadialIndex) -> ChebyshevExpansion {
    let n = idx.n();
    let coefficient = |j: u32| connection_coefficient(idx, n - 2 * j).expect("order in range");
    let coeffs = if n >= PARALLEL_EXPANSION_DEGREE {
        (0..=n / 2).into_par_iter().map(coefficient).collect()
    } else {
        (0..=n / 2).map(coefficient).collect()
    };
    ChebyshevExpansion { idx, coeffs }
}

/// `a_n = 2^(1-n) C(n, (n - |m|)/2)` for `n > 0`.
pub fn leading_coefficient(idx: RadialIndex) -> Result<BigRational> {
    let n = idx.n();
    if n == 0 {
        return Err(Error::Precondition("leading coefficient closed form needs n > 0".into()));
    }
    let c = binomial(n.into(), idx.jacobi_degree().into());
    Ok(BigRational::new(BigInt::from(c) * 2, BigInt::one() << n))
}

/// Closed forms for `a_{n-2}` and `a_{n-4}` in terms of `a_n`, each with its own side
/// condition reported separately.
#[derive(Clone, Debug, PartialEq)]
pub struct NearLeading {
    /// `a_n |m|^2 / n`, valid for `n - 2 > 0` and `n - 2 >= |m|`.
    pub minus_two: Result<BigRational>,
    /// `a_n (n - |m|^2)^2 / (2 n (n - 1))`, valid for `n - 4 > 0` and `n - 4 >= |m|`.
    pub minus_four: Result<BigRational>,
}

pub fn near_leading_coefficients(idx: RadialIndex) -> NearLeading {
    let n = i64::from(idx.n());
    let m = i64::from(idx.m());
    let side = |gap: i64| -> Result<()> {
        if n - gap > 0 && n - gap >= m {
            Ok(())
        } else {
            Err(Error::SideCondition(format!(
                "a_(n-{gap}) closed form needs n-{gap} > 0 and n-{gap} >= |m| (n={n}, |m|={m})"
            )))
        }
    };
    let minus_two = side(2).and_then(|_| {
        let a_n = leading_coefficient(idx)?;
        Ok(a_n * BigRational::new(BigInt::from(m * m), BigInt::from(n)))
    });
    let minus_four = side(4).and_then(|_| {
        let a_n = leading_coefficient(idx)?;
        let diff = n - m * m;
        Ok(a_n * BigRational::new(BigInt::from(diff * diff), BigInt::from(2 * n * (n - 1))))
    });
    NearLeading { minus_two, minus_four }
}

/// Whether `a_i = 0`, decided exactly through `P_p^(gamma, delta)(0) = 0`.
pub fn zero_classification(idx: RadialIndex, i: u32) -> Result<bool> {
    let f = connection_factors(idx, i)?;
    jacobi_zero_decision(&JacobiParams::integer(f.p, f.gamma, f.delta))
}

/// The two parity rules that settle `a_i = 0` without computing anything:
/// `a_0 = 0` iff `(n - |m|)/2` is odd, and for `m = 0`, `a_i = 0` iff `(n - i)/2` is odd.
/// `None` when neither rule applies.
pub fn parity_rule(idx: RadialIndex, i: u32) -> Result<Option<bool>> {
    check_order(idx, i)?;
    let n = idx.n();
    Ok(if i == 0 {
        Some(idx.jacobi_degree() % 2 == 1)
    } else if idx.m() == 0 {
        Some(((n - i) / 2) % 2 == 1)
    } else {
        None
    })
}
