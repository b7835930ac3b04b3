//! Bounds on `max_{0<=r<=1} |(R_n^|m|)^(k)(r)|` and how sharp they are.
//!
//! Because every connection coefficient is non-negative and every `|C_i^k|` peaks at
//! `r = 1`, the maximum of `|(R_n^|m|)^(k)|` is the value at `r = 1`:
//!
//! ```text
//! (R_n^|m|)^(k)(1) = sum_j a_{n-2j} T_{n-2j}^(k)(1)
//! T_i^(k)(1)       = i^2 (i^2 - 1^2) ... (i^2 - (k-1)^2) / (2^k (1/2)_k)
//! ```
//!
//! `T_i^(k)(1)` increases with `i` and the `a` sum to one, which sandwiches the value
//! between `a_n B(n, k)` and `B(n, k) = T_n^(k)(1)`. The older bound is `n^(2k)`.
//!
//! All comparisons here are exact; floats only appear in the ratio reports.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Pow, Zero};
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::connection::{expansion, leading_coefficient, ChebyshevExpansion};
use crate::error::{Error, Result};
use crate::exact_arith::{
    factorial, from_biguint, int, ln_rational, pochhammer, range_product, rational, to_f64, BigRational,
};
use crate::text::format_float;
use crate::zernike_radial::RadialIndex;

/// `T_i^(k)(1)` from the product form; zero for `i < k`, one for `k = 0`.
pub fn chebyshev_deriv_at_one(i: u32, k: u32) -> BigRational {
    if i < k {
        return BigRational::zero();
    }
    let i2 = BigInt::from(i) * i;
    let numer = (0..k).fold(BigInt::one(), |acc, j| acc * (&i2 - BigInt::from(j) * j));
    let denom = pochhammer(&rational(1, 2), k) * from_biguint(BigUint::one() << k);
    BigRational::from_integer(numer) / denom
}

/// `B(n, k) = 2^(k-1) (k-1)! n (n+k-1)! / ((2k-1)! (n-k)!)`, computed in integers.
///
/// One for `k = 0`, zero for `k > n`. The division is exact (`T_n` has integer
/// coefficients), which is asserted.
pub fn new_upper_bound(n: u32, k: u32) -> BigRational {
    if k == 0 {
        return BigRational::one();
    }
    if k > n {
        return BigRational::zero();
    }
    let (n64, k64) = (u64::from(n), u64::from(k));
    let numer = (factorial(k64 - 1) << (k - 1)) * n64 * range_product(n64 - k64, n64 + k64 - 1);
    let denom = factorial(2 * k64 - 1);
    let (quotient, remainder) = numer.div_rem(&denom);
    assert!(remainder.is_zero(), "B({n}, {k}) is not an integer");
    from_biguint(quotient)
}

/// The older bound `n^(2k)`.
pub fn old_upper_bound(n: u32, k: u32) -> BigUint {
    Pow::pow(BigUint::from(n), 2 * k)
}

/// `(R_n^|m|)^(k)(1) = sum_j a_{n-2j} T_{n-2j}^(k)(1)`.
pub fn derivative_at_one(idx: RadialIndex, k: u32) -> BigRational {
    derivative_at_one_from(&expansion(idx), k)
}

/// Same as [`derivative_at_one`] but reuses an expansion the caller already has.
pub fn derivative_at_one_from(exp: &ChebyshevExpansion, k: u32) -> BigRational {
    exp.terms()
        .filter(|(order, a)| *order >= k && !a.is_zero())
        .fold(BigRational::zero(), |acc, (order, a)| acc + a * chebyshev_deriv_at_one(order, k))
}

/// `(1/2)_k / (1)_k`, the large-`n` limit of `value / upper` for fixed `m` and `k`.
pub fn limit_ratio(k: u32) -> BigRational {
    pochhammer(&rational(1, 2), k) / pochhammer(&int(1), k)
}

/// Everything known exactly about one `(n, m, k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub idx: RadialIndex,
    pub k: u32,
    /// `(R_n^|m|)^(k)(1)`, which is also the maximum modulus on `[0, 1]`.
    pub value_at_one: BigRational,
    /// `a_n B(n, k)`.
    pub lower: BigRational,
    /// `B(n, k)`.
    pub upper: BigRational,
    /// `n^(2k)`.
    pub old_bound: BigUint,
    pub lower_attained: bool,
    pub upper_attained: bool,
}

pub fn bound_report(idx: RadialIndex, k: u32) -> BoundReport {
    bound_report_from(&expansion(idx), k)
}

pub fn bound_report_from(exp: &ChebyshevExpansion, k: u32) -> BoundReport {
    let idx = exp.index();
    let value_at_one = derivative_at_one_from(exp, k);
    let upper = new_upper_bound(idx.n(), k);
    let lower = exp.leading() * &upper;
    BoundReport {
        idx,
        k,
        lower_attained: lower == value_at_one,
        upper_attained: upper == value_at_one,
        old_bound: old_upper_bound(idx.n(), k),
        value_at_one,
        lower,
        upper,
    }
}

fn exact_ratio(num: &BigRational, den: &BigRational) -> Option<f64> {
    (!den.is_zero()).then(|| to_f64(&(num / den)))
}

impl BoundReport {
    /// `lower <= value <= upper`, and `upper <= n^(2k)` whenever `k <= n`.
    pub fn chain_holds(&self) -> bool {
        let ordered = self.lower <= self.value_at_one && self.value_at_one <= self.upper;
        let improves = self.k > self.idx.n() || self.upper <= from_biguint(self.old_bound.clone());
        ordered && improves
    }

    pub fn value_over_upper(&self) -> Option<f64> {
        exact_ratio(&self.value_at_one, &self.upper)
    }

    pub fn lower_over_value(&self) -> Option<f64> {
        exact_ratio(&self.lower, &self.value_at_one)
    }

    pub fn value_over_lower(&self) -> Option<f64> {
        exact_ratio(&self.value_at_one, &self.lower)
    }

    pub const CSV_HEADER: [&'static str; 8] =
        ["n", "m", "k", "lower", "value", "upper", "old_bound", "value_over_upper"];

    pub fn csv_record(&self) -> [String; 8] {
        [
            self.idx.n().to_string(),
            self.idx.m().to_string(),
            self.k.to_string(),
            self.lower.to_string(),
            self.value_at_one.to_string(),
            self.upper.to_string(),
            self.old_bound.to_string(),
            self.value_over_upper().map_or_else(String::new, format_float),
        ]
    }
}

/// Exact fields as `"p/q"` strings; ratios as JSON numbers (`null` when undefined).
impl Serialize for BoundReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("BoundReport", 12)?;
        st.serialize_field("n", &self.idx.n())?;
        st.serialize_field("m", &self.idx.m())?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("value_at_one", &self.value_at_one.to_string())?;
        st.serialize_field("lower", &self.lower.to_string())?;
        st.serialize_field("upper", &self.upper.to_string())?;
        st.serialize_field("old_bound", &self.old_bound.to_string())?;
        st.serialize_field("lower_attained", &self.lower_attained)?;
        st.serialize_field("upper_attained", &self.upper_attained)?;
        st.serialize_field("value_over_upper", &self.value_over_upper())?;
        st.serialize_field("lower_over_value", &self.lower_over_value())?;
        st.serialize_field("value_over_lower", &self.value_over_lower())?;
        st.end()
    }
}

/// Closed forms of the first two derivatives at `r = 1`, with
/// `w = (n - |m|)(n + |m| + 2) / 4`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SharpnessClosedForm {
    pub w: BigRational,
    /// `|m| + 2w`.
    pub first_deriv: BigRational,
    /// `|m|(|m| - 1) + 2w(w + |m| - 1)`.
    pub second_deriv: BigRational,
}

pub fn closed_form_k12(idx: RadialIndex) -> SharpnessClosedForm {
    let n = int(idx.n().into());
    let m = int(idx.m().into());
    let one = BigRational::one();
    let two = int(2);
    let w = (&n - &m) * (&n + &m + &two) / int(4);
    let first_deriv = &m + &two * &w;
    let second_deriv = &m * (&m - &one) + &two * &w * (&w + &m - &one);
    SharpnessClosedForm { w, first_deriv, second_deriv }
}

/// Sharpness ratios of one report, converted to `f64` from exact quotients.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RatioDiagnostics {
    pub value_over_upper: f64,
    pub lower_over_value: f64,
    pub value_over_lower: f64,
    /// `(1/2)_k / (1)_k`.
    pub limit: f64,
}

/// Requires `n > 0` and `k <= n`, where every ratio is finite and positive.
pub fn ratio_diagnostics(idx: RadialIndex, k: u32) -> Result<RatioDiagnostics> {
    if idx.n() == 0 || k > idx.n() {
        return Err(Error::Precondition(format!(
            "ratio diagnostics need n > 0 and k <= n (n={}, k={k})",
            idx.n()
        )));
    }
    let report = bound_report(idx, k);
    Ok(RatioDiagnostics {
        value_over_upper: report.value_over_upper().expect("upper > 0 for k <= n"),
        lower_over_value: report.lower_over_value().expect("value > 0 for k <= n"),
        value_over_lower: report.value_over_lower().expect("lower > 0 for k <= n"),
        limit: to_f64(&limit_ratio(k)),
    })
}

/// `(R_n^|m|)^(n-2)(1) / (a_n T_n^(n-2)(1))`, for `n >= 3`.
pub fn k_near_n_ratio(idx: RadialIndex) -> Result<BigRational> {
    let n = idx.n();
    if n < 3 {
        return Err(Error::Precondition(format!("k = n - 2 ratio needs n >= 3, got n={n}")));
    }
    let k = n - 2;
    let base = leading_coefficient(idx)? * chebyshev_deriv_at_one(n, k);
    Ok(derivative_at_one(idx, k) / base)
}

/// Closed form of [`k_near_n_ratio`]: `1 + |m|^2 / (n^2 (2n - 3))`.
pub fn k_near_n_formula(idx: RadialIndex) -> Result<BigRational> {
    let n = i64::from(idx.n());
    if n < 3 {
        return Err(Error::Precondition(format!("k = n - 2 ratio needs n >= 3, got n={n}")));
    }
    let m = i64::from(idx.m());
    Ok(BigRational::one() + rational(m * m, n * n * (2 * n - 3)))
}

/// Large-`n` estimates of `a_n(m)` next to the exact value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StirlingEstimate {
    pub n: u32,
    pub m: u32,
    pub exact: f64,
    /// `4/sqrt(2 pi n) (1 - m^2/n^2)^(-(n+1)/2) ((1 - m/n)/(1 + m/n))^(m/2)`.
    pub stirling: f64,
    /// `4/sqrt(2 pi n) exp(-m^2 / (2n))`, the `|m| = O(sqrt n)` simplification.
    pub gaussian: f64,
    pub rel_err_stirling: f64,
    pub rel_err_gaussian: f64,
}

/// Requires `n > 0` and `2|m| <= n`.
pub fn stirling_estimate(idx: RadialIndex) -> Result<StirlingEstimate> {
    let (n, m) = (idx.n(), idx.m());
    if n == 0 || 2 * m > n {
        return Err(Error::Precondition(format!(
            "Stirling estimate needs n > 0 and |m| <= n/2 (n={n}, |m|={m})"
        )));
    }
    let exact_value = leading_coefficient(idx)?;
    let exact = to_f64(&exact_value);
    let ln_exact = ln_rational(&exact_value);
    let nf = f64::from(n);
    let mf = f64::from(m);
    let x = mf / nf;
    let ln_prefactor = 4f64.ln() - 0.5 * (2.0 * std::f64::consts::PI * nf).ln();
    // logs keep the (1 - x^2)^(-(n+1)/2) factor from overflowing at large n
    let ln_full = ln_prefactor - 0.5 * (nf + 1.0) * (-x * x).ln_1p() + 0.5 * mf * ((-x).ln_1p() - x.ln_1p());
    let stirling = ln_full.exp();
    let gaussian = (ln_prefactor - mf * mf / (2.0 * nf)).exp();
    Ok(StirlingEstimate {
        n,
        m,
        exact,
        stirling,
        gaussian,
        // relative errors from logs so they stay meaningful when the values underflow
        rel_err_stirling: (ln_full - ln_exact).exp_m1().abs(),
        rel_err_gaussian: (ln_prefactor - mf * mf / (2.0 * nf) - ln_exact).exp_m1().abs(),
    })
}

/// One row of the `n = m = 2k` table.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtremeCaseRow {
    pub k: u32,
    /// `(2k)! / k!`, the k-th derivative of `r^(2k)` at 1.
    pub value: BigRational,
    /// `a_{2k}(2k) B(2k, k)` with `a_{2k}(2k) = 2^(1-2k)`.
    pub lower: BigRational,
    /// `B(2k, k)`.
    pub upper: BigRational,
    /// `(value / lower)^(1/k)`.
    pub root_value_over_lower: f64,
    /// `(value / upper)^(1/k)`.
    pub root_value_over_upper: f64,
}

/// Which exponential base the empirical rate sits closest to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RateCandidate {
    /// 32/27, the base predicted by Stirling's formula for `(2k)! (2k-1)! 2^(k-1) / (k! (3k-1)!)`.
    ThirtyTwoOverTwentySeven,
    /// 32/37, which is below one and so cannot describe a ratio that grows.
    ThirtyTwoOverThirtySeven,
}

impl RateCandidate {
    pub fn value(self) -> f64 {
        match self {
            Self::ThirtyTwoOverTwentySeven => 32.0 / 27.0,
            Self::ThirtyTwoOverThirtySeven => 32.0 / 37.0,
        }
    }
}

/// Exponential rates read off the exact table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateDetermination {
    /// Base `b` from fitting `ln(value/lower) = k ln b + c1 ln k + c0` through the last
    /// three rows. `None` with fewer than three rows.
    pub value_over_lower_base: Option<f64>,
    /// Same fit for `value/upper`; expected near 8/27.
    pub value_over_upper_base: Option<f64>,
    /// Whether `value/lower` grows (its base exceeds one).
    pub value_over_lower_grows: bool,
    pub nearest_candidate: RateCandidate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtremeCaseTable {
    pub rows: Vec<ExtremeCaseRow>,
    pub determination: RateDetermination,
}

/// Fits `y_k = k L + c1 ln k + c0` through three points and returns `exp(L)`.
fn fit_exponential_base(points: [(u32, f64); 3]) -> f64 {
    let [(k1, y1), (k2, y2), (k3, y3)] = points.map(|(k, y)| (f64::from(k), y));
    let (a11, a12, b1) = (k2 - k1, k2.ln() - k1.ln(), y2 - y1);
    let (a21, a22, b2) = (k3 - k2, k3.ln() - k2.ln(), y3 - y2);
    let det = a11 * a22 - a12 * a21;
    ((b1 * a22 - a12 * b2) / det).exp()
}

/// The `n = m = 2k` family for `k = 1 ..= k_max`, where neither bound is sharp.
pub fn extreme_case_rates(k_max: u32) -> Result<ExtremeCaseTable> {
    if k_max == 0 {
        return Err(Error::Precondition("extreme-case table needs k_max >= 1".into()));
    }
    let mut rows = Vec::with_capacity(k_max as usize);
    for k in 1..=k_max {
        let n = 2 * k;
        let idx = RadialIndex::new(n.into(), n.into())?;
        let value = from_biguint(range_product(k.into(), n.into()));
        let upper = new_upper_bound(n, k);
        let lower = leading_coefficient(idx)? * &upper;
        let kf = f64::from(k);
        rows.push(ExtremeCaseRow {
            k,
            root_value_over_lower: (ln_rational(&(&value / &lower)) / kf).exp(),
            root_value_over_upper: (ln_rational(&(&value / &upper)) / kf).exp(),
            value,
            lower,
            upper,
        });
    }
    let fit = |select: fn(&ExtremeCaseRow) -> BigRational| -> Option<f64> {
        let tail = rows.get(rows.len().checked_sub(3)?..)?;
        let points = [0, 1, 2].map(|j| (tail[j].k, ln_rational(&select(&tail[j]))));
        Some(fit_exponential_base(points))
    };
    let value_over_lower_base = fit(|r| &r.value / &r.lower);
    let value_over_upper_base = fit(|r| &r.value / &r.upper);
    let last = rows.last().expect("k_max >= 1");
    let observed = value_over_lower_base.unwrap_or(last.root_value_over_lower);
    let nearest_candidate = [RateCandidate::ThirtyTwoOverTwentySeven, RateCandidate::ThirtyTwoOverThirtySeven]
        .into_iter()
        .min_by(|a, b| (a.value() - observed).abs().total_cmp(&(b.value() - observed).abs()))
        .expect("two candidates");
    let grows = rows.len() >= 2 && rows.windows(2).all(|w| &w[1].value / &w[1].lower > &w[0].value / &w[0].lower);
    Ok(ExtremeCaseTable {
        determination: RateDetermination {
            value_over_lower_base,
            value_over_upper_base,
            value_over_lower_grows: grows && observed > 1.0,
            nearest_candidate,
        },
        rows,
    })
}

/// `(n, m, k)` triples where `value/upper` increases from `k - 1` to `k`.
///
/// The expectation that it falls with `k` is a heuristic, so violations are reported,
/// not treated as errors.
pub fn monotonicity_findings(n_max: u32) -> Vec<(RadialIndex, u32)> {
    let mut out = Vec::new();
    for idx in RadialIndex::all_up_to(n_max) {
        let exp = expansion(idx);
        let mut prev: Option<BigRational> = None;
        for k in 0..=idx.n() {
            let ratio = derivative_at_one_from(&exp, k) / new_upper_bound(idx.n(), k);
            if prev.as_ref().is_some_and(|p| &ratio > p) {
                out.push((idx, k));
            }
            prev = Some(ratio);
        }
    }
    out
}
