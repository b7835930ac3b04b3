//! Exhaustive exact sweeps over every valid `(n, m)` up to a degree limit.
//!
//! Each check compares two independent computations in exact arithmetic. The
//! coefficients under audit come from a [`CoefficientSource`], so a deliberately broken
//! source can be used to confirm that the sweep actually fails.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds_sharpness::{
    chebyshev_deriv_at_one, closed_form_k12, derivative_at_one_from, k_near_n_formula, new_upper_bound,
    old_upper_bound,
};
use crate::classical_polys::{chebyshev_coefficients, chebyshev_t_shared, gegenbauer_c};
use crate::connection::{
    expansion, leading_coefficient, near_leading_coefficients, parity_rule, zero_classification, ChebyshevExpansion,
};
use crate::error::{Error, Result};
use crate::exact_arith::{factorial, from_biguint, int, BigRational};
use crate::zernike_radial::{
    gegenbauer_route_poly, radial_derivative_exact, radial_derivative_recurrence, radial_derivative_recurrence_k,
    radial_poly, RadialIndex,
};

/// Highest derivative order used by the Gegenbauer-route and repeated-recurrence checks.
const MAX_ROUTE_ORDER: u32 = 10;
const MAX_REPEATED_RECURRENCE: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyMode {
    Expansion,
    Bounds,
    ClosedForms,
    Recurrence,
    GegenbauerIdentity,
    All,
}

impl VerifyMode {
    pub const NAMES: [&'static str; 6] =
        ["expansion", "bounds", "closed-forms", "recurrence", "gegenbauer-identity", "all"];

    fn includes(self, family: VerifyMode) -> bool {
        self == VerifyMode::All || self == family
    }
}

impl fmt::Display for VerifyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = match self {
            Self::Expansion => 0,
            Self::Bounds => 1,
            Self::ClosedForms => 2,
            Self::Recurrence => 3,
            Self::GegenbauerIdentity => 4,
            Self::All => 5,
        };
        f.write_str(Self::NAMES[i])
    }
}

impl FromStr for VerifyMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "expansion" => Self::Expansion,
            "bounds" => Self::Bounds,
            "closed-forms" => Self::ClosedForms,
            "recurrence" => Self::Recurrence,
            "gegenbauer-identity" => Self::GegenbauerIdentity,
            "all" => Self::All,
            other => {
                return Err(Error::Precondition(format!(
                    "unknown verify mode '{other}' (expected one of {})",
                    Self::NAMES.join(", ")
                )))
            }
        })
    }
}

/// Where the connection coefficients under test come from.
pub trait CoefficientSource: Sync {
    fn expansion(&self, idx: RadialIndex) -> ChebyshevExpansion;
}

/// The library's own coefficients.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExactCoefficients;

impl CoefficientSource for ExactCoefficients {
    fn expansion(&self, idx: RadialIndex) -> ChebyshevExpansion {
        expansion(idx)
    }
}

/// Exact coefficients with `offset` added to a single `a_i` of one `(n, m)`.
#[derive(Clone, Debug)]
pub struct CorruptedCoefficients {
    pub target: RadialIndex,
    pub order: u32,
    pub offset: BigRational,
}

impl CorruptedCoefficients {
    pub fn new(target: RadialIndex, order: u32, offset: BigRational) -> Result<Self> {
        let n = target.n();
        if order > n || !(n - order).is_multiple_of(2) {
            return Err(Error::InvalidOrder { n, i: order });
        }
        Ok(Self { target, order, offset })
    }
}

impl CoefficientSource for CorruptedCoefficients {
    fn expansion(&self, idx: RadialIndex) -> ChebyshevExpansion {
        let exact = expansion(idx);
        if idx != self.target {
            return exact;
        }
        let mut coeffs = exact.coeffs().to_vec();
        coeffs[((idx.n() - self.order) / 2) as usize] += &self.offset;
        ChebyshevExpansion::from_coefficients(idx, coeffs).expect("length unchanged")
    }
}

/// One violated check. Sorting is by `(n, m, i, k, check)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Finding {
    pub n: u32,
    pub m: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    pub check: &'static str,
    pub detail: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: n={} m={}", self.check, self.n, self.m)?;
        if let Some(i) = self.i {
            write!(f, " i={i}")?;
        }
        if let Some(k) = self.k {
            write!(f, " k={k}")?;
        }
        write!(f, ": {}", self.detail)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckSummary {
    pub check: &'static str,
    pub cases: u64,
    pub failures: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub n_max: u32,
    pub mode: VerifyMode,
    pub passed: bool,
    pub checks: Vec<CheckSummary>,
    pub findings: Vec<Finding>,
}

#[derive(Default)]
struct Tally {
    counts: BTreeMap<&'static str, (u64, u64)>,
    findings: Vec<Finding>,
}

struct Site {
    n: u32,
    m: u32,
    i: Option<u32>,
    k: Option<u32>,
}

impl Site {
    fn of(idx: RadialIndex) -> Self {
        Self { n: idx.n(), m: idx.m(), i: None, k: None }
    }

    fn i(mut self, i: u32) -> Self {
        self.i = Some(i);
        self
    }

    fn k(mut self, k: u32) -> Self {
        self.k = Some(k);
        self
    }
}

impl Tally {
    fn record(&mut self, check: &'static str, ok: bool, site: Site, detail: impl FnOnce() -> String) {
        let entry = self.counts.entry(check).or_default();
        entry.0 += 1;
        if !ok {
            entry.1 += 1;
            self.findings.push(Finding { n: site.n, m: site.m, i: site.i, k: site.k, check, detail: detail() });
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        for (check, (cases, failures)) in other.counts {
            let entry = self.counts.entry(check).or_default();
            entry.0 += cases;
            entry.1 += failures;
        }
        self.findings.extend(other.findings);
        self
    }
}

fn check_expansion(tally: &mut Tally, exp: &ChebyshevExpansion) {
    let idx = exp.index();
    let poly = radial_poly(idx);
    let projected = chebyshev_coefficients(&poly);
    for (order, a) in exp.terms() {
        tally.record("nonnegative", !a.is_negative(), Site::of(idx).i(order), || format!("a_{order} = {a}"));
        let want = projected.get(order as usize).cloned().unwrap_or_else(BigRational::zero);
        tally.record("coefficient-projection", *a == want, Site::of(idx).i(order), || {
            format!("a_{order} = {a}, projection of R_n^m gives {want}")
        });
        let is_zero = zero_classification(idx, order).expect("order in range");
        tally.record("zero-classification", a.is_zero() == is_zero, Site::of(idx).i(order), || {
            format!("a_{order} = {a} but the Jacobi value at 0 says zero={is_zero}")
        });
        if let Some(rule) = parity_rule(idx, order).expect("order in range") {
            tally.record("parity-rule", a.is_zero() == rule, Site::of(idx).i(order), || {
                format!("a_{order} = {a} but the parity rule says zero={rule}")
            });
        }
    }
    let sum = exp.sum();
    tally.record("sum-to-one", sum.is_one(), Site::of(idx), || format!("sum of coefficients is {sum}"));
    tally.record("reconstruction", exp.to_poly() == poly, Site::of(idx), || {
        "sum a_i T_i differs from R_n^m".to_string()
    });
}

fn check_bounds(tally: &mut Tally, exp: &ChebyshevExpansion) {
    let idx = exp.index();
    let n = idx.n();
    let one = BigRational::one();
    for k in 0..=n + 1 {
        let site = || Site::of(idx).k(k);
        let value = derivative_at_one_from(exp, k);
        let upper = new_upper_bound(n, k);
        let lower = exp.leading() * &upper;
        let direct = radial_derivative_exact(idx, k).eval(&one);
        tally.record("value-at-one", value == direct, site(), || {
            format!("sum a_i T_i^(k)(1) = {value}, differentiating R_n^m gives {direct}")
        });
        tally.record("sandwich", lower <= value && value <= upper, site(), || {
            format!("lower {lower}, value {value}, upper {upper}")
        });
        tally.record("bound-identity", upper == chebyshev_deriv_at_one(n, k), site(), || {
            format!("B(n, k) = {upper} differs from T_n^(k)(1)")
        });
        if k > n || n == 0 {
            continue;
        }
        // sum a_i T_i^(k)(1) = B sum a_i only when all weight sits on T_n, i.e. a_n = 1
        let single_term = exp.leading().is_one();
        tally.record("upper-equality", (value == upper) == (k == 0 || single_term), site(), || {
            format!("value {value}, upper {upper}: equality expected only at k = 0 or when a_n = 1")
        });
        if k + 1 >= n {
            tally.record("lower-equality", value == lower, site(), || {
                format!("value {value}, lower {lower}: equality expected at k = n and k = n - 1")
            });
        }
        if k >= 1 {
            let old = from_biguint(old_upper_bound(n, k));
            tally.record("improvement", upper <= old, site(), || format!("B = {upper} exceeds n^(2k) = {old}"));
        }
    }
}

fn check_closed_forms(tally: &mut Tally, exp: &ChebyshevExpansion) {
    let idx = exp.index();
    let n = idx.n();
    if n == 0 {
        return;
    }
    let a_n = leading_coefficient(idx).expect("n > 0");
    tally.record("leading", *exp.leading() == a_n, Site::of(idx).i(n), || {
        format!("a_n = {}, closed form gives {a_n}", exp.leading())
    });
    let near = near_leading_coefficients(idx);
    for (gap, closed) in [(2, near.minus_two), (4, near.minus_four)] {
        let Ok(closed) = closed else { continue };
        let order = n - gap;
        let got = exp.coefficient(order).expect("side condition keeps the order in range");
        tally.record("near-leading", *got == closed, Site::of(idx).i(order), || {
            format!("a_{order} = {got}, closed form gives {closed}")
        });
    }

    let one = BigRational::one();
    let closed = closed_form_k12(idx);
    for (k, want) in [(1, &closed.first_deriv), (2, &closed.second_deriv)] {
        let direct = radial_derivative_exact(idx, k).eval(&one);
        tally.record("derivative-closed-form", direct == *want, Site::of(idx).k(k), || {
            format!("derivative at 1 is {direct}, closed form gives {want}")
        });
        let from_coeffs = derivative_at_one_from(exp, k);
        tally.record("derivative-closed-form", from_coeffs == *want, Site::of(idx).k(k), || {
            format!("sum a_i T_i^(k)(1) = {from_coeffs}, closed form gives {want}")
        });
    }

    if n >= 3 {
        let k = n - 2;
        let ratio = derivative_at_one_from(exp, k) / (&a_n * chebyshev_deriv_at_one(n, k));
        let want = k_near_n_formula(idx).expect("n >= 3");
        tally.record("k-near-n-ratio", ratio == want, Site::of(idx).k(k), || {
            format!("ratio {ratio}, closed form gives {want}")
        });
    }
}

fn check_recurrence(tally: &mut Tally, idx: RadialIndex) {
    let direct = radial_derivative_exact(idx, 1);
    tally.record("recurrence", radial_derivative_recurrence(idx) == direct, Site::of(idx).k(1), || {
        "recurrence disagrees with the symbolic derivative".to_string()
    });
    for k in 2..=idx.n().min(MAX_REPEATED_RECURRENCE) {
        let ok = radial_derivative_recurrence_k(idx, k) == radial_derivative_exact(idx, k);
        tally.record("recurrence-repeated", ok, Site::of(idx).k(k), || {
            "repeated recurrence disagrees with the symbolic derivative".to_string()
        });
    }
}

fn check_gegenbauer_route(tally: &mut Tally, exp: &ChebyshevExpansion) {
    let idx = exp.index();
    for k in 0..=idx.n().min(MAX_ROUTE_ORDER) {
        let ok = gegenbauer_route_poly(exp, k) == radial_derivative_exact(idx, k);
        tally.record("gegenbauer-route", ok, Site::of(idx).k(k), || {
            "Gegenbauer assembly disagrees with the symbolic derivative".to_string()
        });
    }
}

/// `T_l^(k) = 2^(k-1) (k-1)! l C_{l-k}^k` for one `(l, k)`; reported with `n = l`, `m = 0`.
fn check_chebyshev_identity(tally: &mut Tally, l: u32, k: u32) {
    let lhs = chebyshev_t_shared(l).derivative(k as usize);
    let prefactor = from_biguint(factorial(u64::from(k - 1)) << (k - 1)) * int(l.into());
    let rhs = gegenbauer_c(i64::from(l) - i64::from(k), k).scale(&prefactor);
    tally.record("chebyshev-gegenbauer-identity", lhs == rhs, Site { n: l, m: 0, i: Some(l), k: Some(k) }, || {
        format!("T_{l}^({k}) differs from the Gegenbauer form")
    });
}

fn check_index(mode: VerifyMode, source: &dyn CoefficientSource, idx: RadialIndex) -> Tally {
    let mut tally = Tally::default();
    let exp = source.expansion(idx);
    if mode.includes(VerifyMode::Expansion) {
        check_expansion(&mut tally, &exp);
    }
    if mode.includes(VerifyMode::Bounds) {
        check_bounds(&mut tally, &exp);
    }
    if mode.includes(VerifyMode::ClosedForms) {
        check_closed_forms(&mut tally, &exp);
    }
    if mode.includes(VerifyMode::Recurrence) {
        check_recurrence(&mut tally, idx);
    }
    if mode.includes(VerifyMode::GegenbauerIdentity) {
        check_gegenbauer_route(&mut tally, &exp);
    }
    tally
}

/// Runs the selected family for every valid `(n, m)` with `n <= n_max`.
///
/// Indices are checked in parallel; the report is identical for any completion order.
pub fn run_verify(n_max: u32, mode: VerifyMode, source: &dyn CoefficientSource) -> VerifyReport {
    let indices: Vec<RadialIndex> = RadialIndex::all_up_to(n_max).collect();
    let mut tally = indices
        .par_iter()
        .map(|&idx| check_index(mode, source, idx))
        .reduce(Tally::default, Tally::merge);
    if mode.includes(VerifyMode::GegenbauerIdentity) {
        let identity = (1..=n_max)
            .flat_map(|l| (1..=l.min(MAX_ROUTE_ORDER)).map(move |k| (l, k)))
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|(l, k)| {
                let mut t = Tally::default();
                check_chebyshev_identity(&mut t, l, k);
                t
            })
            .reduce(Tally::default, Tally::merge);
        tally = tally.merge(identity);
    }
    tally.findings.sort();
    let checks: Vec<CheckSummary> = tally
        .counts
        .into_iter()
        .map(|(check, (cases, failures))| CheckSummary { check, cases, failures })
        .collect();
    VerifyReport { n_max, mode, passed: tally.findings.is_empty(), checks, findings: tally.findings }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::rational;

    #[test]
    fn mode_names_round_trip() {
        for name in VerifyMode::NAMES {
            assert_eq!(name.parse::<VerifyMode>().unwrap().to_string(), name);
        }
        assert!("everything".parse::<VerifyMode>().is_err());
    }

    #[test]
    fn clean_sweep_passes() {
        let report = run_verify(12, VerifyMode::All, &ExactCoefficients);
        assert!(report.passed, "{:?}", report.findings);
        let names: Vec<_> = report.checks.iter().map(|c| c.check).collect();
        for expected in ["sandwich", "reconstruction", "recurrence", "gegenbauer-route", "k-near-n-ratio"] {
            assert!(names.contains(&expected), "{expected} missing from {names:?}");
        }
        assert!(report.checks.iter().all(|c| c.cases > 0 && c.failures == 0));
    }

    #[test]
    fn degree_zero_sweep_is_trivial() {
        let report = run_verify(0, VerifyMode::All, &ExactCoefficients);
        assert!(report.passed);
        assert!(report.checks.iter().any(|c| c.check == "sum-to-one" && c.cases == 1));
    }

    #[test]
    fn corruption_is_reported_with_its_triple() {
        let target = RadialIndex::new(6, 2).unwrap();
        let bad = CorruptedCoefficients::new(target, 4, rational(1, 1000)).unwrap();
        let report = run_verify(8, VerifyMode::Expansion, &bad);
        assert!(!report.passed);
        assert!(report.findings.iter().all(|f| (f.n, f.m) == (6, 2)));
        assert!(report
            .findings
            .iter()
            .any(|f| f.check == "coefficient-projection" && f.i == Some(4)));
        assert!(CorruptedCoefficients::new(target, 3, rational(1, 2)).is_err());
    }

    #[test]
    fn report_is_deterministic() {
        let target = RadialIndex::new(5, 1).unwrap();
        let bad = CorruptedCoefficients::new(target, 1, rational(-1, 7)).unwrap();
        let a = serde_json::to_string(&run_verify(7, VerifyMode::All, &bad)).unwrap();
        let b = serde_json::to_string(&run_verify(7, VerifyMode::All, &bad)).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("\"nonnegative\""));
    }
}
