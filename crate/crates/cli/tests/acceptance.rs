//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::{One, Signed};

use zrd_core::bounds_sharpness::{
    bound_report_from, chebyshev_deriv_at_one, closed_form_k12, extreme_case_rates, k_near_n_formula,
    new_upper_bound, old_upper_bound, ratio_diagnostics, stirling_estimate, RateCandidate,
};
use zrd_core::classical_polys::{chebyshev_t, gegenbauer_c};
use zrd_core::connection::{expansion, leading_coefficient, near_leading_coefficients};
use zrd_core::exact_arith::{binomial, factorial, from_biguint, int, rational, to_f64};
use zrd_core::zernike_radial::{
    radial_derivative_exact, radial_derivative_gegenbauer_poly, radial_derivative_recurrence, radial_poly,
    GegenbauerRoute,
};
use zrd_core::{BigRational, RadialIndex};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn idx(n: u32, m: u32) -> RadialIndex {
    RadialIndex::new(n.into(), m.into()).expect("valid index")
}

fn sandwich_sweep() -> Outcome {
    let mut single_term = Vec::new();
    let mut cases = 0;
    for i in RadialIndex::all_up_to(40) {
        let exp = expansion(i);
        let n = i.n();
        if exp.leading().is_one() {
            single_term.push(i);
        }
        for k in 0..=n {
            cases += 1;
            let r = bound_report_from(&exp, k);
            ensure(r.lower <= r.value_at_one && r.value_at_one <= r.upper, || {
                format!("{i} k={k}: lower {} value {} upper {}", r.lower, r.value_at_one, r.upper)
            })?;
            if n > 0 {
                // When R_n^m is T_n itself (a_n = 1) the value is B(n, k) for every k.
                let expect_upper = k == 0 || exp.leading().is_one();
                ensure(r.upper_attained == expect_upper, || format!("{i} k={k}: upper attained {}", r.upper_attained))?;
            }
            if k + 1 >= n {
                ensure(r.lower_attained, || format!("{i} k={k}: lower bound not attained"))?;
            }
        }
    }
    let expected = [idx(0, 0), idx(1, 1), idx(2, 0)];
    ensure(single_term == expected, || format!("a_n = 1 exactly for {single_term:?}"))?;
    Ok(format!(
        "{cases} (n, m, k) exact; upper attained only at k = 0 except R_1^1 = T_1 and R_2^0 = T_2, where it holds for every k"
    ))
}

fn reconstruction() -> Outcome {
    for i in RadialIndex::all_up_to(40) {
        let exp = expansion(i);
        ensure(exp.to_poly() == radial_poly(i), || format!("{i}: reconstruction differs"))?;
    }
    let mut count = 0;
    for i in RadialIndex::all_up_to(200) {
        let exp = expansion(i);
        ensure(exp.coeffs().iter().all(|a| !a.is_negative()), || format!("{i}: negative coefficient"))?;
        ensure(exp.sum().is_one(), || format!("{i}: coefficients sum to {}", exp.sum()))?;
        count += 1;
    }
    Ok(format!("polynomial identity for n <= 40; non-negativity and unit sum for all {count} indices with n <= 200"))
}

fn closed_forms() -> Outcome {
    let mut near = 0;
    for i in RadialIndex::all_up_to(200).filter(|i| i.n() > 0) {
        let exp = expansion(i);
        let a_n = leading_coefficient(i).map_err(|e| e.to_string())?;
        ensure(*exp.leading() == a_n, || format!("{i}: a_n {} vs closed form {a_n}", exp.leading()))?;
        let nl = near_leading_coefficients(i);
        for (gap, closed) in [(2, nl.minus_two), (4, nl.minus_four)] {
            if let Ok(closed) = closed {
                near += 1;
                let got = exp.coefficient(i.n() - gap).expect("in range");
                ensure(*got == closed, || format!("{i}: a_(n-{gap}) {got} vs closed form {closed}"))?;
            }
        }
    }
    let one = BigRational::one();
    for i in RadialIndex::all_up_to(60) {
        let c = closed_form_k12(i);
        let d1 = radial_derivative_exact(i, 1).eval(&one);
        let d2 = radial_derivative_exact(i, 2).eval(&one);
        ensure(d1 == c.first_deriv && d2 == c.second_deriv, || {
            format!("{i}: derivatives at 1 are {d1}, {d2}; closed forms {}, {}", c.first_deriv, c.second_deriv)
        })?;
    }
    for i in RadialIndex::all_up_to(40).filter(|i| i.n() >= 3) {
        let n = i.n();
        let value = radial_derivative_exact(i, n - 2).eval(&one);
        let ratio = value / (leading_coefficient(i).unwrap() * chebyshev_deriv_at_one(n, n - 2));
        let want = k_near_n_formula(i).unwrap();
        ensure(ratio == want, || format!("{i}: k = n-2 ratio {ratio} vs {want}"))?;
    }
    Ok(format!("leading and {near} near-leading coefficients for n <= 200; k = 1, 2 for n <= 60; k = n-2 for n <= 40"))
}

fn route_agreement() -> Outcome {
    for i in RadialIndex::all_up_to(40) {
        ensure(radial_derivative_recurrence(i) == radial_derivative_exact(i, 1), || format!("{i}: recurrence"))?;
    }
    for i in RadialIndex::all_up_to(30) {
        for k in 0..=10 {
            ensure(radial_derivative_gegenbauer_poly(i, k) == radial_derivative_exact(i, k), || {
                format!("{i} k={k}: Gegenbauer route")
            })?;
        }
    }
    for l in 0..=30u32 {
        for k in 1..=10u32 {
            let lhs = chebyshev_t(l).derivative(k as usize);
            let factor = from_biguint(factorial(u64::from(k - 1)) << (k - 1)) * int(l.into());
            let rhs = gegenbauer_c(i64::from(l) - i64::from(k), k).scale(&factor);
            ensure(lhs == rhs, || format!("T_{l}^({k}) differs from its Gegenbauer form"))?;
        }
    }
    Ok("recurrence n <= 40; Gegenbauer route n <= 30, k <= 10; Chebyshev/Gegenbauer identity l <= 30, k <= 10".into())
}

fn maximizer() -> Outcome {
    let mut worst = 0.0f64;
    for i in RadialIndex::all_up_to(30) {
        let route = GegenbauerRoute::new(i);
        let exp = expansion(i);
        for k in 1..=i.n() {
            let at_one = to_f64(&bound_report_from(&exp, k).value_at_one);
            let grid_max = (0..=2000).map(|j| route.eval(k, f64::from(j) / 2000.0).abs()).fold(0.0, f64::max);
            let rel = (grid_max - at_one).abs() / at_one;
            worst = worst.max(rel);
            ensure(rel <= 1e-9, || format!("{i} k={k}: grid max {grid_max} vs value at 1 {at_one}"))?;
        }
    }
    Ok(format!("n <= 30, 1 <= k <= n on 2001 points; worst relative gap {worst:.2e}"))
}

fn improvement() -> Outcome {
    for n in 1..=60u32 {
        for k in 1..=n {
            let new = new_upper_bound(n, k);
            let old = from_biguint(old_upper_bound(n, k));
            ensure(new <= old, || format!("B({n}, {k}) = {new} exceeds {old}"))?;
        }
    }
    let (new, old) = (new_upper_bound(4, 2), old_upper_bound(4, 2));
    ensure(new == int(80) && old == BigUint::from(256u32), || format!("(4, 2): {new} vs {old}"))?;
    Ok("1 <= k <= n <= 60; B(4, 2) = 80 vs 4^4 = 256".into())
}

fn limits() -> Outcome {
    for n in (2..=200u32).step_by(2) {
        let r = bound_report_from(&expansion(idx(n, 0)), 1);
        let ratio = &r.value_at_one / &r.upper;
        let want = rational((n + 2).into(), (2 * n).into());
        ensure(ratio == want, || format!("n={n}: value/upper {ratio} vs {want}"))?;
        ensure((ratio - rational(1, 2)).abs() == rational(1, n.into()), || format!("n={n}: distance to 1/2"))?;
    }
    let k2 = ratio_diagnostics(idx(200, 0), 2).map_err(|e| e.to_string())?.value_over_upper;
    ensure((k2 / 0.375 - 1.0).abs() <= 0.05, || format!("k=2, n=200: {k2}"))?;
    let k3 = ratio_diagnostics(idx(2000, 0), 3).map_err(|e| e.to_string())?.value_over_upper;
    ensure((k3 / 0.3125 - 1.0).abs() <= 0.05, || format!("k=3, n=2000: {k3}"))?;
    Ok(format!("k=1 exact for even n <= 200; k=2 n=200: {k2:.6} (3/8); k=3 n=2000: {k3:.6} (5/16)"))
}

fn stirling() -> Outcome {
    let s = stirling_estimate(idx(100, 0)).map_err(|e| e.to_string())?;
    let independent = to_f64(&BigRational::new(
        (BigUint::from(2u32) * binomial(100, 50)).into(),
        (BigUint::one() << 100u32).into(),
    ));
    ensure(s.exact == independent, || format!("a_100 {} vs 2 C(100, 50) / 2^100 = {independent}", s.exact))?;
    ensure((s.exact - 0.159_178_4).abs() < 1e-7 && (s.gaussian - 0.159_576_9).abs() < 1e-7, || format!("{s:?}"))?;
    ensure(s.rel_err_gaussian < 0.01, || format!("relative error {}", s.rel_err_gaussian))?;
    let mut errs = Vec::new();
    for n in [100u32, 400, 1600, 6400] {
        let m = f64::from(n).sqrt().floor() as u32;
        let e = stirling_estimate(idx(n, m)).map_err(|e| e.to_string())?.rel_err_gaussian;
        ensure(e < 5.0 / f64::from(n).sqrt(), || format!("n={n}, m={m}: relative error {e}"))?;
        ensure(errs.last().is_none_or(|&prev| e < prev), || format!("n={n}: error {e} did not decrease"))?;
        errs.push(e);
    }
    let shown: Vec<String> = errs.iter().map(|e| format!("{e:.3e}")).collect();
    Ok(format!("(100, 0) rel err {:.3e}; m = floor(sqrt n) errors {}", s.rel_err_gaussian, shown.join(", ")))
}

fn sharpness_order() -> Outcome {
    let target = 4.0 * (-0.5f64).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut shown = Vec::new();
    for n in [100u32, 400, 1600] {
        let m = f64::from(n).sqrt().floor() as u32;
        let i = idx(n, m);
        let exp = expansion(i);
        let r = bound_report_from(&exp, 1);
        let ratio = &r.value_at_one / &r.upper;
        ensure(ratio >= *exp.leading(), || format!("n={n}: value/upper below a_n"))?;
        let ratio = to_f64(&ratio);
        ensure(ratio >= 0.45, || format!("n={n}: value/upper {ratio}"))?;
        let c = to_f64(exp.leading()) * f64::from(n).sqrt();
        ensure((c / target - 1.0).abs() <= 0.25, || format!("n={n}: sqrt(n) a_n = {c} vs {target}"))?;
        shown.push(format!("n={n}: ratio {ratio:.4}, sqrt(n) a_n {c:.4}"));
    }
    Ok(format!("{} (target constant {target:.4})", shown.join("; ")))
}

fn extreme_case() -> Outcome {
    let t = extreme_case_rates(40).map_err(|e| e.to_string())?;
    let last = t.rows.last().expect("rows");
    ensure(last.k == 40, || "table stops early".into())?;
    let root_upper = last.root_value_over_upper;
    ensure((root_upper / (8.0 / 27.0) - 1.0).abs() <= 0.10, || format!("k=40 root of value/upper {root_upper}"))?;
    let d = t.determination;
    let base = d.value_over_lower_base.ok_or("no fitted base")?;
    ensure(d.value_over_lower_grows && base > 1.0, || format!("value/lower base {base} does not exceed 1"))?;
    let tail: Vec<f64> = t.rows[30..].iter().map(|r| r.root_value_over_lower).collect();
    ensure(tail.windows(2).all(|w| w[1] > w[0] && w[1] - w[0] < 2e-3), || format!("k-th roots {tail:?}"))?;
    let verdict = match d.nearest_candidate {
        RateCandidate::ThirtyTwoOverTwentySeven => "approaches 32/27, not 32/37 (< 1, so it cannot describe a growing ratio)",
        RateCandidate::ThirtyTwoOverThirtySeven => "approaches 32/37",
    };
    Ok(format!(
        "k=40 root of value/upper {root_upper:.6} (8/27 = {:.6}); fitted base of value/lower {base:.6}, {verdict}",
        8.0 / 27.0
    ))
}

fn negative_control() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_zrd");
    let clean = Command::new(bin).args(["verify", "--n-max", "12"]).output().map_err(|e| e.to_string())?;
    ensure(clean.status.code() == Some(0), || format!("clean sweep exited {:?}", clean.status.code()))?;
    let bad = Command::new(bin)
        .args(["verify", "--n-max", "12", "--corrupt", "10,4,6"])
        .output()
        .map_err(|e| e.to_string())?;
    let stderr = String::from_utf8_lossy(&bad.stderr);
    ensure(bad.status.code() == Some(1), || format!("corrupted sweep exited {:?}", bad.status.code()))?;
    ensure(stderr.contains("(n=10, m=4, i=6)"), || format!("stderr does not name the triple: {stderr}"))?;
    let stdout = String::from_utf8_lossy(&bad.stdout);
    let others = stdout
        .lines()
        .filter(|l| l.starts_with("violation") && !l.contains("n=10 m=4"))
        .count();
    ensure(others == 0, || format!("{others} violations reported away from the corrupted index"))?;
    Ok(format!("clean sweep exit 0; corrupted a_6 of R_10^4 exit 1: {}", stderr.trim()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("exact sandwich sweep", sandwich_sweep),
        ("exact reconstruction", reconstruction),
        ("closed-form agreement", closed_forms),
        ("route agreement", route_agreement),
        ("maximizer certification", maximizer),
        ("bound improvement", improvement),
        ("limits", limits),
        ("Stirling asymptotics", stirling),
        ("sharpness within O(1/sqrt n)", sharpness_order),
        ("extreme case", extreme_case),
        ("negative control", negative_control),
    ];
    let mut failed = 0;
    for (number, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.1}s): {detail}", number + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.1}s): {detail}", number + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
