use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use zrd_core::bounds_sharpness::{
    bound_report, bound_report_from, extreme_case_rates, limit_ratio, ratio_diagnostics, stirling_estimate,
    BoundReport, RateCandidate,
};
use zrd_core::connection::{expansion, ChebyshevExpansion};
use zrd_core::exact_arith::{int, rational, to_f64};
use zrd_core::text::format_float;
use zrd_core::verify::{run_verify, CorruptedCoefficients, ExactCoefficients, VerifyMode, VerifyReport};
use zrd_core::zernike_radial::{check_unit_interval, radial_derivative_exact, GegenbauerRoute, RadialEvaluator};
use zrd_core::{BigRational, RadialIndex};

use crate::render::Output;
use crate::CliError;

/// Inclusive grid `start:stop:count`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    start: f64,
    stop: f64,
    count: usize,
}

impl Grid {
    fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|j| if j + 1 == self.count { self.stop } else { self.start + step * j as f64 })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, count] = parts.as_slice() else {
            return Err(format!("grid '{s}' is not of the form start:stop:count"));
        };
        let float = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("bad grid endpoint '{p}': {e}"));
        let count: usize = count.trim().parse().map_err(|e| format!("bad grid count '{count}': {e}"))?;
        if count == 0 {
            return Err("grid count must be at least 1".into());
        }
        Ok(Self { start: float(start)?, stop: float(stop)?, count })
    }
}

/// A `(n, m, i)` triple for the hidden corruption flag.
#[derive(Clone, Copy, Debug)]
pub struct Triple(i64, i64, u32);

impl FromStr for Triple {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [n, m, i] = parts.as_slice() else {
            return Err(format!("expected N,M,I, got '{s}'"));
        };
        let bad = |e: std::num::ParseIntError| format!("bad triple '{s}': {e}");
        Ok(Self(n.parse().map_err(bad)?, m.parse().map_err(bad)?, i.parse().map_err(bad)?))
    }
}

#[derive(Subcommand)]
pub enum Command {
    /// Evaluate R_n^|m| or its k-th derivative at a point or on a grid.
    Eval(EvalArgs),
    /// Chebyshev connection coefficients of R_n^|m|.
    Coeffs(IndexArgs),
    /// Derivative bound report for one (n, m, k), or a sweep with --n-max.
    Bounds(BoundsArgs),
    /// Exact invariant sweeps; exit status 1 if any check fails.
    Verify(VerifyArgs),
    /// Sharpness diagnostics.
    #[command(subcommand)]
    Sharpness(Scenario),
}

#[derive(Args)]
pub struct IndexArgs {
    #[arg(long)]
    n: i64,
    #[arg(long, allow_negative_numbers = true)]
    m: i64,
}

impl IndexArgs {
    fn index(&self) -> Result<RadialIndex, CliError> {
        Ok(RadialIndex::new(self.n, self.m)?)
    }
}

#[derive(Args)]
pub struct EvalArgs {
    #[command(flatten)]
    index: IndexArgs,
    /// Derivative order.
    #[arg(long, default_value_t = 0)]
    k: u32,
    #[arg(long, allow_negative_numbers = true, required_unless_present = "grid", conflicts_with = "grid")]
    r: Option<f64>,
    /// start:stop:count with both endpoints included.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<Grid>,
}

#[derive(Args)]
pub struct BoundsArgs {
    #[arg(long, required_unless_present = "n_max", conflicts_with = "n_max")]
    n: Option<i64>,
    #[arg(long, allow_negative_numbers = true, required_unless_present = "n_max", conflicts_with = "n_max")]
    m: Option<i64>,
    #[arg(long, required_unless_present = "n_max")]
    k: Option<u32>,
    /// Sweep every valid (n, m) with n <= N.
    #[arg(long, value_name = "N")]
    n_max: Option<u32>,
    /// Highest k in a sweep (default: n for each n).
    #[arg(long, requires = "n_max")]
    k_max: Option<u32>,
}

#[derive(Args)]
pub struct VerifyArgs {
    #[arg(long)]
    n_max: u32,
    #[arg(long, default_value = "all", value_parser = parse_mode)]
    mode: VerifyMode,
    /// Write the findings as JSON to this file.
    #[arg(long)]
    pub findings: Option<PathBuf>,
    /// Add 1/1000 to a_I of R_N^M before checking.
    #[arg(long, hide = true, value_name = "N,M,I", allow_hyphen_values = true)]
    corrupt: Option<Triple>,
}

fn parse_mode(s: &str) -> Result<VerifyMode, String> {
    s.parse().map_err(|e: zrd_core::Error| e.to_string())
}

#[derive(Subcommand)]
pub enum Scenario {
    /// value/upper against its large-n limit (1/2)_k/(1)_k.
    Limits {
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<i64>,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0)]
        m: i64,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        k: Vec<u32>,
    },
    /// Large-n estimates of the leading coefficient a_n.
    Stirling {
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<i64>,
        #[arg(long, allow_negative_numbers = true, conflicts_with = "m_sqrt", required_unless_present = "m_sqrt")]
        m: Option<i64>,
        /// Use m = floor(sqrt(n)) for each n.
        #[arg(long)]
        m_sqrt: bool,
    },
    /// The n = m = 2k family, where neither bound is attained.
    Extreme {
        #[arg(long, default_value_t = 40)]
        k_max: u32,
    },
}

pub fn eval(args: &EvalArgs, exact: bool) -> Result<Output, CliError> {
    let idx = args.index.index()?;
    let k = args.k;
    let points = match (args.r, args.grid) {
        (Some(r), _) => vec![r],
        (None, Some(grid)) => grid.points(),
        (None, None) => unreachable!("clap requires --r or --grid"),
    };
    for &r in &points {
        check_unit_interval(r)?;
    }

    enum Route {
        Plain(RadialEvaluator),
        Gegenbauer(GegenbauerRoute),
    }
    let route = if k == 0 {
        Route::Plain(RadialEvaluator::new(idx))
    } else {
        Route::Gegenbauer(GegenbauerRoute::new(idx))
    };
    let poly = exact.then(|| radial_derivative_exact(idx, k));

    #[derive(Serialize)]
    struct Row {
        r: f64,
        value: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        exact: Option<String>,
    }
    let rows: Vec<Row> = points
        .iter()
        .map(|&r| {
            let value = match &route {
                Route::Plain(e) => e.eval(r).expect("r checked"),
                Route::Gegenbauer(_) if k > idx.n() => 0.0,
                Route::Gegenbauer(g) => g.eval(k, r),
            };
            let exact = poly.as_ref().map(|p| {
                let x = BigRational::from_float(r).expect("finite r");
                p.eval(&x).to_string()
            });
            Row { r, value, exact }
        })
        .collect();

    let mut header = vec!["n", "m", "k", "r", "value"];
    if exact {
        header.push("exact");
    }
    let json = json!({ "n": idx.n(), "m": idx.m(), "k": k, "points": rows });
    let mut out = Output::new(&header, json);
    for row in &rows {
        let mut cells =
            vec![idx.n().to_string(), idx.m().to_string(), k.to_string(), format_float(row.r), format_float(row.value)];
        cells.extend(row.exact.clone());
        out.rows.push(cells);
    }
    Ok(out)
}

pub fn coeffs(args: &IndexArgs) -> Result<Output, CliError> {
    let exp = expansion(args.index()?);
    let sum = exp.sum();
    if sum != int(1) {
        return Err(CliError::Verification(format!("coefficients of {} sum to {sum}", exp.index())));
    }
    Ok(coefficient_table(&exp, &sum))
}

fn coefficient_table(exp: &ChebyshevExpansion, sum: &BigRational) -> Output {
    let idx = exp.index();
    let terms: Vec<_> = exp
        .terms()
        .map(|(i, a)| json!({ "i": i, "a_i": a.to_string(), "approx": to_f64(a) }))
        .collect();
    let json = json!({ "n": idx.n(), "m": idx.m(), "coeffs": terms, "sum": sum.to_string() });
    let mut out = Output::new(&["n", "m", "i", "a_i", "approx"], json);
    let (n, m) = (idx.n().to_string(), idx.m().to_string());
    for (i, a) in exp.terms() {
        out.rows.push(vec![n.clone(), m.clone(), i.to_string(), a.to_string(), format_float(to_f64(a))]);
    }
    out.rows.push(vec![n, m, "sum".into(), sum.to_string(), format_float(to_f64(sum))]);
    out
}

fn report_row(r: &BoundReport) -> Vec<String> {
    r.csv_record().to_vec()
}

pub fn bounds(args: &BoundsArgs) -> Result<Output, CliError> {
    if let Some(n_max) = args.n_max {
        let indices: Vec<RadialIndex> = RadialIndex::all_up_to(n_max).collect();
        let reports: Vec<Vec<BoundReport>> = indices
            .par_iter()
            .map(|&idx| {
                let exp = expansion(idx);
                let top = args.k_max.map_or(idx.n(), |k| k.min(idx.n()));
                (0..=top).map(|k| bound_report_from(&exp, k)).collect()
            })
            .collect();
        let reports: Vec<BoundReport> = reports.into_iter().flatten().collect();
        let json = serde_json::to_value(&reports).expect("reports serialize");
        let mut out = Output::new(&BoundReport::CSV_HEADER, json);
        out.rows = reports.iter().map(report_row).collect();
        return Ok(out);
    }

    let (n, m, k) = (args.n.expect("clap"), args.m.expect("clap"), args.k.expect("clap"));
    let idx = RadialIndex::new(n, m)?;
    let report = bound_report(idx, k);
    let limit = limit_ratio(k);
    let mut json = serde_json::to_value(&report).expect("report serializes");
    json["limit"] = json!(to_f64(&limit));
    let mut out = Output::new(&BoundReport::CSV_HEADER, json);
    out.rows.push(report_row(&report));
    let ratio = |x: Option<f64>| x.map_or_else(|| "undefined".to_string(), format_float);
    out.notes = vec![
        format!("lower_attained    {}", report.lower_attained),
        format!("upper_attained    {}", report.upper_attained),
        format!("lower_over_value  {}", ratio(report.lower_over_value())),
        format!("value_over_lower  {}", ratio(report.value_over_lower())),
        format!("large-n limit of value_over_upper  {limit} = {}", format_float(to_f64(&limit))),
    ];
    Ok(out)
}

pub struct VerifyOutcome {
    pub output: Output,
    pub report: VerifyReport,
}

pub fn verify(args: &VerifyArgs) -> Result<VerifyOutcome, CliError> {
    let report = match args.corrupt {
        Some(Triple(n, m, i)) => {
            let target = RadialIndex::new(n, m)?;
            let source = CorruptedCoefficients::new(target, i, rational(1, 1000))?;
            run_verify(args.n_max, args.mode, &source)
        }
        None => run_verify(args.n_max, args.mode, &ExactCoefficients),
    };
    let json = serde_json::to_value(&report).expect("report serializes");
    let mut output = Output::new(&["check", "cases", "failures"], json);
    for c in &report.checks {
        output.rows.push(vec![c.check.to_string(), c.cases.to_string(), c.failures.to_string()]);
    }
    output.notes.extend(report.findings.iter().map(|f| format!("violation {f}")));
    output.notes.push(format!(
        "{} mode={} n_max={}",
        if report.passed { "PASS" } else { "FAIL" },
        report.mode,
        report.n_max
    ));
    Ok(VerifyOutcome { output, report })
}

pub fn sharpness(scenario: &Scenario) -> Result<Output, CliError> {
    match scenario {
        Scenario::Limits { n, m, k } => limits(n, *m, k),
        Scenario::Stirling { n, m, m_sqrt } => stirling(n, *m, *m_sqrt),
        Scenario::Extreme { k_max } => extreme(*k_max),
    }
}

fn limits(ns: &[i64], m: i64, ks: &[u32]) -> Result<Output, CliError> {
    #[derive(Serialize)]
    struct Row {
        n: u32,
        m: u32,
        k: u32,
        value_over_upper: f64,
        limit: f64,
        lower_over_value: f64,
        value_over_lower: f64,
    }
    let mut cases = Vec::new();
    for &n in ns {
        let idx = RadialIndex::new(n, m)?;
        for &k in ks {
            cases.push((idx, k));
        }
    }
    let rows: Vec<Row> = cases
        .par_iter()
        .map(|&(idx, k)| {
            ratio_diagnostics(idx, k).map(|d| Row {
                n: idx.n(),
                m: idx.m(),
                k,
                value_over_upper: d.value_over_upper,
                limit: d.limit,
                lower_over_value: d.lower_over_value,
                value_over_lower: d.value_over_lower,
            })
        })
        .collect::<Result<_, _>>()?;
    let header = ["n", "m", "k", "value_over_upper", "limit", "lower_over_value", "value_over_lower"];
    let mut out = Output::new(&header, serde_json::to_value(&rows).expect("rows serialize"));
    for r in &rows {
        out.rows.push(vec![
            r.n.to_string(),
            r.m.to_string(),
            r.k.to_string(),
            format_float(r.value_over_upper),
            format_float(r.limit),
            format_float(r.lower_over_value),
            format_float(r.value_over_lower),
        ]);
    }
    Ok(out)
}

fn stirling(ns: &[i64], m: Option<i64>, m_sqrt: bool) -> Result<Output, CliError> {
    let mut estimates = Vec::new();
    for &n in ns {
        let m = if m_sqrt { (n.max(0) as f64).sqrt().floor() as i64 } else { m.expect("clap") };
        estimates.push(stirling_estimate(RadialIndex::new(n, m)?)?);
    }
    let header = ["n", "m", "exact", "stirling", "gaussian", "rel_err_stirling", "rel_err_gaussian"];
    let mut out = Output::new(&header, serde_json::to_value(&estimates).expect("estimates serialize"));
    for s in &estimates {
        out.rows.push(vec![
            s.n.to_string(),
            s.m.to_string(),
            format_float(s.exact),
            format_float(s.stirling),
            format_float(s.gaussian),
            format_float(s.rel_err_stirling),
            format_float(s.rel_err_gaussian),
        ]);
    }
    Ok(out)
}

impl fmt::Display for CandidateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            RateCandidate::ThirtyTwoOverTwentySeven => "32/27",
            RateCandidate::ThirtyTwoOverThirtySeven => "32/37",
        })
    }
}

struct CandidateName(RateCandidate);

fn extreme(k_max: u32) -> Result<Output, CliError> {
    let table = extreme_case_rates(k_max)?;
    let header = ["k", "value", "lower", "upper", "root_value_over_lower", "root_value_over_upper"];
    let rows: Vec<_> = table
        .rows
        .iter()
        .map(|r| {
            json!({
                "k": r.k,
                "value": r.value.to_string(),
                "lower": r.lower.to_string(),
                "upper": r.upper.to_string(),
                "root_value_over_lower": r.root_value_over_lower,
                "root_value_over_upper": r.root_value_over_upper,
            })
        })
        .collect();
    let d = table.determination;
    let json = json!({ "rows": rows, "determination": d });
    let mut out = Output::new(&header, json);
    for r in &table.rows {
        out.rows.push(vec![
            r.k.to_string(),
            r.value.to_string(),
            r.lower.to_string(),
            r.upper.to_string(),
            format_float(r.root_value_over_lower),
            format_float(r.root_value_over_upper),
        ]);
    }
    let base = |b: Option<f64>| b.map_or_else(|| "needs k_max >= 3".to_string(), format_float);
    out.notes = vec![
        format!("fitted base of value/lower  {}", base(d.value_over_lower_base)),
        format!("fitted base of value/upper  {}", base(d.value_over_upper_base)),
        format!("value/lower grows           {}", d.value_over_lower_grows),
        format!(
            "closest candidate           {} (32/27 = {}, 32/37 = {})",
            CandidateName(d.nearest_candidate),
            format_float(32.0 / 27.0),
            format_float(32.0 / 37.0)
        ),
    ];
    Ok(out)
}
