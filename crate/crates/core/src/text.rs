//! Plain-text rendering shared by the report types and the CLI.

/// Significant digits used for floats in every table.
pub const FLOAT_DIGITS: usize = 12;

/// `%.12g`-style rendering: 12 significant digits, trailing zeros trimmed, scientific
/// notation outside `1e-4 <= |x| < 1e12`.
pub fn format_float(x: f64) -> String {
    format_significant(x, FLOAT_DIGITS)
}

pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let digits = digits.max(1);
    // Round once in scientific form so the exponent reflects the rounded value.
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exponent) = sci.split_once('e').expect("scientific format");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if exponent < -4 || exponent >= digits as i32 {
        return format!("{}e{}", trim_zeros(mantissa), exponent);
    }
    let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
