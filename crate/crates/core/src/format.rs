//! Locale-free `%g`-style formatting at a fixed number of significant digits.

pub const MIN_PRECISION: usize = 6;
pub const MAX_PRECISION: usize = 17;

/// Formats `x` with `precision` significant digits, trailing zeros trimmed.
/// Fixed notation is used for decimal exponents in `[-5, precision)`,
/// scientific otherwise.
pub fn format_sig(x: f64, precision: usize) -> String {
    let precision = precision.clamp(1, MAX_PRECISION);
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", precision - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= precision as i32 {
        format!("{}e{}{:02}", trim(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (precision as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `x` rounded to `precision` significant digits, as a JSON number
/// (`null` for non-finite values).
pub fn json_number(x: f64, precision: usize) -> serde_json::Value {
    if !x.is_finite() {
        return serde_json::Value::Null;
    }
    let rounded: f64 = format_sig(x, precision).parse().expect("formatted float parses");
    serde_json::Number::from_f64(rounded)
        .map(serde_json::Value::Number)
        .unwrap_or(serde_json::Value::Null)
}
