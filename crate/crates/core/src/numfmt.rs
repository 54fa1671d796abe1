//! Fixed ten-significant-digit number formatting shared by every renderer.

/// Significant digits carried by every emitted real number.
pub const SIGNIFICANT_DIGITS: usize = 10;

/// Formats `x` like C's `%.10g`: ten significant digits, trailing zeros
/// trimmed, scientific notation outside `1e-4 <= |x| < 1e10`.
pub fn sig10(x: f64) -> String {
    format_g(x, SIGNIFICANT_DIGITS)
}

pub fn format_g(x: f64, precision: usize) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let precision = precision.max(1);
    let sci = format!("{:.*e}", precision - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= precision as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (precision as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Rounds through the emitted text so JSON numbers equal the CSV digits.
pub fn round_sig10(x: f64) -> f64 {
    sig10(x).parse().unwrap_or(x)
}
