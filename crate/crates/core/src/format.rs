//! Locale-independent `%.{n}g`-style number formatting for CSV output.

/// Formats `x` with `significant` significant digits the way C's `%.*g`
/// does: fixed notation when the decimal exponent lies in
/// `[-4, significant)`, scientific otherwise, trailing zeros removed.
pub fn format_g(x: f64, significant: usize) -> String {
    let p = significant.max(1);
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.to_string();
    }
    // Rounding to p digits can bump the exponent (9.9999999996 -> 10), so
    // take the exponent from the rounded scientific rendering.
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if exp < -4 || exp >= p as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
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

/// Nine significant digits, the precision used for every CSV file.
pub fn g9(x: f64) -> String {
    format_g(x, 9)
}
