//! Locale-free numeric formatting with a fixed number of significant digits.

/// Rounds `x` to `digits` significant digits and renders it without
/// trailing zeros. Plain notation for exponents in [-5, digits), scientific
/// otherwise.
pub fn sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let digits = digits.max(1);
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..digits as i32).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        let rounded: f64 = sci.parse().expect("round trip");
        let s = trim(format!("{rounded:.decimals$}"));
        if s == "-0" {
            "0".to_string()
        } else {
            s
        }
    } else {
        format!("{}e{exp}", trim(mantissa.to_string()))
    }
}

/// `x` rounded to `digits` significant digits, as a number.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() {
        return x;
    }
    sig(x, digits).parse().unwrap_or(x)
}

fn trim(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}
