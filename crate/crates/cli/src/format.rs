//! Locale-independent number formatting for CSV output.

/// Significant digits written for every real-valued column.
pub const SIG_DIGITS: usize = 12;

/// Format like C's `%.12g`: 12 significant digits, trailing zeros trimmed,
/// scientific notation outside `1e-5 ≤ |x| < 1e12`.
pub fn real(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    // Round to the requested precision first so the exponent accounts for carries.
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..SIG_DIGITS as i32).contains(&exp) {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!(
            "{}e{}{:02}",
            trim_zeros(mantissa.to_string()),
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        )
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        assert_eq!(real(0.0), "0");
        assert_eq!(real(1.0), "1");
        assert_eq!(real(0.75), "0.75");
        assert_eq!(real(-2.5), "-2.5");
        assert_eq!(real(1.0 / 3.0), "0.333333333333");
        assert_eq!(real(9.0 / 11.0), "0.818181818182");
        assert_eq!(real(123456.789), "123456.789");
        assert_eq!(real(0.00012345), "0.00012345");
        assert_eq!(real(1.2345e-7), "1.2345e-07");
        assert_eq!(real(0.5f64.powi(11)), "0.00048828125");
        assert_eq!(real(1e12), "1e+12");
        assert_eq!(real(999999999999.9), "1e+12");
        assert_eq!(real(0.99999999999999), "1");
    }
}
