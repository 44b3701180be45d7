//! Fixed float formatting so output files are byte-identical across runs.

/// C's `%.12g`: twelve significant digits, trailing zeros dropped,
/// exponent form outside `1e-4 ≤ |x| < 1e12`.
pub fn fmt_g(x: f64) -> String {
    const PRECISION: i32 = 12;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", (PRECISION - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..PRECISION).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let fixed = format!("{:.*}", (PRECISION - 1 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    }
}

/// Rounds to the value that [`fmt_g`] prints.
pub fn round_g(x: f64) -> f64 {
    fmt_g(x).parse().unwrap_or(x)
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    #[allow(clippy::excessive_precision)]
    fn matches_printf() {
        let cases = [
            (0.0, "0"),
            (-0.0, "0"),
            (1.0, "1"),
            (0.07000000000000001, "0.07"),
            (1.959591794226542, "1.95959179423"),
            (-0.002451, "-0.002451"),
            (1e-5, "1e-05"),
            (0.0001, "0.0001"),
            (123456789012.0, "123456789012"),
            (1234567890123.0, "1.23456789012e+12"),
            (999999999999.9, "1e+12"),
            (2.5e-300, "2.5e-300"),
            (0.1 + 0.2, "0.3"),
        ];
        for (x, want) in cases {
            assert_eq!(fmt_g(x), want, "{x:e}");
        }
    }

    #[test]
    fn rounding_is_idempotent() {
        for x in [0.1, 1.0 / 3.0, 2f64.sqrt(), -7.25e-9] {
            assert_eq!(fmt_g(round_g(x)), fmt_g(x));
        }
    }
}
