//! Decimal rendering of doubles with 17 significant digits.
//!
//! Output follows C's `%.17g`: fixed notation for decimal exponents in
//! `[-4, 17)`, scientific otherwise, trailing zeros removed. Seventeen
//! significant digits identify every `f64` uniquely, so parsing the text back
//! yields the identical value.

pub fn sig17(x: f64) -> String {
    if x.is_nan() {
        return "NaN".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.to_string();
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        let decimals = (16 - exp) as usize;
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
    let t = s.trim_end_matches('0').trim_end_matches('.');
    t.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn matches_printf_g17() {
        assert_eq!(sig17(1.0), "1");
        assert_eq!(sig17(0.5), "0.5");
        assert_eq!(sig17(0.1), "0.10000000000000001");
        assert_eq!(sig17(101.0 / 3.0), "33.666666666666664");
        assert_eq!(sig17(-3.2), "-3.2000000000000002");
        assert_eq!(sig17(1e-5), "1.0000000000000001e-05");
        assert_eq!(sig17(1e20), "1e+20");
        assert_eq!(sig17(0.0), "0");
    }

    proptest! {
        #[test]
        fn round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let back: f64 = sig17(x).parse().unwrap();
            prop_assert_eq!(back.to_bits(), x.to_bits());
        }
    }
}
