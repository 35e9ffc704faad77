//! Helpers around the arbitrary-precision rational scalar.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact scalar: always stored in lowest terms with a positive denominator.
pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// `p/q`, or just `p` when the denominator is one.
pub fn format_rational(value: &Rational) -> String {
    value.to_string()
}

pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let value: Rational = text
        .parse()
        .map_err(|_| Error::Parse(format!("not a rational: {text:?}")))?;
    Ok(value)
}

/// Nearest binary64 value.
pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or_else(|| {
        if value.is_negative() {
            f64::NEG_INFINITY
        } else if value.is_zero() {
            0.0
        } else {
            f64::INFINITY
        }
    })
}

/// Exact rational value of a finite `f64`.
pub fn from_f64(value: f64) -> Result<Rational> {
    Rational::from_float(value)
        .ok_or_else(|| Error::InvalidInput(format!("non-finite value {value}")))
}

/// Decimal rendering with 12 significant digits, no locale dependence.
pub fn format_decimal(value: f64) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    if !value.is_finite() {
        return value.to_string();
    }
    let magnitude = value.abs().log10().floor() as i32;
    if !(-5..=11).contains(&magnitude) {
        let text = format!("{value:.11e}");
        let (mantissa, exponent) = text.split_once('e').unwrap_or((&text, "0"));
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        return format!("{mantissa}e{exponent}");
    }
    let decimals = (11 - magnitude).max(0) as usize;
    let text = format!("{value:.decimals$}");
    if text.contains('.') {
        text.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        text
    }
}

pub fn max_abs<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Rational {
    values
        .into_iter()
        .map(|v| v.abs())
        .max()
        .unwrap_or_else(Rational::zero)
}

/// Serde helpers writing rationals as `"p/q"` strings.
pub mod serde_rational {
    use serde::ser::SerializeSeq;
    use serde::Serializer;

    use super::Rational;

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&value.to_string())
    }

    pub fn serialize_vec<S: Serializer>(values: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(values.len()))?;
        for v in values {
            seq.serialize_element(&v.to_string())?;
        }
        seq.end()
    }

    pub fn serialize_option<S: Serializer>(
        value: &Option<Rational>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        match value {
            Some(v) => s.serialize_str(&v.to_string()),
            None => s.serialize_none(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_integers_without_denominator() {
        assert_eq!(format_rational(&rat(6, 3)), "2");
        assert_eq!(format_rational(&rat(-10, 14)), "-5/7");
        assert_eq!(format_rational(&Rational::zero()), "0");
    }

    #[test]
    fn parses_both_forms() {
        assert_eq!(parse_rational("10/7").unwrap(), rat(10, 7));
        assert_eq!(parse_rational(" -3 ").unwrap(), int(-3));
        assert!(parse_rational("1/0").is_err() || parse_rational("x").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn decimal_has_twelve_significant_digits() {
        assert_eq!(format_decimal(10.0 / 7.0), "1.42857142857");
        assert_eq!(format_decimal(1.0), "1");
        assert_eq!(format_decimal(0.5), "0.5");
        assert_eq!(
            format_decimal(1.0 - std::f64::consts::LN_2),
            "0.30685281944"
        );
        assert_eq!(format_decimal(2.3e-6), "2.3e-6");
        assert_eq!(format_decimal(1.5e-9), "1.5e-9");
    }

    #[test]
    fn f64_round_trip_is_exact() {
        let x = 0.1f64;
        assert_eq!(to_f64(&from_f64(x).unwrap()), x);
        assert_eq!(to_f64(&rat(1, 3)), 1.0 / 3.0);
    }
}
