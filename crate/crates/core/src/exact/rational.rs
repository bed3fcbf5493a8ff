use num_bigint::BigInt;
use num_rational::BigRational;

use super::ExactError;

/// Arbitrary-precision rational, always kept reduced with a positive
/// denominator (zero is `0/1`).
pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// `"p/q"` in lowest terms, or `"p"` when the denominator is one.
pub fn format_rational(value: &Rational) -> String {
    value.to_string()
}

pub fn parse_rational(text: &str) -> Result<Rational, ExactError> {
    let bad = || ExactError::BadRational(text.to_string());
    let text = text.trim();
    let (numer, denom) = match text.split_once('/') {
        Some((p, q)) => (p.trim(), Some(q.trim())),
        None => (text, None),
    };
    let numer: BigInt = numer.parse().map_err(|_| bad())?;
    let denom: BigInt = match denom {
        Some(q) => q.parse().map_err(|_| bad())?,
        None => BigInt::from(1),
    };
    if denom == BigInt::from(0) {
        return Err(bad());
    }
    Ok(Rational::new(numer, denom))
}

/// Serde adapter storing a [`Rational`] as its `"p/q"` string.
pub mod rational_str {
    use super::{format_rational, parse_rational, Rational};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(D::Error::custom)
    }
}
