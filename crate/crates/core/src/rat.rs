//! Parsing, formatting, and serde adapters for exact rationals and integers.
//!
//! Rationals cross every external boundary as canonical `"p/q"` strings with
//! `q >= 1`; integers as decimal strings. No floating-point round-trips.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::str::FromStr;

use crate::error::{Error, Result};

/// Shorthand constructor for small rationals.
pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Formats a rational as `"p/q"` in lowest terms with positive denominator.
pub fn rat_str(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"p/q"` or a bare integer `"p"`.
pub fn parse_rat(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p, q),
        None => (s, "1"),
    };
    let p = BigInt::from_str(p.trim()).map_err(|e| Error::Parse(format!("`{s}`: {e}")))?;
    let q = BigInt::from_str(q.trim()).map_err(|e| Error::Parse(format!("`{s}`: {e}")))?;
    if q.is_zero() {
        return Err(Error::Parse(format!("`{s}`: zero denominator")));
    }
    Ok(BigRational::new(p, q))
}

pub fn parse_int(s: &str) -> Result<BigInt> {
    BigInt::from_str(s.trim()).map_err(|e| Error::Parse(format!("`{s}`: {e}")))
}

/// True iff `r` is an integer.
pub fn is_integer(r: &BigRational) -> bool {
    r.denom().is_one()
}

/// Exact floor of a rational as a BigInt.
pub fn floor_int(r: &BigRational) -> BigInt {
    r.floor().to_integer()
}

/// Exact ceiling of a rational as a BigInt.
pub fn ceil_int(r: &BigRational) -> BigInt {
    r.ceil().to_integer()
}

/// Absolute value.
pub fn rat_abs(r: &BigRational) -> BigRational {
    r.abs()
}

/// Serde adapter: `BigRational` <-> `"p/q"`.
pub mod serde_rat {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&rat_str(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(de::Error::custom)
    }
}

/// Serde adapter: `Vec<BigRational>` <-> array of `"p/q"`.
pub mod serde_rat_vec {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        v: &[BigRational],
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(rat_str))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<BigRational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| parse_rat(s).map_err(de::Error::custom)).collect()
    }
}

/// Serde adapter: `BigInt` <-> decimal string.
pub mod serde_int {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&n.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        parse_int(&s).map_err(de::Error::custom)
    }
}

/// Serde adapter: `Vec<BigInt>` <-> array of decimal strings.
pub mod serde_int_vec {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|n| n.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<BigInt>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| parse_int(s).map_err(de::Error::custom)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["1/2", "-3/7", "0/1", "25/1"] {
            assert_eq!(rat_str(&parse_rat(s).unwrap()), s);
        }
        // canonicalization
        assert_eq!(rat_str(&parse_rat("2/4").unwrap()), "1/2");
        assert_eq!(rat_str(&parse_rat("1/-2").unwrap()), "-1/2");
        assert_eq!(rat_str(&parse_rat("7").unwrap()), "7/1");
    }

    #[test]
    fn rejects_zero_denominator() {
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x/2").is_err());
    }
}
