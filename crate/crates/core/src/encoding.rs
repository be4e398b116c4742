//! String encodings for exact numbers.
//!
//! Integers are written as decimal strings and rationals as `"p/q"` (or
//! `"p"` when the denominator is one) so that no consumer ever round-trips
//! a value through a float.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};
use std::str::FromStr;

use crate::error::ParseError;

pub fn parse_int(s: &str) -> Result<BigInt, ParseError> {
    BigInt::from_str(s.trim()).map_err(|_| ParseError::Integer(s.to_string()))
}

pub fn parse_rational(s: &str) -> Result<BigRational, ParseError> {
    let s = s.trim();
    let bad = || ParseError::Rational(s.to_string());
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(parse_int(s).map_err(|_| bad())?)),
        Some((p, q)) => {
            let p = parse_int(p).map_err(|_| bad())?;
            let q = parse_int(q).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
    }
}

pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Accepts either a JSON number or a decimal string.
#[derive(Deserialize)]
#[serde(untagged)]
enum IntRepr {
    Num(i64),
    Str(String),
}

/// Accepts a JSON integer or a `"p/q"` string.
#[derive(Deserialize)]
#[serde(untagged)]
enum RatRepr {
    Num(i64),
    Str(String),
}

fn int_from_repr<E: de::Error>(r: IntRepr) -> Result<BigInt, E> {
    match r {
        IntRepr::Num(n) => Ok(BigInt::from(n)),
        IntRepr::Str(s) => parse_int(&s).map_err(E::custom),
    }
}

fn rat_from_repr<E: de::Error>(r: RatRepr) -> Result<BigRational, E> {
    match r {
        RatRepr::Num(n) => Ok(BigRational::from_integer(BigInt::from(n))),
        RatRepr::Str(s) => parse_rational(&s).map_err(E::custom),
    }
}

/// Serde adapter for `BigInt` as a decimal string.
pub mod int {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        int_from_repr(IntRepr::deserialize(d)?)
    }
}

/// Serde adapter for `Vec<BigInt>`.
pub mod int_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let strs: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<IntRepr>::deserialize(d)?
            .into_iter()
            .map(int_from_repr)
            .collect()
    }
}

/// Serde adapter for `Vec<Vec<BigInt>>`.
pub mod int_rows {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
        let strs: Vec<Vec<String>> = v
            .iter()
            .map(|row| row.iter().map(|x| x.to_string()).collect())
            .collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigInt>>, D::Error> {
        Vec::<Vec<IntRepr>>::deserialize(d)?
            .into_iter()
            .map(|row| row.into_iter().map(int_from_repr).collect())
            .collect()
    }
}

/// Serde adapter for `BigRational`.
pub mod rational {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        rat_from_repr(RatRepr::deserialize(d)?)
    }
}

/// Serde adapter for `Vec<BigRational>`.
pub mod rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        let strs: Vec<String> = v.iter().map(format_rational).collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        Vec::<RatRepr>::deserialize(d)?
            .into_iter()
            .map(rat_from_repr)
            .collect()
    }
}

/// Serde adapter for `Option<BigRational>`.
pub mod opt_rational {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(q) => s.serialize_some(&format_rational(q)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigRational>, D::Error> {
        Option::<RatRepr>::deserialize(d)?
            .map(rat_from_repr)
            .transpose()
    }
}
