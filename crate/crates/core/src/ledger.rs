//! Index bookkeeping for finite extensions: Ostrowski's identity
//! `N = e·f·p^δ`, tower composition and the unramified criterion `r = 1`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::encoding;
use crate::error::LedgerError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtensionRecord {
    #[serde(rename = "N")]
    pub degree: u64,
    pub e: u64,
    pub f: u64,
    pub p: u64,
    pub delta: u64,
    #[serde(with = "encoding::opt_rational", skip_serializing_if = "Option::is_none")]
    pub d: Option<BigRational>,
    #[serde(with = "encoding::opt_rational", skip_serializing_if = "Option::is_none")]
    pub g: Option<BigRational>,
    #[serde(with = "encoding::opt_rational", skip_serializing_if = "Option::is_none")]
    pub r: Option<BigRational>,
}

#[derive(Deserialize)]
struct RecordRepr {
    #[serde(rename = "N")]
    degree: u64,
    e: u64,
    f: u64,
    p: u64,
    #[serde(default)]
    delta: Option<u64>,
    #[serde(default, with = "encoding::opt_rational")]
    d: Option<BigRational>,
    #[serde(default, with = "encoding::opt_rational")]
    g: Option<BigRational>,
    #[serde(default, with = "encoding::opt_rational")]
    r: Option<BigRational>,
}

impl<'de> Deserialize<'de> for ExtensionRecord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = RecordRepr::deserialize(d)?;
        ExtensionRecord::new(r.degree, r.e, r.f, r.p, r.delta, r.d, r.g, r.r).map_err(serde::de::Error::custom)
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut k = 2u64;
    while k.saturating_mul(k) <= p {
        if p.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

fn check_char(p: u64) -> Result<(), LedgerError> {
    if p == 0 || is_prime(p) {
        Ok(())
    } else {
        Err(LedgerError::InvalidCharacteristic(p))
    }
}

/// `δ` with `N = e·f·p^δ`.
pub fn ostrowski_defect(n: u64, e: u64, f: u64, p: u64) -> Result<u64, LedgerError> {
    check_char(p)?;
    if n == 0 || e == 0 || f == 0 {
        return Err(LedgerError::Inconsistent("degree, e and f must be positive".into()));
    }
    let ef = e.checked_mul(f).ok_or(LedgerError::Overflow)?;
    if !n.is_multiple_of(ef) {
        return Err(LedgerError::Inconsistent(format!("e·f = {ef} does not divide N = {n}")));
    }
    let mut rest = n / ef;
    if p == 0 {
        return if rest == 1 {
            Ok(0)
        } else {
            Err(LedgerError::Inconsistent(format!(
                "residue characteristic 0 forces N = e·f, but N/(e·f) = {rest}"
            )))
        };
    }
    let mut delta = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        delta += 1;
    }
    if rest != 1 {
        return Err(LedgerError::Inconsistent(format!(
            "N/(e·f) = {} is not a power of {p}",
            n / ef
        )));
    }
    Ok(delta)
}

impl ExtensionRecord {
    /// Checks Ostrowski's identity and the index relations; `delta` is
    /// derived when omitted and `r` is derived from `d/g` when omitted.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        degree: u64,
        e: u64,
        f: u64,
        p: u64,
        delta: Option<u64>,
        d: Option<BigRational>,
        g: Option<BigRational>,
        r: Option<BigRational>,
    ) -> Result<Self, LedgerError> {
        let derived = ostrowski_defect(degree, e, f, p)?;
        if let Some(dl) = delta {
            if dl != derived {
                return Err(LedgerError::Inconsistent(format!(
                    "declared defect {dl} but N = e·f·p^δ gives {derived}"
                )));
            }
        }
        for (name, v) in [("d", &d), ("g", &g), ("r", &r)] {
            if let Some(x) = v {
                if !x.is_positive() {
                    return Err(LedgerError::Inconsistent(format!("{name} must be positive")));
                }
            }
        }
        let r = match (&d, &g, r) {
            (Some(d), Some(g), Some(r)) => {
                if d / g != r {
                    return Err(LedgerError::Inconsistent(format!("r = {r} but d/g = {}", d / g)));
                }
                Some(r)
            }
            (Some(d), Some(g), None) => Some(d / g),
            (_, _, r) => r,
        };
        if let Some(r) = &r {
            if !r.is_integer() {
                return Err(LedgerError::Inconsistent(format!("r = {r} is not an integer")));
            }
        }
        Ok(ExtensionRecord {
            degree,
            e,
            f,
            p,
            delta: derived,
            d,
            g,
            r,
        })
    }

    /// The trivial extension of residue characteristic `p`.
    pub fn trivial(p: u64) -> Self {
        let one = Some(BigRational::one());
        ExtensionRecord {
            degree: 1,
            e: 1,
            f: 1,
            p,
            delta: 0,
            d: one.clone(),
            g: one.clone(),
            r: one,
        }
    }

    /// Checks `[K* : K^i] = r·[K* : K'^i]` for the two given degrees.
    pub fn check_inseparable_ratio(&self, over_base: u64, over_intermediate: u64) -> Result<(), LedgerError> {
        let r = self.r.as_ref().ok_or(LedgerError::MissingIndex)?;
        if over_intermediate == 0 {
            return Err(LedgerError::Inconsistent("degrees must be positive".into()));
        }
        let ratio = BigRational::new(BigInt::from(over_base), BigInt::from(over_intermediate));
        if ratio != *r {
            return Err(LedgerError::Inconsistent(format!("degree ratio {ratio} but r = {r}")));
        }
        Ok(())
    }
}

fn mul_opt(a: &Option<BigRational>, b: &Option<BigRational>) -> Option<BigRational> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a * b),
        _ => None,
    }
}

/// Record of the composite `K ⊂ K' ⊂ K''` from the records of the two steps.
pub fn compose_tower(lower: &ExtensionRecord, upper: &ExtensionRecord) -> Result<ExtensionRecord, LedgerError> {
    if lower.p != upper.p {
        return Err(LedgerError::CharMismatch(lower.p, upper.p));
    }
    let mul = |a: u64, b: u64| a.checked_mul(b).ok_or(LedgerError::Overflow);
    Ok(ExtensionRecord {
        degree: mul(lower.degree, upper.degree)?,
        e: mul(lower.e, upper.e)?,
        f: mul(lower.f, upper.f)?,
        p: lower.p,
        delta: lower.delta.checked_add(upper.delta).ok_or(LedgerError::Overflow)?,
        d: mul_opt(&lower.d, &upper.d),
        g: mul_opt(&lower.g, &upper.g),
        r: mul_opt(&lower.r, &upper.r),
    })
}

/// `true` iff `r = 1`.
pub fn unramified_criterion(rec: &ExtensionRecord) -> Result<bool, LedgerError> {
    rec.r.as_ref().map(|r| r.is_one()).ok_or(LedgerError::MissingIndex)
}
