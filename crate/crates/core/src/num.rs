//! Numeric vocabulary shared by every module: extended naturals for region
//! indices, possibly-unbounded rational bounds, the generic probability
//! scalar, and exact text formats for integers and fractions.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{Num, One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::{Int, Rational};

/// A value in ℕ⁺ ∪ {∞}.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExtNat {
    Finite(Int),
    Infinite,
}

impl ExtNat {
    pub fn finite(&self) -> Option<&Int> {
        match self {
            ExtNat::Finite(v) => Some(v),
            ExtNat::Infinite => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtNat::Finite(_))
    }

    /// `1/self`, with `1/∞ = 0`.
    pub fn reciprocal(&self) -> Rational {
        match self {
            ExtNat::Finite(v) => Rational::new(BigInt::one(), BigInt::from(v.clone())),
            ExtNat::Infinite => Rational::zero(),
        }
    }
}

impl From<u64> for ExtNat {
    fn from(v: u64) -> Self {
        ExtNat::Finite(Int::from(v))
    }
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNat::Finite(v) => write!(f, "{v}"),
            ExtNat::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtNat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A positive rational or `+∞`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundValue {
    Finite(Rational),
    Unbounded,
}

impl BoundValue {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            BoundValue::Finite(v) => Some(v),
            BoundValue::Unbounded => None,
        }
    }

    /// `1/sum`, unbounded when the sum is zero.
    pub fn reciprocal_of(sum: &Rational) -> Self {
        if sum.is_zero() {
            BoundValue::Unbounded
        } else {
            BoundValue::Finite(sum.recip())
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            BoundValue::Finite(v) => ToPrimitive::to_f64(v).unwrap_or(f64::INFINITY),
            BoundValue::Unbounded => f64::INFINITY,
        }
    }
}

impl Ord for BoundValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (BoundValue::Finite(a), BoundValue::Finite(b)) => a.cmp(b),
            (BoundValue::Finite(_), BoundValue::Unbounded) => Ordering::Less,
            (BoundValue::Unbounded, BoundValue::Finite(_)) => Ordering::Greater,
            (BoundValue::Unbounded, BoundValue::Unbounded) => Ordering::Equal,
        }
    }
}

impl PartialOrd for BoundValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundValue::Finite(v) => f.write_str(&format_fraction(v)),
            BoundValue::Unbounded => f.write_str("unbounded"),
        }
    }
}

impl Serialize for BoundValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Scalar type for probabilities: floating point for speed, [`Rational`] for
/// exact identities.
pub trait Probability: Num + Clone + PartialOrd + fmt::Debug {
    fn from_rational(r: &Rational) -> Self;
    fn to_f64(&self) -> f64;
}

impl Probability for f64 {
    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Probability for f32 {
    fn from_rational(r: &Rational) -> Self {
        r.to_f32().unwrap_or(f32::NAN)
    }
    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }
}

impl Probability for Rational {
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

pub fn int_to_rational(v: &Int) -> Rational {
    Rational::from_integer(BigInt::from(v.clone()))
}

/// Always `num/den` in lowest terms, `11/1` for integers.
pub fn format_fraction(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Accepts `a/b`, a decimal such as `0.01`, or an integer. Negative values are rejected.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || Error::InvalidArgument(format!("not a non-negative rational: {text:?}"));
    let digits = |s: &str| -> Result<BigInt> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        BigInt::from_str_radix(s, 10).map_err(|_| bad())
    };
    let value = if let Some((n, d)) = t.split_once('/') {
        let den = digits(d.trim())?;
        if den.is_zero() {
            return Err(bad());
        }
        Rational::new(digits(n.trim())?, den)
    } else if let Some((whole, frac)) = t.split_once('.') {
        let whole = if whole.is_empty() { "0" } else { whole };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_v = if frac.is_empty() { BigInt::zero() } else { digits(frac)? };
        Rational::new(digits(whole)? * &scale + frac_v, scale)
    } else {
        Rational::from_integer(digits(t)?)
    };
    if value.is_negative() {
        return Err(bad());
    }
    Ok(value)
}

pub(crate) fn ser_int<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

pub(crate) fn ser_ratio<S: Serializer>(v: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_fraction(v))
}

pub(crate) fn ser_opt_ratio<S: Serializer>(
    v: &Option<Rational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(r) => s.serialize_str(&format_fraction(r)),
        None => s.serialize_none(),
    }
}
