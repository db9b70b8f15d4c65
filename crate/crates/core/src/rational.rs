//! Exact rational numbers.
//!
//! A thin newtype over `num_rational::Ratio<i128>` that always stays reduced and
//! panics on overflow instead of wrapping. Every angle, distance and scale
//! factor in this crate is a [`Rational`]; there is no floating point anywhere
//! in the math core.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(Ratio<i128>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RationalParseError {
    #[error("empty fraction")]
    Empty,
    #[error("decimal notation is not accepted, write `{0}` as a fraction p/q")]
    Decimal(String),
    #[error("invalid fraction `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

fn overflow() -> ! {
    panic!("rational arithmetic overflow")
}

impl Rational {
    pub const ZERO: Rational = Rational(Ratio::new_raw(0, 1));
    pub const ONE: Rational = Rational(Ratio::new_raw(1, 1));

    /// Reduced `numer / denom`. Panics if `denom == 0`.
    pub fn new(numer: i128, denom: i128) -> Self {
        assert!(denom != 0, "zero denominator");
        Rational(Ratio::new(numer, denom))
    }

    pub fn from_integer(n: i128) -> Self {
        Rational(Ratio::from_integer(n))
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    /// Always positive.
    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn floor(&self) -> i128 {
        Integer::div_floor(&self.numer(), &self.denom())
    }

    /// Integer value, if the number is one.
    pub fn to_integer(&self) -> Option<i128> {
        self.is_integer().then(|| self.numer())
    }
}

impl From<i128> for Rational {
    fn from(n: i128) -> Self {
        Rational::from_integer(n)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n.into())
    }
}

impl From<u32> for Rational {
    fn from(n: u32) -> Self {
        Rational::from_integer(n.into())
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        Rational(self.0.checked_add(&rhs.0).unwrap_or_else(|| overflow()))
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        Rational(self.0.checked_sub(&rhs.0).unwrap_or_else(|| overflow()))
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        Rational(self.0.checked_mul(&rhs.0).unwrap_or_else(|| overflow()))
    }
}

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero");
        Rational(self.0.checked_div(&rhs.0).unwrap_or_else(|| overflow()))
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        let n = self.numer().checked_neg().unwrap_or_else(|| overflow());
        Rational(Ratio::new_raw(n, self.denom()))
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::ZERO, |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::ZERO, |acc, x| acc + *x)
    }
}

impl PartialEq<i128> for Rational {
    fn eq(&self, other: &i128) -> bool {
        self.is_integer() && self.numer() == *other
    }
}

impl PartialOrd<i128> for Rational {
    fn partial_cmp(&self, other: &i128) -> Option<Ordering> {
        Some(self.cmp(&Rational::from_integer(*other)))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = RationalParseError;

    /// Accepts `p/q` or a bare integer `p`. Decimals are rejected.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(RationalParseError::Empty);
        }
        if s.contains('.') || s.contains('e') || s.contains('E') {
            return Err(RationalParseError::Decimal(s.to_string()));
        }
        let invalid = || RationalParseError::Invalid(s.to_string());
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: i128 = n.parse().map_err(|_| invalid())?;
        let d: i128 = d.parse().map_err(|_| invalid())?;
        if d == 0 {
            return Err(RationalParseError::ZeroDenominator(s.to_string()));
        }
        Ok(Rational::new(n, d))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Int(i64),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Repr::Int(n) => Ok(Rational::from(n)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn reduces_and_normalizes_sign() {
        let x = q(4, -6);
        assert_eq!(x.numer(), -2);
        assert_eq!(x.denom(), 3);
        assert_eq!(x.to_string(), "-2/3");
    }

    #[test]
    fn floor_of_negatives() {
        assert_eq!(q(-1, 2).floor(), -1);
        assert_eq!(q(-4, 2).floor(), -2);
        assert_eq!(q(7, 3).floor(), 2);
    }

    #[test]
    fn parse_forms() {
        assert_eq!("1/2".parse::<Rational>().unwrap(), q(1, 2));
        assert_eq!(" 3 ".parse::<Rational>().unwrap(), q(3, 1));
        assert_eq!("2/4".parse::<Rational>().unwrap(), q(1, 2));
        assert!(matches!(
            "0.5".parse::<Rational>(),
            Err(RationalParseError::Decimal(_))
        ));
        assert!(matches!(
            "1/0".parse::<Rational>(),
            Err(RationalParseError::ZeroDenominator(_))
        ));
        assert!("x".parse::<Rational>().is_err());
    }

    #[test]
    #[should_panic(expected = "overflow")]
    fn overflow_is_loud() {
        let big = Rational::from_integer(i128::MAX / 2 + 1);
        let _ = big + big;
    }

    #[test]
    fn serde_as_string() {
        let s = serde_json::to_string(&vec![q(1, 2), q(2, 1)]).unwrap();
        assert_eq!(s, r#"["1/2","2"]"#);
        let back: Vec<Rational> = serde_json::from_str(r#"["1/2", 2]"#).unwrap();
        assert_eq!(back, vec![q(1, 2), q(2, 1)]);
    }
}
