//! Exact rational arithmetic for edge lengths and point offsets.
//!
//! Values are always stored in lowest terms with a positive denominator.
//! The textual form is `"p/q"` or plain `"n"`; decimal notation is rejected
//! so inexact input cannot sneak in.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(Ratio<i64>);

impl Rational {
    pub fn new(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::invalid_input("rational with zero denominator"));
        }
        Ok(Rational(Ratio::new(numer, denom)))
    }

    pub fn integer(n: i64) -> Self {
        Rational(Ratio::from_integer(n))
    }

    pub fn zero() -> Self {
        Rational(Ratio::zero())
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Exact integer value of `self * n`, if it is an integer.
    pub fn scaled_integer(&self, n: i64) -> Option<i64> {
        let scaled = self.0 * Ratio::from_integer(n);
        if scaled.is_integer() {
            Some(scaled.to_integer())
        } else {
            None
        }
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        Rational(self.0 + rhs.0)
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        Rational(self.0 - rhs.0)
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        Rational(self.0 * rhs.0)
    }
}

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        Rational(self.0 / rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse_int = |t: &str| -> Result<i64> {
            t.parse::<i64>()
                .map_err(|_| Error::invalid_input(format!("bad rational component `{t}`")))
        };
        match s.split_once('/') {
            None => Ok(Rational::integer(parse_int(s)?)),
            Some((p, q)) => {
                let numer = parse_int(p)?;
                let denom = parse_int(q)?;
                if denom <= 0 {
                    return Err(Error::invalid_input(format!(
                        "rational `{s}` must have a positive denominator"
                    )));
                }
                Rational::new(numer, denom)
            }
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_terms_and_positive_denominator() {
        let r = Rational::new(4, -6).unwrap();
        assert_eq!(r.numer(), -2);
        assert_eq!(r.denom(), 3);
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["3/2", "-1/3", "7", "0", "-4"] {
            let r: Rational = s.parse().unwrap();
            assert_eq!(r.to_string(), s);
        }
        assert_eq!("2/4".parse::<Rational>().unwrap().to_string(), "1/2");
    }

    #[test]
    fn rejects_decimals_and_zero_denominator() {
        assert!("1.5".parse::<Rational>().is_err());
        assert!("1/0".parse::<Rational>().is_err());
        assert!("1/-2".parse::<Rational>().is_err());
        assert!("".parse::<Rational>().is_err());
    }

    #[test]
    fn exact_arithmetic() {
        let a: Rational = "1/3".parse().unwrap();
        let b: Rational = "1/6".parse().unwrap();
        assert_eq!((a + b).to_string(), "1/2");
        assert_eq!((a - b).to_string(), "1/6");
        assert_eq!((a * b).to_string(), "1/18");
        assert_eq!((a / b).to_string(), "2");
    }

    #[test]
    fn scaled_integer() {
        let r: Rational = "3/4".parse().unwrap();
        assert_eq!(r.scaled_integer(4), Some(3));
        assert_eq!(r.scaled_integer(8), Some(6));
        assert_eq!(r.scaled_integer(2), None);
    }
}
