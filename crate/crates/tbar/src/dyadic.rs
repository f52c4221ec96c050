//! Exact arithmetic over dyadic rationals m / 2^k.
//!
//! Every distance, product, and homotopy parameter in this crate is a dyadic
//! rational, so all comparisons are exact and no tolerances appear anywhere.
//! Values are kept in canonical form: the mantissa is odd whenever the
//! exponent is positive, and zero forces exponent zero. Structural equality
//! therefore coincides with numerical equality.
//!
//! A decimal renderer is provided for reports; it is never used in
//! comparisons.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One as _, Pow, Signed, Zero as _};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Exact dyadic rational `mantissa / 2^exponent`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: u32,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid dyadic literal {input:?}: {reason}")]
pub struct ParseDyadicError {
    pub input: String,
    pub reason: String,
}

impl From<ParseDyadicError> for crate::error::Error {
    fn from(e: ParseDyadicError) -> Self {
        crate::error::Error::Parse(e.to_string())
    }
}

impl Dyadic {
    /// Builds `mantissa / 2^exponent` in canonical form.
    pub fn new(mantissa: impl Into<BigInt>, exponent: u32) -> Self {
        let mut m: BigInt = mantissa.into();
        let mut k = exponent;
        if m.is_zero() {
            return Dyadic {
                mantissa: m,
                exponent: 0,
            };
        }
        while k > 0 && (&m % 2i32).is_zero() {
            m /= 2i32;
            k -= 1;
        }
        Dyadic {
            mantissa: m,
            exponent: k,
        }
    }

    pub fn zero() -> Self {
        Dyadic::new(0, 0)
    }

    pub fn one() -> Self {
        Dyadic::new(1, 0)
    }

    /// Exact power of two, `2^e`; negative `e` gives `1 / 2^|e|`.
    pub fn exp2(e: i32) -> Self {
        if e >= 0 {
            Dyadic::new(BigInt::one() << e as u32, 0)
        } else {
            Dyadic::new(1, e.unsigned_abs())
        }
    }

    /// `self * 2^e`, exact.
    pub fn mul_exp2(&self, e: i32) -> Self {
        if self.mantissa.is_zero() {
            return Dyadic::zero();
        }
        if e >= 0 {
            Dyadic::new(&self.mantissa << e as u32, self.exponent)
        } else {
            Dyadic::new(self.mantissa.clone(), self.exponent + e.unsigned_abs())
        }
    }

    /// `self / 2`, exact.
    pub fn half(&self) -> Self {
        self.mul_exp2(-1)
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            mantissa: self.mantissa.abs(),
            exponent: self.exponent,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa.is_positive()
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    /// Exact decimal expansion (always finite for dyadics), e.g. `0.40625`.
    ///
    /// Report-only: comparisons always go through exact canonical forms.
    pub fn to_decimal_string(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let sign = if self.is_negative() { "-" } else { "" };
        // m / 2^k = m * 5^k / 10^k
        let scaled = self.mantissa.abs() * BigInt::from(5).pow(self.exponent);
        let mut digits = scaled.to_string();
        let k = self.exponent as usize;
        if digits.len() <= k {
            digits = format!("{}{}", "0".repeat(k + 1 - digits.len()), digits);
        }
        if k == 0 {
            return format!("{sign}{digits}");
        }
        let split = digits.len() - k;
        let (int_part, frac_part) = digits.split_at(split);
        let frac_part = frac_part.trim_end_matches('0');
        if frac_part.is_empty() {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac_part}")
        }
    }
}

fn add_refs(a: &Dyadic, b: &Dyadic) -> Dyadic {
    let k = a.exponent.max(b.exponent);
    let ma = &a.mantissa << (k - a.exponent);
    let mb = &b.mantissa << (k - b.exponent);
    Dyadic::new(ma + mb, k)
}

fn sub_refs(a: &Dyadic, b: &Dyadic) -> Dyadic {
    let k = a.exponent.max(b.exponent);
    let ma = &a.mantissa << (k - a.exponent);
    let mb = &b.mantissa << (k - b.exponent);
    Dyadic::new(ma - mb, k)
}

fn mul_refs(a: &Dyadic, b: &Dyadic) -> Dyadic {
    Dyadic::new(&a.mantissa * &b.mantissa, a.exponent + b.exponent)
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $f:ident) => {
        impl $trait for &Dyadic {
            type Output = Dyadic;
            fn $method(self, rhs: &Dyadic) -> Dyadic {
                $f(self, rhs)
            }
        }
        impl $trait for Dyadic {
            type Output = Dyadic;
            fn $method(self, rhs: Dyadic) -> Dyadic {
                $f(&self, &rhs)
            }
        }
        impl $trait<&Dyadic> for Dyadic {
            type Output = Dyadic;
            fn $method(self, rhs: &Dyadic) -> Dyadic {
                $f(&self, rhs)
            }
        }
        impl $trait<Dyadic> for &Dyadic {
            type Output = Dyadic;
            fn $method(self, rhs: Dyadic) -> Dyadic {
                $f(self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_refs);
forward_binop!(Sub, sub, sub_refs);
forward_binop!(Mul, mul, mul_refs);

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            mantissa: -&self.mantissa,
            exponent: self.exponent,
        }
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            mantissa: -self.mantissa,
            exponent: self.exponent,
        }
    }
}

impl Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Dyadic> for Dyadic {
    fn sum<I: Iterator<Item = &'a Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::zero(), |acc, x| acc + x)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let k = self.exponent.max(other.exponent);
        let ma = &self.mantissa << (k - self.exponent);
        let mb = &other.mantissa << (k - other.exponent);
        ma.cmp(&mb)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl num_traits::Zero for Dyadic {
    fn zero() -> Self {
        Dyadic::zero()
    }
    fn is_zero(&self) -> bool {
        Dyadic::is_zero(self)
    }
}

impl num_traits::One for Dyadic {
    fn one() -> Self {
        Dyadic::one()
    }
}

impl From<i64> for Dyadic {
    fn from(v: i64) -> Self {
        Dyadic::new(v, 0)
    }
}

impl From<i32> for Dyadic {
    fn from(v: i32) -> Self {
        Dyadic::new(v, 0)
    }
}

impl From<u32> for Dyadic {
    fn from(v: u32) -> Self {
        Dyadic::new(v, 0)
    }
}

impl From<BigInt> for Dyadic {
    fn from(v: BigInt) -> Self {
        Dyadic::new(v, 0)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.mantissa, self.exponent)
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dyadic({self})")
    }
}

impl FromStr for Dyadic {
    type Err = ParseDyadicError;

    /// Accepts `"m/2^k"` with `m` in decimal, and bare integers `"m"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| ParseDyadicError {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let t = s.trim();
        if t.is_empty() {
            return Err(err("empty string"));
        }
        match t.split_once('/') {
            None => {
                let m: BigInt = t.parse().map_err(|_| err("mantissa is not an integer"))?;
                Ok(Dyadic::new(m, 0))
            }
            Some((m_str, denom)) => {
                let m: BigInt = m_str
                    .trim()
                    .parse()
                    .map_err(|_| err("mantissa is not an integer"))?;
                let k_str = denom
                    .trim()
                    .strip_prefix("2^")
                    .ok_or_else(|| err("denominator must have the form 2^k"))?;
                let k: u32 = k_str
                    .parse()
                    .map_err(|_| err("exponent is not a non-negative integer"))?;
                Ok(Dyadic::new(m, k))
            }
        }
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}
