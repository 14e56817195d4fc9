//! Exact rational numbers backed by arbitrary-precision integers.
//!
//! Every probability in the crate is a [`Rational`]. Logarithmic quantities are
//! derived from them as `f64` through [`Rational::log2`], which works from the
//! integer bit lengths and so never underflows for tiny probabilities.

use std::cmp::Ordering;
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

/// A rational number, always in lowest terms with a positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        let den = den.into();
        assert!(!den.is_zero(), "zero denominator");
        Rational(BigRational::new(num.into(), den))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Rational::one();
        for _ in 0..exp {
            acc *= self;
        }
        acc
    }

    /// `1 - self`.
    pub fn complement(&self) -> Self {
        Rational::one() - self
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self.0.to_f64() {
            Some(v) if v.is_finite() => v,
            _ => {
                // Fall back through the logarithm for values outside f64's direct range.
                let sign = if self.is_negative() { -1.0 } else { 1.0 };
                if self.is_zero() {
                    0.0
                } else {
                    sign * self.abs_log2().exp2()
                }
            }
        }
    }

    fn abs_log2(&self) -> f64 {
        biguint_log2(self.0.numer().magnitude()) - biguint_log2(self.0.denom().magnitude())
    }

    /// Base-2 logarithm of a strictly positive rational.
    ///
    /// Returns `-inf` for zero. Panics on negative input.
    pub fn log2(&self) -> f64 {
        assert!(!self.is_negative(), "log2 of negative rational {self}");
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        match self.0.to_f64() {
            Some(v) if v.is_normal() => v.log2(),
            _ => self.abs_log2(),
        }
    }

    /// Best-effort conversion from a decimal `f64`, exact for finite binary values.
    pub fn from_f64(v: f64) -> Option<Self> {
        BigRational::from_float(v).map(Rational)
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    pub fn into_big(self) -> BigRational {
        self.0
    }

    pub fn from_big(r: BigRational) -> Self {
        Rational(r)
    }

    /// Floor of the rational as a big integer.
    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }
}

fn biguint_log2(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 64 {
        return (n.to_u64().expect("fits") as f64).log2();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_u64().expect("fits");
    (top as f64).log2() + shift as f64
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Debug, thiserror::Error)]
#[error("cannot parse rational from {0:?}")]
pub struct ParseRationalError(String);

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `p/q`, integers, and finite decimals such as `0.25`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRationalError(s.to_string());
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| err())?;
            let d: BigInt = d.trim().parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            return Ok(Rational::new(n, d));
        }
        if let Some((int, frac)) = s.split_once('.') {
            let negative = int.starts_with('-');
            let int_part: BigInt = if int.is_empty() || int == "-" {
                BigInt::zero()
            } else {
                int.parse().map_err(|_| err())?
            };
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err());
            }
            let scale = BigInt::from(10u32).pow(frac.len() as u32);
            let frac_part: BigInt = frac.parse().map_err(|_| err())?;
            let mag = Rational::from_integer(int_part.abs()) + Rational::new(frac_part, scale);
            return Ok(if negative { -mag } else { mag });
        }
        let n: BigInt = s.parse().map_err(|_| err())?;
        Ok(Rational::from_integer(n))
    }
}

macro_rules! impl_binop {
    ($tr:ident, $method:ident, $assign_tr:ident, $assign_method:ident) => {
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
        impl<'a> $tr<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
        impl<'a, 'b> $tr<&'b Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'b Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $assign_tr<Rational> for Rational {
            fn $assign_method(&mut self, rhs: Rational) {
                self.0 = std::mem::take(&mut self.0).$method(rhs.0);
            }
        }
        impl<'a> $assign_tr<&'a Rational> for Rational {
            fn $assign_method(&mut self, rhs: &'a Rational) {
                self.0 = std::mem::take(&mut self.0).$method(&rhs.0);
            }
        }
    };
}

impl_binop!(Add, add, AddAssign, add_assign);
impl_binop!(Sub, sub, SubAssign, sub_assign);
impl_binop!(Mul, mul, MulAssign, mul_assign);

impl Div<Rational> for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero rational");
        Rational(self.0 / rhs.0)
    }
}

impl<'a> Div<&'a Rational> for Rational {
    type Output = Rational;
    fn div(self, rhs: &'a Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero rational");
        Rational(self.0 / &rhs.0)
    }
}

impl Div<&Rational> for &Rational {
    type Output = Rational;
    fn div(self, rhs: &Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero rational");
        Rational(&self.0 / &rhs.0)
    }
}

impl Div<Rational> for &Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero rational");
        Rational(&self.0 / rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl Product for Rational {
    fn product<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::one(), |acc, x| acc * x)
    }
}

macro_rules! impl_from_int {
    ($($t:ty),*) => {
        $(impl From<$t> for Rational {
            fn from(n: $t) -> Self {
                Rational::from_integer(BigInt::from(n))
            }
        })*
    };
}

impl_from_int!(i32, i64, u32, u64, usize);

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_integer(n)
    }
}

/// Shorthand for `Rational::new(num, den)` on machine integers.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(num, den)
}

// JSON: {"num": int, "den": int}. Integers outside i64 are written as decimal strings.

fn int_to_json(n: &BigInt) -> serde_json::Value {
    match n.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::from(n.to_string()),
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Rational", 2)?;
        st.serialize_field("num", &int_to_json(self.numer()))?;
        st.serialize_field("den", &int_to_json(self.denom()))?;
        st.end()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum IntRepr {
    Int(i64),
    Text(String),
}

impl IntRepr {
    fn into_bigint<E: de::Error>(self) -> Result<BigInt, E> {
        match self {
            IntRepr::Int(v) => Ok(BigInt::from(v)),
            IntRepr::Text(s) => s
                .parse()
                .map_err(|_| E::custom(format!("invalid integer {s:?}"))),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RationalRepr {
    Pair { num: IntRepr, den: IntRepr },
    Text(String),
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match RationalRepr::deserialize(deserializer)? {
            RationalRepr::Pair { num, den } => {
                let num = num.into_bigint::<D::Error>()?;
                let den = den.into_bigint::<D::Error>()?;
                if den.is_zero() {
                    return Err(de::Error::custom("rational with zero denominator"));
                }
                if den.sign() == Sign::Minus {
                    return Ok(Rational::new(-num, -den));
                }
                Ok(Rational::new(num, den))
            }
            RationalRepr::Text(s) => s.parse().map_err(de::Error::custom),
        }
    }
}

impl PartialEq<i64> for Rational {
    fn eq(&self, other: &i64) -> bool {
        self.0.denom().is_one() && self.0.numer() == &BigInt::from(*other)
    }
}

impl PartialOrd<i64> for Rational {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        Some(self.0.cmp(&BigRational::from_integer(BigInt::from(*other))))
    }
}
