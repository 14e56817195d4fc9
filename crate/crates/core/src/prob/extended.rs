use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

/// A quantity in bits that may be `+∞`.
///
/// Infinity only arises from `-log(0)`, i.e. a posterior that is certain.
/// Serialized as a JSON number, or the string `"+inf"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    PosInf,
}

impl Serialize for ExtendedReal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtendedReal::Finite(v) => s.serialize_f64(*v),
            ExtendedReal::PosInf => s.serialize_str("+inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedReal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(ExtendedReal::Finite(v)),
            Repr::Text(t) if t == "+inf" => Ok(ExtendedReal::PosInf),
            Repr::Text(t) => Err(serde::de::Error::custom(format!("expected number or \"+inf\", got {t:?}"))),
        }
    }
}

impl ExtendedReal {
    pub const ZERO: ExtendedReal = ExtendedReal::Finite(0.0);

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedReal::PosInf)
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(*v),
            ExtendedReal::PosInf => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }

    /// Surprisal `-log2(p)` of a probability.
    pub fn surprisal(p: &crate::Rational) -> ExtendedReal {
        if p.is_zero() {
            ExtendedReal::PosInf
        } else {
            ExtendedReal::Finite(-p.log2())
        }
    }

    /// Multiply by a non-negative weight. `0 · ∞` is never formed: callers skip
    /// zero-mass terms before weighting.
    pub fn scale(self, w: f64) -> ExtendedReal {
        match self {
            ExtendedReal::Finite(v) => ExtendedReal::Finite(v * w),
            ExtendedReal::PosInf => ExtendedReal::PosInf,
        }
    }
}

impl Add for ExtendedReal {
    type Output = ExtendedReal;
    fn add(self, rhs: ExtendedReal) -> ExtendedReal {
        match (self, rhs) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => ExtendedReal::Finite(a + b),
            _ => ExtendedReal::PosInf,
        }
    }
}

impl Sub<f64> for ExtendedReal {
    type Output = ExtendedReal;
    fn sub(self, rhs: f64) -> ExtendedReal {
        match self {
            ExtendedReal::Finite(a) => ExtendedReal::Finite(a - rhs),
            ExtendedReal::PosInf => ExtendedReal::PosInf,
        }
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => a.partial_cmp(b),
            (ExtendedReal::PosInf, ExtendedReal::PosInf) => Some(Ordering::Equal),
            (ExtendedReal::PosInf, _) => Some(Ordering::Greater),
            (_, ExtendedReal::PosInf) => Some(Ordering::Less),
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::PosInf => write!(f, "+inf"),
        }
    }
}

impl From<f64> for ExtendedReal {
    fn from(v: f64) -> Self {
        if v == f64::INFINITY {
            ExtendedReal::PosInf
        } else {
            ExtendedReal::Finite(v)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn surprisal_and_infinity() {
        assert_eq!(ExtendedReal::surprisal(&ratio(1, 4)), ExtendedReal::Finite(2.0));
        assert!(ExtendedReal::surprisal(&ratio(0, 1)).is_infinite());
        assert!(ExtendedReal::PosInf > ExtendedReal::Finite(1e300));
        assert_eq!(
            ExtendedReal::Finite(1.0) + ExtendedReal::PosInf,
            ExtendedReal::PosInf
        );
    }

    #[test]
    fn json_form() {
        assert_eq!(serde_json::to_string(&ExtendedReal::PosInf).unwrap(), "\"+inf\"");
        assert_eq!(serde_json::to_string(&ExtendedReal::Finite(1.5)).unwrap(), "1.5");
        let back: ExtendedReal = serde_json::from_str("\"+inf\"").unwrap();
        assert!(back.is_infinite());
    }
}
