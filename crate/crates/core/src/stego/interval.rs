use std::fmt;

use serde::{Deserialize, Serialize};

use super::StegoError;
use crate::{FiniteDist, Rational};

/// Half-open `[lo, hi)` inside `[0, 1)`, never empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self, StegoError> {
        if lo.is_negative() || lo >= hi || hi > Rational::one() {
            return Err(StegoError::Invalid(format!("bad interval [{lo}, {hi})")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn unit() -> Self {
        Interval {
            lo: Rational::zero(),
            hi: Rational::one(),
        }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn len(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn is_unit(&self) -> bool {
        self.lo.is_zero() && self.hi.is_one()
    }

    pub fn contains(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.clone().max(other.lo.clone());
        let hi = self.hi.clone().min(other.hi.clone());
        (lo < hi).then_some(Interval { lo, hi })
    }

    /// Length of the overlap, zero when disjoint.
    pub fn overlap(&self, other: &Interval) -> Rational {
        self.intersect(other).map_or_else(Rational::zero, |i| i.len())
    }

    /// Splits `self` into consecutive pieces with lengths proportional to
    /// `law`, in support order; zero-probability labels get no piece.
    pub fn split(&self, law: &FiniteDist) -> Vec<(String, Interval)> {
        let width = self.len();
        let mut below = Rational::zero();
        let mut out = Vec::with_capacity(law.len());
        for (label, p) in law.iter() {
            let lo = &self.lo + &width * &below;
            below += p;
            let hi = &self.lo + &width * &below;
            if p.is_positive() {
                out.push((label.to_string(), Interval { lo, hi }));
            }
        }
        out
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.lo, self.hi)
    }
}

/// `a ↦ [Pr(A < a | L = 0), Pr(A ≤ a | L = 0))` for the speaker's non-leaking law.
pub fn f_partition(innocent_law: &FiniteDist) -> Vec<(String, Interval)> {
    Interval::unit().split(innocent_law)
}

/// Subdivision of the current interval by the innocent message law.
pub fn g_partition(current: &Interval, innocent_law: &FiniteDist) -> Vec<(String, Interval)> {
    current.split(innocent_law)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio;

    fn law(ps: &[(i64, i64)]) -> FiniteDist {
        FiniteDist::new(
            (1..=ps.len()).map(|i| format!("m{i}")).collect(),
            ps.iter().map(|&(a, b)| ratio(a, b)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn f_of_two_fifths() {
        let f = f_partition(&law(&[(2, 5), (3, 5)]));
        assert_eq!(f[0].1, Interval::new(ratio(0, 1), ratio(2, 5)).unwrap());
        assert_eq!(f[1].1, Interval::new(ratio(2, 5), ratio(1, 1)).unwrap());
    }

    #[test]
    fn quarters_and_points() {
        let f = f_partition(&law(&[(1, 4), (1, 4), (1, 4), (1, 4)]));
        for (k, (_, i)) in f.iter().enumerate() {
            assert_eq!(*i, Interval::new(ratio(k as i64, 4), ratio(k as i64 + 1, 4)).unwrap());
        }
        let f = f_partition(&law(&[(0, 1), (1, 1)]));
        assert_eq!(f, vec![("m2".to_string(), Interval::unit())]);
    }

    #[test]
    fn g_nested() {
        let l = law(&[(3, 5), (2, 5)]);
        let g = g_partition(&Interval::unit(), &l);
        assert_eq!(g[0].1, Interval::new(ratio(0, 1), ratio(3, 5)).unwrap());
        let g2 = g_partition(&g[0].1, &l);
        assert_eq!(g2[0].1, Interval::new(ratio(0, 1), ratio(9, 25)).unwrap());
        let single = g_partition(&g[1].1, &law(&[(1, 1)]));
        assert_eq!(single, vec![("m1".to_string(), g[1].1.clone())]);
    }

    #[test]
    fn bad_intervals() {
        assert!(Interval::new(ratio(1, 2), ratio(1, 2)).is_err());
        assert!(Interval::new(ratio(-1, 2), ratio(1, 2)).is_err());
        assert!(Interval::new(ratio(1, 2), ratio(3, 2)).is_err());
    }
}
