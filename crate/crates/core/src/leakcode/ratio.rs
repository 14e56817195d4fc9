use num_bigint::{BigInt, BigUint};
use num_integer::binomial;
use rayon::prelude::*;
use serde::Serialize;

use super::LeakError;
use crate::Rational;

fn choose(n: u64, k: u64) -> BigUint {
    if k > n {
        BigUint::ZERO
    } else {
        binomial(BigUint::from(n), BigUint::from(k))
    }
}

fn to_rational(num: BigUint, den: BigUint) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Leakers in the first half when `2l` leakers are placed uniformly among `2n` players.
pub fn hypergeometric_pmf(n: u64, l: u64, k: u64) -> Rational {
    if k > 2 * l || k > n || n - k > 2 * n - 2 * l {
        return Rational::zero();
    }
    to_rational(choose(2 * l, k) * choose(2 * n - 2 * l, n - k), choose(2 * n, n))
}

/// Leakers among `n` players each leaking independently with probability `l/n`.
pub fn binomial_pmf(n: u64, l: u64, k: u64) -> Rational {
    if k > n {
        return Rational::zero();
    }
    let num = choose(n, k) * BigUint::from(l).pow(k as u32) * BigUint::from(n - l).pow((n - k) as u32);
    to_rational(num, BigUint::from(n).pow(n as u32))
}

/// `hypergeometric_pmf / binomial_pmf` at `k`, evaluated directly.
pub fn ratio_at(n: u64, l: u64, k: u64) -> Rational {
    hypergeometric_pmf(n, l, k) / binomial_pmf(n, l, k)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioCheck {
    pub n: u64,
    pub l: u64,
    pub max_ratio: Rational,
    pub argmax: u64,
    pub within_two: bool,
}

/// Maximum over `k` of the hypergeometric/binomial ratio, for `0 < l < n`.
///
/// Successive ratios satisfy
/// `r(k+1)/r(k) = (2l-k)(n-l) / ((n-2l+k+1) l)` on the hypergeometric support,
/// so the profile is checked exactly with integer comparisons and only the
/// peak is evaluated as a big rational.
pub fn ratio_bound_check(n: u64, l: u64) -> Result<RatioCheck, LeakError> {
    if l == 0 || l >= n {
        return Err(LeakError::Range(format!("need 0 < l < n, got l={l}, n={n}")));
    }
    let lo = (2 * l).saturating_sub(n);
    let hi = n.min(2 * l);
    // peak = last k whose step into k is > 1, i.e. first k whose step out of k is <= 1
    let mut argmax = hi;
    for k in lo..hi {
        let up = (2 * l - k) as u128 * (n - l) as u128;
        let down = (n + k + 1 - 2 * l) as u128 * l as u128;
        if up <= down {
            argmax = k;
            break;
        }
    }
    // once the steps drop to <= 1 they stay there: the numerator falls and the denominator grows in k
    let max_ratio = ratio_at(n, l, argmax);
    let within_two = max_ratio <= Rational::from_integer(2);
    Ok(RatioCheck {
        n,
        l,
        max_ratio,
        argmax,
        within_two,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioSweep {
    pub max_n: u64,
    pub pairs: u64,
    pub global_max: Rational,
    pub worst: (u64, u64),
    pub all_within_two: bool,
    pub argmax_always_l: bool,
}

/// [`ratio_bound_check`] for every `0 < l < n <= max_n`.
pub fn ratio_sweep(max_n: u64) -> RatioSweep {
    let checks: Vec<RatioCheck> = (2..=max_n)
        .into_par_iter()
        .flat_map_iter(|n| (1..n).map(move |l| ratio_bound_check(n, l).expect("0 < l < n")))
        .collect();
    let mut sweep = RatioSweep {
        max_n,
        pairs: checks.len() as u64,
        global_max: Rational::zero(),
        worst: (0, 0),
        all_within_two: true,
        argmax_always_l: true,
    };
    for c in checks {
        sweep.all_within_two &= c.within_two;
        sweep.argmax_always_l &= c.argmax == c.l;
        if c.max_ratio > sweep.global_max {
            sweep.global_max = c.max_ratio;
            sweep.worst = (c.n, c.l);
        }
    }
    sweep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio;

    #[test]
    fn pmfs_sum_to_one() {
        for n in 1..12 {
            for l in 1..n {
                let h: Rational = (0..=n).map(|k| hypergeometric_pmf(n, l, k)).sum();
                let b: Rational = (0..=n).map(|k| binomial_pmf(n, l, k)).sum();
                assert!(h.is_one() && b.is_one(), "n={n} l={l}");
            }
        }
    }

    #[test]
    fn small_case_by_hand() {
        assert_eq!(hypergeometric_pmf(2, 1, 1), ratio(2, 3));
        assert_eq!(binomial_pmf(2, 1, 1), ratio(1, 2));
        let c = ratio_bound_check(2, 1).unwrap();
        assert_eq!(c.max_ratio, ratio(4, 3));
        assert_eq!(c.argmax, 1);
    }

    #[test]
    fn n10_l5() {
        let c = ratio_bound_check(10, 5).unwrap();
        assert_eq!(c.argmax, 5);
        assert!(c.within_two);
        assert_eq!(c.max_ratio, ratio_at(10, 5, 5));
    }

    #[test]
    fn step_method_matches_brute_force() {
        for n in 2..=30 {
            for l in 1..n {
                let brute = (0..=n)
                    .map(|k| (ratio_at(n, l, k), k))
                    .fold((Rational::zero(), 0), |best, cur| if cur.0 > best.0 { cur } else { best });
                let c = ratio_bound_check(n, l).unwrap();
                assert_eq!((c.max_ratio.clone(), c.argmax), brute, "n={n} l={l}");
            }
        }
    }

    #[test]
    fn out_of_range() {
        assert!(ratio_bound_check(5, 0).is_err());
        assert!(ratio_bound_check(5, 5).is_err());
    }
}
