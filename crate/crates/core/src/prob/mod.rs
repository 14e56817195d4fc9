//! Exact finite probability and the information measures built on it.
//!
//! Probabilities are [`Rational`]; entropies and mutual informations are `f64`
//! bits computed from them, with `0 · log 0 = 0`.

mod dist;
mod extended;
mod joint;

pub use dist::FiniteDist;
pub use extended::ExtendedReal;
pub use joint::JointDist;

use crate::Rational;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProbError {
    #[error("distribution has empty support")]
    EmptySupport,
    #[error("{labels} labels but {probs} probabilities")]
    LengthMismatch { labels: usize, probs: usize },
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("duplicate axis {0:?}")]
    DuplicateAxis(String),
    #[error("negative probability {0}")]
    NegativeProbability(Rational),
    #[error("probabilities sum to {0}, not 1")]
    NotNormalized(Rational),
    #[error("key has {got} labels, joint has {expected} axes")]
    KeyArity { expected: usize, got: usize },
    #[error("unknown axis {0:?}")]
    UnknownAxis(String),
    #[error("conditioning event {0} has probability zero")]
    ZeroProbabilityEvent(String),
    #[error("supports differ")]
    SupportMismatch,
    #[error("support size must be at least 2, got {0}")]
    SupportTooSmall(usize),
}

pub(crate) fn entropy_of_masses<'a>(masses: impl Iterator<Item = &'a Rational>) -> f64 {
    masses
        .filter(|p| p.is_positive())
        .map(|p| -p.to_f64() * p.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Shannon entropy in bits.
pub fn entropy(d: &FiniteDist) -> f64 {
    entropy_of_masses(d.probs().iter())
}

/// `I(A;B) = H(A) + H(B) - H(A,B)` where `A` and `B` are groups of axes.
pub fn mutual_information(j: &JointDist, a: &[&str], b: &[&str]) -> Result<f64, ProbError> {
    let ab: Vec<&str> = a.iter().chain(b.iter()).copied().collect();
    Ok(j.entropy_of(a)? + j.entropy_of(b)? - j.entropy_of(&ab)?)
}

/// `I(A;B|Z) = H(A,Z) + H(B,Z) - H(A,B,Z) - H(Z)`.
///
/// The three groups must be disjoint.
pub fn conditional_mutual_information(
    j: &JointDist,
    a: &[&str],
    b: &[&str],
    z: &[&str],
) -> Result<f64, ProbError> {
    let az: Vec<&str> = a.iter().chain(z).copied().collect();
    let bz: Vec<&str> = b.iter().chain(z).copied().collect();
    let abz: Vec<&str> = a.iter().chain(b).chain(z).copied().collect();
    // Duplicate detection happens in marginal(); an overlapping group shows up there.
    Ok(j.entropy_of(&az)? + j.entropy_of(&bz)? - j.entropy_of(&abz)? - j.entropy_of(z)?)
}

/// `-Σ p log q - H(p)`: the excess code length from coding `p` with a code built for `q`.
///
/// `+∞` when `q` misses mass that `p` has. Zero exactly when `p = q`.
pub fn cross_entropy_gap(p: &FiniteDist, q: &FiniteDist) -> Result<ExtendedReal, ProbError> {
    let mut p_labels: Vec<&str> = p.support().iter().map(String::as_str).collect();
    let mut q_labels: Vec<&str> = q.support().iter().map(String::as_str).collect();
    p_labels.sort_unstable();
    q_labels.sort_unstable();
    if p_labels != q_labels {
        return Err(ProbError::SupportMismatch);
    }
    if p.same_law(q) {
        return Ok(ExtendedReal::ZERO);
    }
    let mut gap = 0.0;
    for (label, pp) in p.iter() {
        if pp.is_zero() {
            continue;
        }
        let qq = q.prob(label);
        if qq.is_zero() {
            return Ok(ExtendedReal::PosInf);
        }
        gap += pp.to_f64() * (pp.log2() - qq.log2());
    }
    Ok(ExtendedReal::Finite(gap.max(0.0)))
}

/// Weak Fano bound on the error of any guess: `max(0, (H(X|Y) - 1) / log2 |X|)`.
pub fn fano_lower_bound(h_cond: f64, support_size: usize) -> Result<f64, ProbError> {
    if support_size < 2 {
        return Err(ProbError::SupportTooSmall(support_size));
    }
    Ok(((h_cond - 1.0) / (support_size as f64).log2()).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    const TOL: f64 = 1e-9;

    fn bits(v: &[(i64, i64)]) -> FiniteDist {
        FiniteDist::new(
            (0..v.len()).map(|i| i.to_string()).collect(),
            v.iter().map(|&(n, d)| ratio(n, d)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn entropy_examples() {
        assert!((entropy(&FiniteDist::uniform(["a", "b", "c", "d"])) - 2.0).abs() < TOL);
        assert_eq!(entropy(&FiniteDist::point(["a", "b"], 1)), 0.0);
        // -(1/4) log(1/4) - (3/4) log(3/4)
        let direct = 0.25 * 2.0 - 0.75 * (0.75f64).log2();
        assert!((entropy(&bits(&[(1, 4), (3, 4)])) - direct).abs() < TOL);
        assert!((direct - 0.811_278_124_459_132_8).abs() < 1e-12);
    }

    fn bsc(flip: Rational) -> JointDist {
        let stay = flip.complement();
        let half = ratio(1, 2);
        JointDist::new(
            vec!["X".into(), "Y".into()],
            vec![
                (vec!["0".into(), "0".into()], &half * &stay),
                (vec!["0".into(), "1".into()], &half * &flip),
                (vec!["1".into(), "0".into()], &half * &flip),
                (vec!["1".into(), "1".into()], &half * &stay),
            ],
        )
        .unwrap()
    }

    #[test]
    fn mutual_information_examples() {
        let prod = JointDist::product(&[
            ("X", &bits(&[(1, 3), (2, 3)])),
            ("Y", &bits(&[(1, 5), (4, 5)])),
        ])
        .unwrap();
        assert!(mutual_information(&prod, &["X"], &["Y"]).unwrap().abs() < TOL);
        let id = bsc(Rational::zero());
        assert!((mutual_information(&id, &["X"], &["Y"]).unwrap() - 1.0).abs() < TOL);
        let noisy = bsc(ratio(1, 4));
        let expected = 1.0 - (-(0.25f64) * 0.25f64.log2() - 0.75 * 0.75f64.log2());
        let mi = mutual_information(&noisy, &["X"], &["Y"]).unwrap();
        assert!((mi - expected).abs() < TOL);
        assert!((mi - 0.188_722).abs() < 1e-6);
        assert!(matches!(
            mutual_information(&noisy, &["X"], &["Q"]),
            Err(ProbError::UnknownAxis(_))
        ));
    }

    #[test]
    fn conditional_mi_examples() {
        let xy = bsc(ratio(1, 4));
        let z = bits(&[(1, 3), (2, 3)]);
        let xyz = JointDist::new(
            vec!["X".into(), "Y".into(), "Z".into()],
            xy.cells().flat_map(|(k, p)| {
                z.iter().map(move |(zl, zp)| {
                    let mut key = k.to_vec();
                    key.push(zl.to_string());
                    (key, p * zp)
                })
            }),
        )
        .unwrap();
        let cmi = conditional_mutual_information(&xyz, &["X"], &["Y"], &["Z"]).unwrap();
        let mi = mutual_information(&xyz, &["X"], &["Y"]).unwrap();
        assert!((cmi - mi).abs() < TOL);

        let same = JointDist::new(
            vec!["X".into(), "Y".into(), "Z".into()],
            ["0", "1"].iter().map(|v| (vec![v.to_string(); 3], ratio(1, 2))),
        )
        .unwrap();
        assert!(conditional_mutual_information(&same, &["X"], &["Y"], &["Z"]).unwrap().abs() < TOL);
        assert!(matches!(
            conditional_mutual_information(&same, &["X"], &["X"], &["Z"]),
            Err(ProbError::DuplicateAxis(_))
        ));
    }

    #[test]
    fn cross_entropy_gap_examples() {
        let p = bits(&[(1, 2), (1, 2)]);
        assert_eq!(cross_entropy_gap(&p, &p).unwrap(), ExtendedReal::ZERO);
        let gap = cross_entropy_gap(&bits(&[(1, 1), (0, 1)]), &p).unwrap();
        assert!((gap.to_f64() - 1.0).abs() < TOL);
        let q = bits(&[(1, 4), (3, 4)]);
        let direct = -0.5 * 0.25f64.log2() - 0.5 * 0.75f64.log2() - 1.0;
        let gap = cross_entropy_gap(&p, &q).unwrap().to_f64();
        assert!((gap - direct).abs() < TOL);
        assert!((gap - 0.207_518).abs() < 1e-6);
        assert!(cross_entropy_gap(&q, &bits(&[(1, 1), (0, 1)])).unwrap().is_infinite());
        assert_eq!(
            cross_entropy_gap(&p, &FiniteDist::uniform(["a", "b"])),
            Err(ProbError::SupportMismatch)
        );
    }

    #[test]
    fn fano_examples() {
        assert_eq!(fano_lower_bound(1.0, 2).unwrap(), 0.0);
        assert!((fano_lower_bound(3.0, 16).unwrap() - 0.5).abs() < TOL);
        assert_eq!(fano_lower_bound(0.5, 8).unwrap(), 0.0);
        assert_eq!(fano_lower_bound(2.0, 1), Err(ProbError::SupportTooSmall(1)));
    }
}
