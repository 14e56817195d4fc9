use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::ProbError;
use crate::Rational;

/// An exact distribution over a finite, ordered set of labels.
///
/// The support order is fixed at construction and is the canonical order used
/// wherever labels need to be laid out (interval partitions, bit trees).
/// Labels with probability zero may be part of the support.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawDist")]
pub struct FiniteDist {
    support: Vec<String>,
    probs: Vec<Rational>,
}

#[derive(Deserialize)]
struct RawDist {
    support: Vec<String>,
    probs: Vec<Rational>,
}

impl TryFrom<RawDist> for FiniteDist {
    type Error = ProbError;
    fn try_from(raw: RawDist) -> Result<Self, Self::Error> {
        FiniteDist::new(raw.support, raw.probs)
    }
}

impl FiniteDist {
    pub fn new(support: Vec<String>, probs: Vec<Rational>) -> Result<Self, ProbError> {
        if support.is_empty() {
            return Err(ProbError::EmptySupport);
        }
        if support.len() != probs.len() {
            return Err(ProbError::LengthMismatch {
                labels: support.len(),
                probs: probs.len(),
            });
        }
        let mut seen = HashSet::new();
        for label in &support {
            if !seen.insert(label.as_str()) {
                return Err(ProbError::DuplicateLabel(label.clone()));
            }
        }
        if let Some(p) = probs.iter().find(|p| p.is_negative()) {
            return Err(ProbError::NegativeProbability(p.clone()));
        }
        let total: Rational = probs.iter().sum();
        if !total.is_one() {
            return Err(ProbError::NotNormalized(total));
        }
        Ok(FiniteDist { support, probs })
    }

    /// Build from labels and (possibly unnormalized) non-negative weights.
    pub fn from_weights(support: Vec<String>, weights: Vec<Rational>) -> Result<Self, ProbError> {
        let total: Rational = weights.iter().sum();
        if !total.is_positive() {
            return Err(ProbError::NotNormalized(total));
        }
        let probs = weights.into_iter().map(|w| w / &total).collect();
        FiniteDist::new(support, probs)
    }

    pub fn uniform<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Self {
        let support: Vec<String> = labels.into_iter().map(Into::into).collect();
        let n = support.len() as i64;
        assert!(n > 0, "uniform over empty support");
        let probs = vec![Rational::new(1, n); support.len()];
        FiniteDist { support, probs }
    }

    /// Point mass on `support[index]`.
    pub fn point<S: Into<String>>(labels: impl IntoIterator<Item = S>, index: usize) -> Self {
        let support: Vec<String> = labels.into_iter().map(Into::into).collect();
        assert!(index < support.len(), "point mass index out of range");
        let probs = (0..support.len())
            .map(|i| if i == index { Rational::one() } else { Rational::zero() })
            .collect();
        FiniteDist { support, probs }
    }

    pub fn support(&self) -> &[String] {
        &self.support
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.support.iter().position(|l| l == label)
    }

    /// Probability of `label`; zero for labels outside the support.
    pub fn prob(&self, label: &str) -> Rational {
        self.index_of(label)
            .map(|i| self.probs[i].clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Rational)> {
        self.support.iter().map(String::as_str).zip(self.probs.iter())
    }

    /// Labels with positive probability, in canonical order.
    pub fn positive_support(&self) -> impl Iterator<Item = &str> {
        self.iter().filter(|(_, p)| p.is_positive()).map(|(l, _)| l)
    }

    pub fn is_point_mass(&self) -> bool {
        self.probs.iter().filter(|p| p.is_positive()).count() == 1
    }

    /// Largest single-label probability.
    pub fn max_prob(&self) -> Rational {
        self.probs
            .iter()
            .cloned()
            .fold(Rational::zero(), Rational::max)
    }

    pub fn entropy(&self) -> f64 {
        super::entropy(self)
    }

    /// Same labels, same probabilities, regardless of support order.
    pub fn same_law(&self, other: &FiniteDist) -> bool {
        let mine: BTreeMap<&str, &Rational> =
            self.iter().filter(|(_, p)| p.is_positive()).collect();
        let theirs: BTreeMap<&str, &Rational> =
            other.iter().filter(|(_, p)| p.is_positive()).collect();
        mine == theirs
    }
}
