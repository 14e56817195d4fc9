use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{FiniteDist, ProbError};
use crate::Rational;

/// An exact joint distribution over named axes.
///
/// Only positive-probability cells are stored. Keys are label tuples aligned
/// with `axes`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointDist {
    axes: Vec<String>,
    table: BTreeMap<Vec<String>, Rational>,
}

#[derive(Serialize, Deserialize)]
struct RawCell {
    key: Vec<String>,
    p: Rational,
}

#[derive(Serialize, Deserialize)]
struct RawJoint {
    axes: Vec<String>,
    table: Vec<RawCell>,
}

impl Serialize for JointDist {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RawJoint {
            axes: self.axes.clone(),
            table: self
                .table
                .iter()
                .map(|(k, p)| RawCell {
                    key: k.clone(),
                    p: p.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for JointDist {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawJoint::deserialize(d)?;
        JointDist::new(raw.axes, raw.table.into_iter().map(|c| (c.key, c.p)))
            .map_err(serde::de::Error::custom)
    }
}

impl JointDist {
    /// Builds a joint from cells. Repeated keys accumulate.
    pub fn new(
        axes: Vec<String>,
        cells: impl IntoIterator<Item = (Vec<String>, Rational)>,
    ) -> Result<Self, ProbError> {
        let j = Self::accumulate(axes, cells)?;
        let total: Rational = j.table.values().sum();
        if !total.is_one() {
            return Err(ProbError::NotNormalized(total));
        }
        Ok(j)
    }

    /// Like [`JointDist::new`] but rescales the cells to sum to one.
    pub fn from_weights(
        axes: Vec<String>,
        cells: impl IntoIterator<Item = (Vec<String>, Rational)>,
    ) -> Result<Self, ProbError> {
        let mut j = Self::accumulate(axes, cells)?;
        let total: Rational = j.table.values().sum();
        if !total.is_positive() {
            return Err(ProbError::NotNormalized(total));
        }
        for p in j.table.values_mut() {
            *p = &*p / &total;
        }
        Ok(j)
    }

    fn accumulate(
        axes: Vec<String>,
        cells: impl IntoIterator<Item = (Vec<String>, Rational)>,
    ) -> Result<Self, ProbError> {
        for (i, a) in axes.iter().enumerate() {
            if axes[..i].contains(a) {
                return Err(ProbError::DuplicateAxis(a.clone()));
            }
        }
        let mut table: BTreeMap<Vec<String>, Rational> = BTreeMap::new();
        for (key, p) in cells {
            if key.len() != axes.len() {
                return Err(ProbError::KeyArity {
                    expected: axes.len(),
                    got: key.len(),
                });
            }
            if p.is_negative() {
                return Err(ProbError::NegativeProbability(p));
            }
            if p.is_zero() {
                continue;
            }
            *table.entry(key).or_insert_with(Rational::zero) += p;
        }
        Ok(JointDist { axes, table })
    }

    /// Independent product of named one-dimensional laws.
    pub fn product(factors: &[(&str, &FiniteDist)]) -> Result<Self, ProbError> {
        let axes: Vec<String> = factors.iter().map(|(n, _)| n.to_string()).collect();
        let mut cells: Vec<(Vec<String>, Rational)> = vec![(Vec::new(), Rational::one())];
        for (_, d) in factors {
            let mut next = Vec::with_capacity(cells.len() * d.len());
            for (key, p) in &cells {
                for (label, q) in d.iter() {
                    if q.is_zero() {
                        continue;
                    }
                    let mut k = key.clone();
                    k.push(label.to_string());
                    next.push((k, p * q));
                }
            }
            cells = next;
        }
        JointDist::new(axes, cells)
    }

    pub fn axes(&self) -> &[String] {
        &self.axes
    }

    pub fn cells(&self) -> impl Iterator<Item = (&[String], &Rational)> {
        self.table.iter().map(|(k, p)| (k.as_slice(), p))
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn axis_index(&self, name: &str) -> Result<usize, ProbError> {
        self.axes
            .iter()
            .position(|a| a == name)
            .ok_or_else(|| ProbError::UnknownAxis(name.to_string()))
    }

    fn indices(&self, names: &[&str]) -> Result<Vec<usize>, ProbError> {
        let idx = names
            .iter()
            .map(|n| self.axis_index(n))
            .collect::<Result<Vec<_>, _>>()?;
        for (i, a) in idx.iter().enumerate() {
            if idx[..i].contains(a) {
                return Err(ProbError::DuplicateAxis(self.axes[*a].clone()));
            }
        }
        Ok(idx)
    }

    /// Marginal over the named axes, in the given order.
    pub fn marginal(&self, names: &[&str]) -> Result<JointDist, ProbError> {
        let idx = self.indices(names)?;
        let mut table: BTreeMap<Vec<String>, Rational> = BTreeMap::new();
        for (key, p) in &self.table {
            let sub: Vec<String> = idx.iter().map(|&i| key[i].clone()).collect();
            *table.entry(sub).or_insert_with(Rational::zero) += p;
        }
        Ok(JointDist {
            axes: names.iter().map(|s| s.to_string()).collect(),
            table,
        })
    }

    /// Probability of the event `axis_i = value_i` for all listed pairs.
    pub fn prob_of(&self, event: &[(&str, &str)]) -> Result<Rational, ProbError> {
        let idx: Vec<(usize, &str)> = event
            .iter()
            .map(|(a, v)| self.axis_index(a).map(|i| (i, *v)))
            .collect::<Result<_, _>>()?;
        Ok(self
            .table
            .iter()
            .filter(|(k, _)| idx.iter().all(|(i, v)| k[*i] == *v))
            .map(|(_, p)| p)
            .sum())
    }

    /// Conditional joint given an event of positive probability. All axes are kept.
    pub fn condition(&self, event: &[(&str, &str)]) -> Result<JointDist, ProbError> {
        let idx: Vec<(usize, &str)> = event
            .iter()
            .map(|(a, v)| self.axis_index(a).map(|i| (i, *v)))
            .collect::<Result<_, _>>()?;
        let kept: Vec<(&Vec<String>, &Rational)> = self
            .table
            .iter()
            .filter(|(k, _)| idx.iter().all(|(i, v)| k[*i] == *v))
            .collect();
        let total: Rational = kept.iter().map(|(_, p)| *p).sum();
        if total.is_zero() {
            return Err(ProbError::ZeroProbabilityEvent(format!("{event:?}")));
        }
        Ok(JointDist {
            axes: self.axes.clone(),
            table: kept
                .into_iter()
                .map(|(k, p)| (k.clone(), p / &total))
                .collect(),
        })
    }

    /// One-dimensional law of an axis, support in sorted label order.
    pub fn law(&self, name: &str) -> Result<FiniteDist, ProbError> {
        let m = self.marginal(&[name])?;
        let (support, probs): (Vec<String>, Vec<Rational>) = m
            .table
            .into_iter()
            .map(|(mut k, p)| (k.pop().expect("one axis"), p))
            .unzip();
        FiniteDist::new(support, probs)
    }

    /// Distinct value tuples of the named axes that carry positive mass, with their mass.
    pub fn values_of(&self, names: &[&str]) -> Result<Vec<(Vec<String>, Rational)>, ProbError> {
        Ok(self.marginal(names)?.table.into_iter().collect())
    }

    /// Entropy in bits of the marginal over the named axes.
    pub fn entropy_of(&self, names: &[&str]) -> Result<f64, ProbError> {
        let m = self.marginal(names)?;
        Ok(super::entropy_of_masses(m.table.values()))
    }

    /// Maps every key through `f`, merging cells that collide.
    pub fn relabel(
        &self,
        axes: Vec<String>,
        mut f: impl FnMut(&[String]) -> Vec<String>,
    ) -> Result<JointDist, ProbError> {
        JointDist::new(axes, self.table.iter().map(|(k, p)| (f(k), p.clone())))
    }
}
