use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::ProtocolError;
use crate::{FiniteDist, JointDist, Rational};

/// One positive-probability value of `(X, L_1, …, L_n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    /// Index into the scenario's secret support.
    pub x: usize,
    pub leaks: Vec<bool>,
    pub prob: Rational,
}

/// The prior over the secret and who knows it.
///
/// Axes of the exported joint are `X`, `L1`, …, `Ln`, with leak values `"0"`
/// and `"1"`. Players are 0-based in the API, so player `i` owns axis `L{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeakScenario {
    x_support: Vec<String>,
    n_players: usize,
    outcomes: Vec<Outcome>,
}

pub fn leak_axis(player: usize) -> String {
    format!("L{}", player + 1)
}

impl LeakScenario {
    pub fn new(
        x_support: Vec<String>,
        n_players: usize,
        outcomes: Vec<Outcome>,
    ) -> Result<Self, ProtocolError> {
        if n_players == 0 {
            return Err(ProtocolError::InvalidScenario("no players".into()));
        }
        if x_support.is_empty() {
            return Err(ProtocolError::InvalidScenario("empty secret support".into()));
        }
        let mut x_mass = vec![Rational::zero(); x_support.len()];
        let mut total = Rational::zero();
        let mut kept = Vec::with_capacity(outcomes.len());
        for o in outcomes {
            if o.x >= x_support.len() || o.leaks.len() != n_players {
                return Err(ProtocolError::InvalidScenario(format!(
                    "outcome shape mismatch: x index {}, {} leak flags",
                    o.x,
                    o.leaks.len()
                )));
            }
            if o.prob.is_negative() {
                return Err(ProtocolError::InvalidScenario("negative probability".into()));
            }
            if o.prob.is_zero() {
                continue;
            }
            x_mass[o.x] += &o.prob;
            total += &o.prob;
            kept.push(o);
        }
        if !total.is_one() {
            return Err(ProtocolError::InvalidScenario(format!(
                "probabilities sum to {total}"
            )));
        }
        if let Some(i) = x_mass.iter().position(|m| m.is_zero()) {
            return Err(ProtocolError::InvalidScenario(format!(
                "secret value {:?} has probability zero",
                x_support[i]
            )));
        }
        kept.sort_by(|a, b| (a.x, &a.leaks).cmp(&(b.x, &b.leaks)));
        // merge duplicates
        let mut outcomes: Vec<Outcome> = Vec::with_capacity(kept.len());
        for o in kept {
            match outcomes.last_mut() {
                Some(last) if last.x == o.x && last.leaks == o.leaks => last.prob += o.prob,
                _ => outcomes.push(o),
            }
        }
        Ok(LeakScenario {
            x_support,
            n_players,
            outcomes,
        })
    }

    /// Reads a joint with axes `X`, `L1`, …, `Ln` in any order.
    pub fn from_joint(j: &JointDist) -> Result<Self, ProtocolError> {
        let x_axis = j.axis_index("X")?;
        let n = j.axes().len() - 1;
        let leak_idx: Vec<usize> = (0..n)
            .map(|i| j.axis_index(&leak_axis(i)))
            .collect::<Result<_, _>>()
            .map_err(|_| {
                ProtocolError::InvalidScenario(format!(
                    "expected axes X, L1..L{n}, got {:?}",
                    j.axes()
                ))
            })?;
        let x_support: Vec<String> = j
            .values_of(&["X"])?
            .into_iter()
            .map(|(mut k, _)| k.pop().expect("one axis"))
            .collect();
        let mut outcomes = Vec::with_capacity(j.len());
        for (key, p) in j.cells() {
            let x = x_support
                .iter()
                .position(|l| *l == key[x_axis])
                .expect("label from marginal");
            let leaks = leak_idx
                .iter()
                .map(|&a| match key[a].as_str() {
                    "0" => Ok(false),
                    "1" => Ok(true),
                    other => Err(ProtocolError::InvalidScenario(format!(
                        "leak indicator must be \"0\" or \"1\", got {other:?}"
                    ))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            outcomes.push(Outcome {
                x,
                leaks,
                prob: p.clone(),
            });
        }
        LeakScenario::new(x_support, n, outcomes)
    }

    /// Every player leaks independently with probability `b`, independently of `X`.
    pub fn indep(x: &FiniteDist, n_players: usize, b: &Rational) -> Result<Self, ProtocolError> {
        if b.is_negative() || *b > Rational::one() {
            return Err(ProtocolError::InvalidScenario(format!("leak probability {b} outside [0,1]")));
        }
        let (x_support, x_probs) = positive_part(x);
        let nb = b.complement();
        let mut outcomes = Vec::new();
        for mask in 0..(1u64 << n_players) {
            let leaks: Vec<bool> = (0..n_players).map(|i| mask >> i & 1 == 1).collect();
            let k = leaks.iter().filter(|&&l| l).count() as u32;
            let p_leaks = b.pow(k) * nb.pow(n_players as u32 - k);
            for (xi, px) in x_probs.iter().enumerate() {
                outcomes.push(Outcome {
                    x: xi,
                    leaks: leaks.clone(),
                    prob: px * &p_leaks,
                });
            }
        }
        LeakScenario::new(x_support, n_players, outcomes)
    }

    /// A uniformly random set of exactly `leakers` players knows `X`.
    pub fn fixed(x: &FiniteDist, leakers: usize, n_players: usize) -> Result<Self, ProtocolError> {
        if leakers > n_players {
            return Err(ProtocolError::InvalidScenario(format!(
                "{leakers} leakers among {n_players} players"
            )));
        }
        let (x_support, x_probs) = positive_part(x);
        let subsets: Vec<Vec<usize>> = (0..n_players).combinations(leakers).collect();
        let per_set = Rational::new(1, subsets.len() as i64);
        let mut outcomes = Vec::new();
        for set in &subsets {
            let mut leaks = vec![false; n_players];
            for &i in set {
                leaks[i] = true;
            }
            for (xi, px) in x_probs.iter().enumerate() {
                outcomes.push(Outcome {
                    x: xi,
                    leaks: leaks.clone(),
                    prob: px * &per_set,
                });
            }
        }
        LeakScenario::new(x_support, n_players, outcomes)
    }

    pub fn x_support(&self) -> &[String] {
        &self.x_support
    }

    pub fn x_label(&self, idx: usize) -> &str {
        &self.x_support[idx]
    }

    pub fn x_index(&self, label: &str) -> Option<usize> {
        self.x_support.iter().position(|l| l == label)
    }

    pub fn n_players(&self) -> usize {
        self.n_players
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn prior_masses(&self) -> Vec<Rational> {
        self.outcomes.iter().map(|o| o.prob.clone()).collect()
    }

    pub fn x_prior(&self) -> FiniteDist {
        let mut mass = vec![Rational::zero(); self.x_support.len()];
        for o in &self.outcomes {
            mass[o.x] += &o.prob;
        }
        FiniteDist::new(self.x_support.clone(), mass).expect("scenario is normalized")
    }

    pub fn axes(&self) -> Vec<String> {
        std::iter::once("X".to_string())
            .chain((0..self.n_players).map(leak_axis))
            .collect()
    }

    /// Key of an outcome in the exported joint.
    pub fn outcome_key(&self, o: &Outcome) -> Vec<String> {
        std::iter::once(self.x_support[o.x].clone())
            .chain(o.leaks.iter().map(|&l| if l { "1" } else { "0" }.to_string()))
            .collect()
    }

    pub fn to_joint(&self) -> JointDist {
        JointDist::new(
            self.axes(),
            self.outcomes
                .iter()
                .map(|o| (self.outcome_key(o), o.prob.clone())),
        )
        .expect("scenario is normalized")
    }
}

fn positive_part(x: &FiniteDist) -> (Vec<String>, Vec<Rational>) {
    x.iter()
        .filter(|(_, p)| p.is_positive())
        .map(|(l, p)| (l.to_string(), p.clone()))
        .unzip()
}

/// Uniform law over all `h`-bit strings.
pub fn uniform_bits(h: u32) -> FiniteDist {
    FiniteDist::uniform((0..1u64 << h).map(|v| {
        if h == 0 {
            String::new()
        } else {
            format!("{v:0width$b}", width = h as usize)
        }
    }))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SecretSpec {
    Bits { uniform_bits: u32 },
    Dist(FiniteDist),
}

impl SecretSpec {
    pub fn to_dist(&self) -> FiniteDist {
        match self {
            SecretSpec::Bits { uniform_bits: h } => uniform_bits(*h),
            SecretSpec::Dist(d) => d.clone(),
        }
    }
}

/// File form of a scenario.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScenarioSpec {
    Indep {
        x: SecretSpec,
        players: usize,
        b: Rational,
    },
    Fixed {
        x: SecretSpec,
        leakers: usize,
        players: usize,
    },
    Joint {
        joint: JointDist,
    },
}

impl ScenarioSpec {
    pub fn build(&self) -> Result<LeakScenario, ProtocolError> {
        match self {
            ScenarioSpec::Indep { x, players, b } => LeakScenario::indep(&x.to_dist(), *players, b),
            ScenarioSpec::Fixed {
                x,
                leakers,
                players,
            } => LeakScenario::fixed(&x.to_dist(), *leakers, *players),
            ScenarioSpec::Joint { joint } => LeakScenario::from_joint(joint),
        }
    }
}

impl Serialize for LeakScenario {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ScenarioSpec::Joint {
            joint: self.to_joint(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LeakScenario {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        ScenarioSpec::deserialize(d)?
            .build()
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio;

    #[test]
    fn indep_marginals() {
        let s = LeakScenario::indep(&FiniteDist::uniform(["a", "b"]), 3, &ratio(1, 4)).unwrap();
        let j = s.to_joint();
        for i in 0..3 {
            assert_eq!(j.prob_of(&[(&leak_axis(i), "1")]).unwrap(), ratio(1, 4));
            assert_eq!(
                j.condition(&[("X", "b")]).unwrap().prob_of(&[(&leak_axis(i), "1")]).unwrap(),
                ratio(1, 4)
            );
        }
        assert_eq!(s.outcomes().len(), 16);
    }

    #[test]
    fn fixed_counts() {
        let s = LeakScenario::fixed(&uniform_bits(1), 2, 4).unwrap();
        assert_eq!(s.outcomes().len(), 2 * 6);
        assert!(s.outcomes().iter().all(|o| o.leaks.iter().filter(|&&l| l).count() == 2));
        let j = s.to_joint();
        assert_eq!(j.prob_of(&[("L3", "1")]).unwrap(), ratio(1, 2));
    }

    #[test]
    fn joint_round_trip() {
        let s = LeakScenario::fixed(&uniform_bits(2), 1, 3).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        let back: LeakScenario = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        let spec = r#"{"kind":"fixed","x":{"uniform_bits":2},"leakers":1,"players":3}"#;
        let parsed: LeakScenario = serde_json::from_str(spec).unwrap();
        assert_eq!(parsed, s);
    }

    #[test]
    fn rejects_bad_leak_values() {
        let j = JointDist::new(
            vec!["X".into(), "L1".into()],
            vec![(vec!["0".into(), "2".into()], Rational::one())],
        )
        .unwrap();
        assert!(LeakScenario::from_joint(&j).is_err());
    }
}
