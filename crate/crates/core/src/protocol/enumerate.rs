use std::collections::BTreeMap;

use serde::Serialize;

use super::{LeakScenario, Node, ProtocolError, ProtocolTree};
use crate::{FiniteDist, JointDist, Rational};

/// Default cap on the number of complete transcripts enumerated.
pub const DEFAULT_BUDGET: usize = 1_000_000;

/// Name of the transcript axis in enumerated joints.
pub const TRANSCRIPT_AXIS: &str = "T";

/// A complete transcript with the joint mass of every scenario outcome.
#[derive(Clone, Debug)]
pub struct Leaf {
    pub transcript: Vec<String>,
    pub masses: Vec<Rational>,
}

impl Leaf {
    pub fn prob(&self) -> Rational {
        self.masses.iter().sum()
    }
}

/// A reached node: the outcome masses on arrival and after each positive-mass message.
#[derive(Clone, Debug)]
pub struct NodeVisit {
    pub prefix: Vec<String>,
    pub speaker: usize,
    pub masses: Vec<Rational>,
    pub branches: Vec<(String, Vec<Rational>)>,
}

#[derive(Clone, Debug)]
pub struct Enumeration {
    pub leaves: Vec<Leaf>,
    pub nodes: Vec<NodeVisit>,
}

/// Stable text form of a transcript, used as the `T` label.
pub fn transcript_key(t: &[String]) -> String {
    serde_json::to_string(t).expect("strings serialize")
}

/// Per-outcome laws at a node, in outcome order.
pub(crate) fn outcome_laws<'a>(
    node: &'a Node,
    scenario: &LeakScenario,
) -> Result<Vec<&'a FiniteDist>, ProtocolError> {
    if node.speaker >= scenario.n_players() {
        return Err(ProtocolError::SpeakerOutOfRange {
            speaker: node.speaker,
            players: scenario.n_players(),
        });
    }
    scenario
        .outcomes()
        .iter()
        .map(|o| node.law(o.leaks[node.speaker], scenario.x_label(o.x)))
        .collect()
}

pub(crate) fn branch_masses(
    masses: &[Rational],
    laws: &[&FiniteDist],
    message: &str,
) -> Vec<Rational> {
    masses
        .iter()
        .zip(laws)
        .map(|(m, d)| if m.is_zero() { Rational::zero() } else { m * d.prob(message) })
        .collect()
}

/// Exhaustive walk of every positive-probability transcript.
pub fn enumerate(
    tree: &ProtocolTree,
    scenario: &LeakScenario,
    budget: usize,
) -> Result<Enumeration, ProtocolError> {
    let mut out = Enumeration {
        leaves: Vec::new(),
        nodes: Vec::new(),
    };
    let prior = scenario.prior_masses();
    match &tree.root {
        None => out.leaves.push(Leaf {
            transcript: Vec::new(),
            masses: prior,
        }),
        Some(root) => walk(root, scenario, &mut Vec::new(), prior, budget, &mut out)?,
    }
    Ok(out)
}

fn walk(
    node: &Node,
    scenario: &LeakScenario,
    prefix: &mut Vec<String>,
    masses: Vec<Rational>,
    budget: usize,
    out: &mut Enumeration,
) -> Result<(), ProtocolError> {
    let laws = outcome_laws(node, scenario)?;
    let mut branches = Vec::new();
    for m in &node.alphabet {
        let next = branch_masses(&masses, &laws, m);
        if next.iter().all(Rational::is_zero) {
            continue;
        }
        branches.push((m.clone(), next));
    }
    out.nodes.push(NodeVisit {
        prefix: prefix.clone(),
        speaker: node.speaker,
        masses,
        branches: branches.clone(),
    });
    for (m, next) in branches {
        prefix.push(m.clone());
        match node.child(&m) {
            Some(c) => walk(c, scenario, prefix, next, budget, out)?,
            None => {
                if out.leaves.len() >= budget {
                    return Err(ProtocolError::BudgetExceeded { budget });
                }
                out.leaves.push(Leaf {
                    transcript: prefix.clone(),
                    masses: next,
                });
            }
        }
        prefix.pop();
    }
    Ok(())
}

impl Enumeration {
    /// Exact joint over `X, L1..Ln, T`.
    pub fn joint(&self, scenario: &LeakScenario) -> JointDist {
        let mut axes = scenario.axes();
        axes.push(TRANSCRIPT_AXIS.to_string());
        let mut cells = Vec::new();
        for leaf in &self.leaves {
            let t = transcript_key(&leaf.transcript);
            for (o, m) in scenario.outcomes().iter().zip(&leaf.masses) {
                if m.is_zero() {
                    continue;
                }
                let mut key = scenario.outcome_key(o);
                key.push(t.clone());
                cells.push((key, m.clone()));
            }
        }
        JointDist::new(axes, cells).expect("enumeration preserves total mass")
    }
}

pub fn enumerate_joint(
    tree: &ProtocolTree,
    scenario: &LeakScenario,
    budget: usize,
) -> Result<JointDist, ProtocolError> {
    Ok(enumerate(tree, scenario, budget)?.joint(scenario))
}

/// Outcome masses after a partial transcript.
pub fn masses_at(
    tree: &ProtocolTree,
    scenario: &LeakScenario,
    prefix: &[String],
) -> Result<Vec<Rational>, ProtocolError> {
    let mut masses = scenario.prior_masses();
    let mut node = tree.root.as_ref();
    for (k, m) in prefix.iter().enumerate() {
        let n = node.ok_or_else(|| ProtocolError::InvalidPrefix(prefix.to_vec()))?;
        if !n.alphabet.contains(m) {
            return Err(ProtocolError::InvalidPrefix(prefix[..=k].to_vec()));
        }
        let laws = outcome_laws(n, scenario)?;
        masses = branch_masses(&masses, &laws, m);
        node = n.child(m);
    }
    Ok(masses)
}

/// Posterior view of `(X, L)` after a transcript prefix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Posterior {
    pub x: FiniteDist,
    /// `Pr(L_i = 1 | t)` per player.
    pub leak: Vec<Rational>,
    /// `Pr(L_i = 1 | t, X = x)` per player, for each `x` of positive posterior mass.
    pub leak_given_x: BTreeMap<String, Vec<Rational>>,
}

impl Posterior {
    pub fn from_masses(scenario: &LeakScenario, masses: &[Rational]) -> Option<Posterior> {
        let total: Rational = masses.iter().sum();
        if total.is_zero() {
            return None;
        }
        let n = scenario.n_players();
        let nx = scenario.x_support().len();
        let mut x_mass = vec![Rational::zero(); nx];
        let mut leak_mass = vec![vec![Rational::zero(); n]; nx];
        for (o, m) in scenario.outcomes().iter().zip(masses) {
            if m.is_zero() {
                continue;
            }
            x_mass[o.x] += m;
            for (i, &l) in o.leaks.iter().enumerate() {
                if l {
                    leak_mass[o.x][i] += m;
                }
            }
        }
        let leak = (0..n)
            .map(|i| leak_mass.iter().map(|row| &row[i]).sum::<Rational>() / &total)
            .collect();
        let leak_given_x = (0..nx)
            .filter(|&x| x_mass[x].is_positive())
            .map(|x| {
                (
                    scenario.x_label(x).to_string(),
                    leak_mass[x].iter().map(|v| v / &x_mass[x]).collect(),
                )
            })
            .collect();
        let x = FiniteDist::new(
            scenario.x_support().to_vec(),
            x_mass.into_iter().map(|v| v / &total).collect(),
        )
        .expect("normalized by construction");
        Some(Posterior {
            x,
            leak,
            leak_given_x,
        })
    }
}

pub fn posteriors(
    tree: &ProtocolTree,
    scenario: &LeakScenario,
    prefix: &[String],
) -> Result<Posterior, ProtocolError> {
    let masses = masses_at(tree, scenario, prefix)?;
    Posterior::from_masses(scenario, &masses)
        .ok_or_else(|| ProtocolError::ZeroProbabilityPrefix(prefix.to_vec()))
}

/// `Pr(L_player = 1 | ·, X = x)` from outcome masses, if `X = x` has positive mass.
pub fn leak_posterior(
    scenario: &LeakScenario,
    masses: &[Rational],
    x: usize,
    player: usize,
) -> Option<Rational> {
    let mut all = Rational::zero();
    let mut leaking = Rational::zero();
    for (o, m) in scenario.outcomes().iter().zip(masses) {
        if o.x != x || m.is_zero() {
            continue;
        }
        all += m;
        if o.leaks[player] {
            leaking += m;
        }
    }
    if all.is_zero() {
        None
    } else {
        Some(leaking / all)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SafetyReport {
    pub threshold: Rational,
    pub safe: bool,
    /// Largest `Pr(L_i=1 | t, X=x)` over every reached prefix, complete or not.
    pub max_posterior: Rational,
    pub violations: usize,
}

/// Scans every positive-probability prefix and complete transcript.
pub fn safety_check(
    tree: &ProtocolTree,
    scenario: &LeakScenario,
    c: &Rational,
    budget: usize,
) -> Result<SafetyReport, ProtocolError> {
    let e = enumerate(tree, scenario, budget)?;
    let mut max_posterior = Rational::zero();
    let mut violations = 0;
    let mut scan = |masses: &[Rational]| {
        for x in 0..scenario.x_support().len() {
            for i in 0..scenario.n_players() {
                if let Some(p) = leak_posterior(scenario, masses, x, i) {
                    if p > *c {
                        violations += 1;
                    }
                    if p > max_posterior {
                        max_posterior = p;
                    }
                }
            }
        }
    };
    for n in &e.nodes {
        scan(&n.masses);
    }
    for l in &e.leaves {
        scan(&l.masses);
    }
    Ok(SafetyReport {
        threshold: c.clone(),
        safe: violations == 0,
        max_posterior,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::uniform_bits;
    use crate::{prob, ratio};

    fn bit(p0: Rational) -> FiniteDist {
        FiniteDist::new(vec!["0".into(), "1".into()], vec![p0.clone(), p0.complement()]).unwrap()
    }

    #[test]
    fn empty_protocol_joint_is_scenario() {
        let s = LeakScenario::indep(&uniform_bits(1), 2, &ratio(1, 3)).unwrap();
        let j = enumerate_joint(&ProtocolTree::empty(), &s, DEFAULT_BUDGET).unwrap();
        assert_eq!(j.marginal(&["X", "L1", "L2"]).unwrap(), s.to_joint());
        assert_eq!(j.law(TRANSCRIPT_AXIS).unwrap().len(), 1);
    }

    #[test]
    fn uninformative_message_extends_product() {
        let s = LeakScenario::indep(&uniform_bits(1), 1, &ratio(1, 2)).unwrap();
        let t = ProtocolTree::new(Node::uninformative(0, bit(ratio(1, 2)), s.x_support()));
        let j = enumerate_joint(&t, &s, DEFAULT_BUDGET).unwrap();
        assert_eq!(j.len(), 8);
        assert!(j.cells().all(|(_, p)| *p == ratio(1, 8)));
        assert!(prob::mutual_information(&j, &["X", "L1"], &["T"]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn budget_is_enforced() {
        let s = LeakScenario::indep(&uniform_bits(1), 1, &ratio(1, 2)).unwrap();
        let xs = s.x_support().to_vec();
        let mut node = Node::uninformative(0, bit(ratio(1, 2)), &xs);
        for _ in 0..4 {
            node = Node::uninformative(0, bit(ratio(1, 2)), &xs)
                .with_child("0", node.clone())
                .with_child("1", node);
        }
        let t = ProtocolTree::new(node);
        assert!(matches!(
            enumerate(&t, &s, 31),
            Err(ProtocolError::BudgetExceeded { budget: 31 })
        ));
        assert_eq!(enumerate(&t, &s, 32).unwrap().leaves.len(), 32);
    }

    #[test]
    fn prefix_posteriors() {
        let s = LeakScenario::indep(&uniform_bits(1), 1, &ratio(1, 2)).unwrap();
        // leaker sends X, non-leaker a fair bit
        let root = Node::new(
            0,
            bit(ratio(1, 2)),
            [("0".into(), bit(Rational::one())), ("1".into(), bit(Rational::zero()))],
        );
        let t = ProtocolTree::new(root);
        let prior = posteriors(&t, &s, &[]).unwrap();
        assert_eq!(prior.leak, vec![ratio(1, 2)]);
        let p = posteriors(&t, &s, &["1".to_string()]).unwrap();
        assert_eq!(p.leak_given_x["1"], vec![ratio(2, 3)]);
        assert_eq!(p.leak_given_x["0"], vec![Rational::zero()]);
        assert_eq!(p.x.prob("1"), ratio(3, 4));
        assert!(matches!(
            posteriors(&t, &s, &["2".to_string()]),
            Err(ProtocolError::InvalidPrefix(_))
        ));
    }
}
