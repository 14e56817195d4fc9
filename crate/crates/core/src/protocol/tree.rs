use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{LeakScenario, ProtocolError};
use crate::{FiniteDist, Rational};

/// One round: who speaks, what they may say, and how they choose.
///
/// A message with no entry in `children` ends the protocol.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub speaker: usize,
    pub alphabet: Vec<String>,
    pub p_innocent: FiniteDist,
    pub p_leak: BTreeMap<String, FiniteDist>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub children: BTreeMap<String, Node>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolTree {
    pub length_bound: usize,
    #[serde(default)]
    pub root: Option<Node>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

impl Node {
    /// A node where the leaker's law is `p_leak[x]` for each listed `x`.
    pub fn new(
        speaker: usize,
        p_innocent: FiniteDist,
        p_leak: impl IntoIterator<Item = (String, FiniteDist)>,
    ) -> Self {
        Node {
            speaker,
            alphabet: p_innocent.support().to_vec(),
            p_innocent,
            p_leak: p_leak.into_iter().collect(),
            children: BTreeMap::new(),
        }
    }

    /// A node where every player speaks as a non-leaker would.
    pub fn uninformative(speaker: usize, law: FiniteDist, xs: &[String]) -> Self {
        Node::new(speaker, law.clone(), xs.iter().map(|x| (x.clone(), law.clone())))
    }

    pub fn with_child(mut self, message: &str, child: Node) -> Self {
        self.children.insert(message.to_string(), child);
        self
    }

    pub fn child(&self, message: &str) -> Option<&Node> {
        self.children.get(message)
    }

    /// The law the speaker uses.
    pub fn law(&self, leaking: bool, x: &str) -> Result<&FiniteDist, ProtocolError> {
        if leaking {
            self.p_leak
                .get(x)
                .ok_or_else(|| ProtocolError::MissingLeakLaw(x.to_string()))
        } else {
            Ok(&self.p_innocent)
        }
    }

    pub fn prob(&self, leaking: bool, x: &str, message: &str) -> Result<Rational, ProtocolError> {
        Ok(self.law(leaking, x)?.prob(message))
    }

    /// Longest transcript through this node.
    pub fn depth(&self) -> usize {
        1 + self.children.values().map(Node::depth).max().unwrap_or(0)
    }

    pub fn count_nodes(&self) -> usize {
        1 + self.children.values().map(Node::count_nodes).sum::<usize>()
    }

    pub fn visit<'a>(&'a self, prefix: &mut Vec<String>, f: &mut impl FnMut(&[String], &'a Node)) {
        f(prefix, self);
        for (m, c) in &self.children {
            prefix.push(m.clone());
            c.visit(prefix, f);
            prefix.pop();
        }
    }

    fn check(&self, prefix: &[String], issues: &mut Vec<String>) {
        let at = format!("{prefix:?}");
        if self.alphabet.is_empty() {
            issues.push(format!("{at}: empty alphabet"));
        }
        let letters: BTreeSet<&str> = self.alphabet.iter().map(String::as_str).collect();
        if letters.len() != self.alphabet.len() {
            issues.push(format!("{at}: duplicate messages in alphabet"));
        }
        let same_letters = |d: &FiniteDist| {
            d.support().iter().map(String::as_str).collect::<BTreeSet<_>>() == letters
        };
        if !same_letters(&self.p_innocent) {
            issues.push(format!("{at}: innocent law is not over the alphabet"));
        }
        for (x, d) in &self.p_leak {
            if !same_letters(d) {
                issues.push(format!("{at}: leak law for {x:?} is not over the alphabet"));
            }
        }
        for (m, c) in &self.children {
            if !letters.contains(m.as_str()) {
                issues.push(format!("{at}: child for unknown message {m:?}"));
            }
            let mut p = prefix.to_vec();
            p.push(m.clone());
            c.check(&p, issues);
        }
    }
}

impl ProtocolTree {
    pub fn empty() -> Self {
        ProtocolTree::default()
    }

    pub fn new(root: Node) -> Self {
        let length_bound = root.depth();
        ProtocolTree {
            length_bound,
            root: Some(root),
        }
    }

    pub fn from_root(root: Option<Node>) -> Self {
        match root {
            Some(r) => ProtocolTree::new(r),
            None => ProtocolTree::empty(),
        }
    }

    pub fn depth(&self) -> usize {
        self.root.as_ref().map_or(0, Node::depth)
    }

    pub fn count_nodes(&self) -> usize {
        self.root.as_ref().map_or(0, Node::count_nodes)
    }

    /// Calls `f` on every node with the transcript prefix leading to it.
    pub fn visit<'a>(&'a self, mut f: impl FnMut(&[String], &'a Node)) {
        if let Some(r) = &self.root {
            r.visit(&mut Vec::new(), &mut f);
        }
    }

    /// Structural checks that need no scenario.
    pub fn validate(&self) -> ValidationReport {
        let mut issues = Vec::new();
        if let Some(r) = &self.root {
            r.check(&[], &mut issues);
        }
        let depth = self.depth();
        if depth > self.length_bound {
            issues.push(format!(
                "depth {depth} exceeds length bound {}",
                self.length_bound
            ));
        }
        ValidationReport { issues }
    }

    /// Structural checks plus consistency with a scenario's players and secrets.
    pub fn validate_for(&self, scenario: &LeakScenario) -> ValidationReport {
        let mut report = self.validate();
        self.visit(|prefix, node| {
            if node.speaker >= scenario.n_players() {
                report.issues.push(format!(
                    "{prefix:?}: speaker {} but only {} players",
                    node.speaker,
                    scenario.n_players()
                ));
            }
            for x in scenario.x_support() {
                if !node.p_leak.contains_key(x) {
                    report
                        .issues
                        .push(format!("{prefix:?}: no leak law for secret {x:?}"));
                }
            }
        });
        report
    }

    pub fn ensure_valid_for(&self, scenario: &LeakScenario) -> Result<(), ProtocolError> {
        let report = self.validate_for(scenario);
        if report.is_valid() {
            Ok(())
        } else {
            Err(ProtocolError::Invalid(report.issues.join("; ")))
        }
    }

    /// No leaker can send a message a non-leaker never would.
    pub fn non_revealing(&self) -> bool {
        let mut ok = true;
        self.visit(|_, node| {
            for d in node.p_leak.values() {
                for (m, p) in d.iter() {
                    if p.is_positive() && node.p_innocent.prob(m).is_zero() {
                        ok = false;
                    }
                }
            }
        });
        ok
    }

    /// Every node has at most two messages.
    pub fn is_binary(&self) -> bool {
        let mut ok = true;
        self.visit(|_, node| ok &= node.alphabet.len() <= 2);
        ok
    }

    /// Renames messages at every node through `f`.
    pub fn relabel(&self, f: &impl Fn(&str) -> String) -> ProtocolTree {
        fn go(node: &Node, f: &impl Fn(&str) -> String) -> Node {
            let map_dist = |d: &FiniteDist| {
                FiniteDist::new(
                    d.support().iter().map(|m| f(m)).collect(),
                    d.probs().to_vec(),
                )
                .expect("relabeling must be injective")
            };
            Node {
                speaker: node.speaker,
                alphabet: node.alphabet.iter().map(|m| f(m)).collect(),
                p_innocent: map_dist(&node.p_innocent),
                p_leak: node
                    .p_leak
                    .iter()
                    .map(|(x, d)| (x.clone(), map_dist(d)))
                    .collect(),
                children: node
                    .children
                    .iter()
                    .map(|(m, c)| (f(m), go(c, f)))
                    .collect(),
            }
        }
        ProtocolTree {
            length_bound: self.length_bound,
            root: self.root.as_ref().map(|r| go(r, f)),
        }
    }
}
