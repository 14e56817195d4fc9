use rand::Rng;
use serde::Serialize;

use super::{f_partition, g_partition, Interval, StegoError};
use crate::protocol::{sample, Node, ProtocolTree};
use crate::{FiniteDist, Rational};

/// What an observer of the innocent transcript has decoded so far.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct InterpreterState {
    pub pi_transcript: Vec<String>,
    /// `[0, 1)` right after a message of the embedded protocol is decoded.
    pub interval: Interval,
    pub finished: bool,
}

/// The node reached by `prefix`, `None` once the protocol has ended.
pub fn node_at<'a>(tree: &'a ProtocolTree, prefix: &[String]) -> Option<&'a Node> {
    let mut node = tree.root.as_ref()?;
    for m in prefix {
        node = node.child(m)?;
    }
    Some(node)
}

impl InterpreterState {
    /// State before any innocent message, already settled.
    pub fn start(tree: &ProtocolTree) -> Self {
        let mut s = InterpreterState {
            pi_transcript: Vec::new(),
            interval: Interval::unit(),
            finished: false,
        };
        s.settle(tree);
        s
    }

    pub fn node<'a>(&self, tree: &'a ProtocolTree) -> Option<&'a Node> {
        if self.finished {
            None
        } else {
            node_at(tree, &self.pi_transcript)
        }
    }

    /// The player whose embedded message is being decoded.
    pub fn speaker(&self, tree: &ProtocolTree) -> Option<usize> {
        self.node(tree).map(|n| n.speaker)
    }

    /// Emits every message whose `f`-cell already contains the interval.
    fn settle(&mut self, tree: &ProtocolTree) {
        loop {
            let Some(node) = node_at(tree, &self.pi_transcript) else {
                self.finished = true;
                return;
            };
            let hit = f_partition(&node.p_innocent)
                .into_iter()
                .find(|(_, cell)| cell.contains(&self.interval));
            match hit {
                Some((a, _)) => {
                    self.pi_transcript.push(a);
                    self.interval = Interval::unit();
                }
                None => return,
            }
        }
    }
}

/// Feeds one innocent message. Only the current speaker's messages move the state.
pub fn interpret_step(
    tree: &ProtocolTree,
    state: &InterpreterState,
    player: usize,
    message: &str,
    innocent_law: &FiniteDist,
) -> Result<InterpreterState, StegoError> {
    let Some(node) = state.node(tree) else {
        return Ok(state.clone());
    };
    if node.speaker != player {
        return Ok(state.clone());
    }
    let g = g_partition(&state.interval, innocent_law)
        .into_iter()
        .find(|(m, _)| m == message)
        .map(|(_, i)| i)
        .ok_or_else(|| StegoError::Invalid(format!("message {message:?} impossible in this round")))?;
    let mut next = state.clone();
    next.interval = g;
    next.settle(tree);
    Ok(next)
}

/// The leaker's law for the next innocent message, given it has committed to
/// embedded message `a`: the conditional law of the message that a uniform
/// `α ∈ f⁻¹(a) ∩ current` selects.
pub fn leaker_message_law(
    current: &Interval,
    chosen: &Interval,
    innocent_law: &FiniteDist,
) -> Result<FiniteDist, StegoError> {
    let target = current
        .intersect(chosen)
        .ok_or(StegoError::EmptyIntersection)?;
    let width = target.len();
    let labels = innocent_law.support().to_vec();
    let mut probs = vec![Rational::zero(); labels.len()];
    for (m, g) in g_partition(current, innocent_law) {
        let idx = labels.iter().position(|l| *l == m).expect("label from law");
        probs[idx] = g.overlap(&target) / &width;
    }
    Ok(FiniteDist::new(labels, probs)?)
}

/// `f⁻¹(a)` at a node.
pub fn f_cell(node: &Node, a: &str) -> Result<Interval, StegoError> {
    f_partition(&node.p_innocent)
        .into_iter()
        .find(|(m, _)| m == a)
        .map(|(_, i)| i)
        .ok_or_else(|| StegoError::Revealing(a.to_string()))
}

/// Draws the leaker's next innocent message.
pub fn embed_leaker_step<R: Rng + ?Sized>(
    tree: &ProtocolTree,
    state: &InterpreterState,
    chosen: &str,
    innocent_law: &FiniteDist,
    rng: &mut R,
) -> Result<String, StegoError> {
    let node = state
        .node(tree)
        .ok_or_else(|| StegoError::Invalid("embedded protocol already finished".into()))?;
    let law = leaker_message_law(&state.interval, &f_cell(node, chosen)?, innocent_law)?;
    Ok(sample(&law, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio;

    fn two(p: Rational, a: &str, b: &str) -> FiniteDist {
        FiniteDist::new(vec![a.into(), b.into()], vec![p.clone(), p.complement()]).unwrap()
    }

    fn figure_tree() -> ProtocolTree {
        let inn = two(ratio(2, 5), "a1", "a2");
        ProtocolTree::new(Node::new(
            0,
            inn,
            [("x".to_string(), two(ratio(1, 2), "a1", "a2"))],
        ))
    }

    #[test]
    fn figure_walkthrough() {
        let tree = figure_tree();
        let m1 = two(ratio(3, 5), "m1", "m2");
        let s0 = InterpreterState::start(&tree);
        assert!(s0.interval.is_unit() && !s0.finished);
        let s1 = interpret_step(&tree, &s0, 0, "m1", &m1).unwrap();
        assert_eq!(s1.interval, Interval::new(ratio(0, 1), ratio(3, 5)).unwrap());
        assert!(s1.pi_transcript.is_empty());
        let s2 = interpret_step(&tree, &s1, 0, "m1", &m1).unwrap();
        assert_eq!(s2.pi_transcript, vec!["a1".to_string()]);
        assert!(s2.finished && s2.interval.is_unit());
        let s3 = interpret_step(&tree, &s2, 0, "m2", &m1).unwrap();
        assert_eq!(s3, s2);
    }

    #[test]
    fn exact_cell_emits() {
        let tree = ProtocolTree::new(Node::uninformative(0, two(ratio(1, 2), "a", "b"), &["x".into()]));
        let s = interpret_step(&tree, &InterpreterState::start(&tree), 0, "0", &two(ratio(1, 2), "0", "1")).unwrap();
        assert_eq!(s.pi_transcript, vec!["a".to_string()]);
    }

    #[test]
    fn other_players_do_not_move_it() {
        let tree = figure_tree();
        let s0 = InterpreterState::start(&tree);
        let s1 = interpret_step(&tree, &s0, 1, "m1", &two(ratio(3, 5), "m1", "m2")).unwrap();
        assert_eq!(s0, s1);
    }

    #[test]
    fn leaker_laws_on_figure() {
        let tree = figure_tree();
        let node = tree.root.as_ref().unwrap();
        let m = two(ratio(3, 5), "m1", "m2");
        let chosen = f_cell(node, "a1").unwrap();
        let l0 = leaker_message_law(&Interval::unit(), &chosen, &m).unwrap();
        assert_eq!(l0.prob("m1"), Rational::one());
        let after = Interval::new(ratio(0, 1), ratio(3, 5)).unwrap();
        let l1 = leaker_message_law(&after, &chosen, &m).unwrap();
        assert_eq!(l1.prob("m1"), ratio(9, 10));
        assert_eq!(l1.prob("m2"), ratio(1, 10));
    }

    #[test]
    fn full_cell_reproduces_the_innocent_law() {
        let m = FiniteDist::new(
            vec!["p".into(), "q".into(), "r".into()],
            vec![ratio(1, 6), ratio(1, 2), ratio(1, 3)],
        )
        .unwrap();
        let current = Interval::new(ratio(1, 7), ratio(5, 7)).unwrap();
        let l = leaker_message_law(&current, &Interval::unit(), &m).unwrap();
        assert!(l.same_law(&m));
    }

    #[test]
    fn empty_protocol_is_finished_at_once() {
        assert!(InterpreterState::start(&ProtocolTree::empty()).finished);
    }
}
