//! Random small protocols and scenarios for property tests and benchmarks.

use rand::Rng;

use super::{LeakScenario, Node, Outcome, ProtocolTree};
use crate::{FiniteDist, Rational};

#[derive(Clone, Debug)]
pub struct RandomProtocolConfig {
    pub players: usize,
    pub max_depth: usize,
    pub min_alphabet: usize,
    pub max_alphabet: usize,
    /// Integer weights are drawn from `0..=max_weight` before normalizing.
    pub max_weight: u32,
    /// Keep every message possible for every law (non-revealing, no zeros).
    pub full_support: bool,
    /// Chance that a message below the depth limit leads to another round.
    pub continue_prob: f64,
}

impl Default for RandomProtocolConfig {
    fn default() -> Self {
        RandomProtocolConfig {
            players: 2,
            max_depth: 3,
            min_alphabet: 2,
            max_alphabet: 2,
            max_weight: 6,
            full_support: true,
            continue_prob: 0.7,
        }
    }
}

pub fn random_dist<R: Rng + ?Sized>(
    labels: &[String],
    max_weight: u32,
    full_support: bool,
    rng: &mut R,
) -> FiniteDist {
    let lo = u32::from(full_support);
    let hi = max_weight.max(1);
    let mut w: Vec<u32> = labels.iter().map(|_| rng.random_range(lo..=hi)).collect();
    if w.iter().all(|&v| v == 0) {
        let i = rng.random_range(0..w.len());
        w[i] = 1;
    }
    FiniteDist::from_weights(labels.to_vec(), w.into_iter().map(Rational::from).collect())
        .expect("positive total weight")
}

fn random_node<R: Rng + ?Sized>(
    cfg: &RandomProtocolConfig,
    xs: &[String],
    depth: usize,
    rng: &mut R,
) -> Node {
    let k = rng.random_range(cfg.min_alphabet..=cfg.max_alphabet);
    let alphabet: Vec<String> = (0..k).map(|i| i.to_string()).collect();
    let speaker = rng.random_range(0..cfg.players);
    let inn = random_dist(&alphabet, cfg.max_weight, cfg.full_support, rng);
    let leak: Vec<(String, FiniteDist)> = xs
        .iter()
        .map(|x| (x.clone(), random_dist(&alphabet, cfg.max_weight, cfg.full_support, rng)))
        .collect();
    let mut node = Node::new(speaker, inn, leak);
    if depth < cfg.max_depth {
        for m in &alphabet {
            if rng.random_bool(cfg.continue_prob) {
                node.children
                    .insert(m.clone(), random_node(cfg, xs, depth + 1, rng));
            }
        }
    }
    node
}

pub fn random_protocol<R: Rng + ?Sized>(
    cfg: &RandomProtocolConfig,
    xs: &[String],
    rng: &mut R,
) -> ProtocolTree {
    ProtocolTree::new(random_node(cfg, xs, 1, rng))
}

/// A joint over `(X, L)` with arbitrary dependence, where every secret value
/// has an all-innocent outcome of positive probability.
pub fn random_scenario<R: Rng + ?Sized>(
    x_count: usize,
    players: usize,
    max_weight: u32,
    rng: &mut R,
) -> LeakScenario {
    let xs: Vec<String> = (0..x_count).map(|i| format!("x{i}")).collect();
    let mut outcomes = Vec::new();
    for x in 0..x_count {
        for mask in 0..(1u32 << players) {
            let lo = u32::from(mask == 0);
            let w = rng.random_range(lo..=max_weight.max(1));
            outcomes.push(Outcome {
                x,
                leaks: (0..players).map(|i| mask >> i & 1 == 1).collect(),
                prob: Rational::from(w),
            });
        }
    }
    let total: Rational = outcomes.iter().map(|o| &o.prob).sum();
    for o in &mut outcomes {
        o.prob = &o.prob / &total;
    }
    LeakScenario::new(xs, players, outcomes).expect("normalized")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from;

    #[test]
    fn generated_protocols_are_valid() {
        let mut rng = rng_from(1);
        for _ in 0..50 {
            let s = random_scenario(2, 2, 4, &mut rng);
            let t = random_protocol(&RandomProtocolConfig::default(), s.x_support(), &mut rng);
            assert!(t.validate_for(&s).is_valid());
            assert!(t.non_revealing());
            assert!(t.depth() <= 3);
        }
    }
}
