//! Fixed inputs shared by the benchmarks.

use cryptogen::protocol::{
    random_protocol, random_scenario, uniform_bits, LeakScenario, Node, ProtocolTree, RandomProtocolConfig,
};
use cryptogen::seed::rng_from;
use cryptogen::stego::InnocentChannel;
use cryptogen::{ratio, FiniteDist, Rational};

fn two(p: Rational, a: &str, b: &str) -> FiniteDist {
    FiniteDist::new(vec![a.into(), b.into()], vec![p.clone(), p.complement()]).expect("valid law")
}

/// A random binary protocol of depth `depth` between two players, with its scenario.
pub fn random_instance(seed: u64, depth: usize) -> (ProtocolTree, LeakScenario) {
    let mut rng = rng_from(seed);
    let s = random_scenario(2, 2, 5, &mut rng);
    let cfg = RandomProtocolConfig {
        max_depth: depth,
        continue_prob: 1.0,
        ..Default::default()
    };
    (random_protocol(&cfg, s.x_support(), &mut rng), s)
}

/// One binary embedded message hidden in a biased binary chatter.
pub fn embedding_instance() -> (ProtocolTree, InnocentChannel, LeakScenario) {
    let s = LeakScenario::indep(&uniform_bits(1), 1, &ratio(1, 2)).expect("valid scenario");
    let tree = ProtocolTree::new(Node::new(
        0,
        two(ratio(2, 5), "a1", "a2"),
        [
            ("0".to_string(), two(ratio(4, 5), "a1", "a2")),
            ("1".to_string(), two(ratio(1, 5), "a1", "a2")),
        ],
    ));
    let ch = InnocentChannel::iid(1, two(ratio(3, 5), "m1", "m2")).expect("valid channel");
    (tree, ch, s)
}
