use cryptogen::protocol::{random_protocol, uniform_bits, LeakScenario, RandomProtocolConfig};
use cryptogen::seed::rng_from;
use cryptogen::stego::{
    compose_run, equivalence_audit, f_partition, g_partition, interpret_step, leaker_message_law, node_at,
    AuditBudget, InnocentChannel, InterpreterState, Interval,
};
use cryptogen::{ratio, FiniteDist, Rational};
use proptest::prelude::*;
use rand::Rng;

fn law(weights: &[u32]) -> Option<FiniteDist> {
    let labels = (0..weights.len()).map(|i| format!("m{i}")).collect();
    FiniteDist::from_weights(labels, weights.iter().map(|&w| Rational::from(w)).collect()).ok()
}

fn law_strategy() -> impl Strategy<Value = FiniteDist> {
    prop::collection::vec(0u32..6, 1..=4).prop_filter_map("zero law", |w| law(&w))
}

fn interval_strategy() -> impl Strategy<Value = Interval> {
    (1i64..=60)
        .prop_flat_map(|den| (Just(den), 0..den))
        .prop_flat_map(|(den, lo)| (Just(den), Just(lo), lo + 1..=den))
        .prop_map(|(den, lo, hi)| Interval::new(ratio(lo, den), ratio(hi, den)).unwrap())
}

fn tiles(target: &Interval, pieces: &[(String, Interval)], law: &FiniteDist) -> bool {
    let mut at = target.lo().clone();
    for (m, piece) in pieces {
        if *piece.lo() != at || piece.len() != target.len() * law.prob(m) {
            return false;
        }
        at = piece.hi().clone();
    }
    at == *target.hi()
}

proptest! {
    #[test]
    fn partitions_tile(l in law_strategy(), current in interval_strategy()) {
        prop_assert!(tiles(&Interval::unit(), &f_partition(&l), &l));
        prop_assert!(tiles(&current, &g_partition(&current, &l), &l));
    }

    /// Averaging the leaker's law over its committed message, weighted by what
    /// the interval still allows, gives back the innocent law exactly.
    #[test]
    fn uninformative_leaking_looks_innocent(
        pi_law in law_strategy(),
        chatter in law_strategy(),
        current in interval_strategy(),
    ) {
        let mut mixed = vec![Rational::zero(); chatter.len()];
        for (_, cell) in f_partition(&pi_law) {
            let weight = cell.overlap(&current) / current.len();
            if weight.is_zero() {
                continue;
            }
            let l = leaker_message_law(&current, &cell, &chatter).unwrap();
            for (i, (m, _)) in chatter.iter().enumerate() {
                mixed[i] += &weight * l.prob(m);
            }
        }
        prop_assert_eq!(mixed.as_slice(), chatter.probs());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn interpretation_shrinks_and_resets(seed in any::<u64>()) {
        let mut rng = rng_from(seed);
        let cfg = RandomProtocolConfig { full_support: false, max_alphabet: 3, ..Default::default() };
        let xs = uniform_bits(1).support().to_vec();
        let tree = random_protocol(&cfg, &xs, &mut rng);
        let chatter = law(&[1, 2, 3]).unwrap();
        let mut state = InterpreterState::start(&tree);
        for _ in 0..200 {
            if state.finished {
                break;
            }
            let player = rng.random_range(0..2);
            let m = format!("m{}", rng.random_range(0..3));
            let next = interpret_step(&tree, &state, player, &m, &chatter).unwrap();
            let emitted = next.pi_transcript.len() > state.pi_transcript.len();
            if emitted {
                // a settle may cascade through several nodes; check each emission where it happened
                for k in state.pi_transcript.len()..next.pi_transcript.len() {
                    let at = node_at(&tree, &next.pi_transcript[..k]).unwrap();
                    prop_assert!(at.p_innocent.prob(&next.pi_transcript[k]).is_positive());
                }
                prop_assert!(next.finished || next.interval.is_unit());
            } else {
                prop_assert!(next.interval.len() <= state.interval.len());
                prop_assert!(state.interval.contains(&next.interval));
            }
            state = next;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn random_one_round_audits_are_exact(seed in any::<u64>(), bn in 1i64..4) {
        let mut rng = rng_from(seed);
        let s = LeakScenario::indep(&uniform_bits(1), 2, &ratio(bn, 4)).unwrap();
        let cfg = RandomProtocolConfig { max_depth: 1, ..Default::default() };
        let tree = random_protocol(&cfg, s.x_support(), &mut rng);
        let ch = InnocentChannel::iid(2, FiniteDist::uniform(["0", "1"])).unwrap();
        let r = equivalence_audit(&tree, &ch, &s, AuditBudget::default()).unwrap();
        prop_assert!(r.passed, "{r:?}");
        let a = compose_run(&tree, &ch, &s, seed, 200).unwrap();
        prop_assert_eq!(&a, &compose_run(&tree, &ch, &s, seed, 200).unwrap());
    }
}
