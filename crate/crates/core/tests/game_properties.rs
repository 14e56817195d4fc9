use cryptogen::game::{
    asymptotic_lower_rate, frank_deviation_gain, game_scenario, pad_secret, succ_of_protocol, succ_upper_bound,
};
use cryptogen::leakcode::fixed_capacity;
use cryptogen::protocol::{random_protocol, RandomProtocolConfig, DEFAULT_BUDGET};
use cryptogen::seed::rng_from;
use cryptogen::{ratio, Rational};
use proptest::prelude::*;

fn cfg(players: usize) -> RandomProtocolConfig {
    RandomProtocolConfig {
        players,
        full_support: false,
        ..Default::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn value_is_optimal_and_bounded(seed in any::<u64>(), n in 2usize..=3) {
        let mut rng = rng_from(seed);
        let s = game_scenario(2, 1, n).unwrap();
        let t = random_protocol(&cfg(n), s.x_support(), &mut rng);
        let succ = succ_of_protocol(&t, &s, DEFAULT_BUDGET).unwrap().succ;
        prop_assert!(succ >= Rational::zero() && succ <= Rational::one());
        prop_assert!(!frank_deviation_gain(&t, &s, DEFAULT_BUDGET).unwrap().is_positive());
        for k in 1..=99 {
            prop_assert!(succ.to_f64() <= succ_upper_bound(2.0, 1, f64::from(k) / 100.0).unwrap() + 1e-12);
        }
    }

    #[test]
    fn longer_secrets_are_harder(seed in any::<u64>()) {
        let mut rng = rng_from(seed);
        let big = game_scenario(2, 1, 2).unwrap();
        let small = game_scenario(1, 1, 2).unwrap();
        let t = random_protocol(&cfg(2), big.x_support(), &mut rng);
        let padded = pad_secret(&t, 2, 1).unwrap();
        prop_assert!(
            succ_of_protocol(&t, &big, DEFAULT_BUDGET).unwrap().succ
                <= succ_of_protocol(&padded, &small, DEFAULT_BUDGET).unwrap().succ
        );
    }

    #[test]
    fn lower_rate_is_fixed_capacity(k in 1i64..1000) {
        let p = ratio(k, 1000);
        prop_assert_eq!(asymptotic_lower_rate(&p).unwrap(), fixed_capacity(&p.complement()).unwrap());
    }
}
