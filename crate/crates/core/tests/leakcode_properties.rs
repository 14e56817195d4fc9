use cryptogen::leakcode::{
    fixed_capacity, indep_capacity, ml_decode, random_codebook, ratio_bound_check, WindowChannel,
    DEFAULT_SYMBOL_BUDGET,
};
use cryptogen::{ratio, Rational};
use proptest::prelude::*;

fn pair() -> impl Strategy<Value = (Rational, Rational)> {
    (3i64..=12)
        .prop_flat_map(|den| (Just(den), 1..den - 1))
        .prop_flat_map(|(den, bn)| (Just(den), Just(bn), bn + 1..den))
        .prop_map(|(den, bn, cn)| (ratio(bn, den), ratio(cn, den)))
}

proptest! {
    #[test]
    fn window_identity_and_posterior((b, c) in pair()) {
        let ch = WindowChannel::new(b.clone(), c.clone()).unwrap();
        let a = Rational::from_integer(ch.a());
        let d = Rational::from_integer(ch.d());
        prop_assert_eq!(&b / &a + b.complement() / &d, &b / (&a * &c));
        for x in 1..=ch.d().min(40) {
            for m in 1..=ch.d().min(40) {
                let p = ch.posterior_leak(m, x);
                prop_assert!(p.is_zero() || p == c);
            }
        }
    }

    #[test]
    fn window_information_is_the_capacity((b, c) in pair()) {
        prop_assume!(WindowChannel::new(b.clone(), c.clone()).unwrap().d() <= 200);
        let mi = WindowChannel::new(b.clone(), c.clone()).unwrap().one_shot_information();
        prop_assert!((mi - indep_capacity(&b, &c).unwrap()).abs() <= 1e-9);
    }

    #[test]
    fn ratio_never_exceeds_two(n in 2u64..=120, l in 1u64..120) {
        prop_assume!(l < n);
        let r = ratio_bound_check(n, l).unwrap();
        prop_assert!(r.within_two);
        prop_assert_eq!(r.argmax, l);
    }

    #[test]
    fn decoding_a_clean_codeword(seed in any::<u64>()) {
        // with every player leaking, every symbol lands in the codeword's window
        let ch = WindowChannel::new(ratio(1, 2), ratio(2, 3)).unwrap();
        let book = random_codebook(4, 40, ch.d(), seed, DEFAULT_SYMBOL_BUDGET).unwrap();
        let j = (seed % 16) as usize;
        let word = book.codeword(j);
        let sent: Vec<u64> = word.iter().map(|&x| ch.window(x)[0]).collect();
        prop_assert_eq!(ml_decode(&book, &sent, &ch), Ok(j));
    }
}

#[test]
fn capacities_are_monotone_in_c() {
    for bn in [1, 10, 50, 100] {
        let b = ratio(bn, 200);
        let mut last = 0.0;
        for cn in bn + 1..200 {
            let v = indep_capacity(&b, &ratio(cn, 200)).unwrap();
            assert!(v >= last - 1e-12, "indep not monotone at b={b}, c={cn}/200");
            last = v;
        }
    }
    let mut last = 0.0;
    for cn in 1..200 {
        let v = fixed_capacity(&ratio(cn, 200)).unwrap();
        assert!(v >= last - 1e-12);
        last = v;
    }
}

#[test]
fn sparse_leaking_approaches_fixed_capacity() {
    for cn in [1, 3, 5, 9] {
        let c = ratio(cn, 10);
        let target = fixed_capacity(&c).unwrap();
        let mut gaps = Vec::new();
        for k in [2, 3, 4, 5, 6] {
            let eps = ratio(1, 10i64.pow(k));
            gaps.push((indep_capacity(&eps, &c).unwrap() / eps.to_f64() - target).abs());
        }
        assert!(gaps.windows(2).all(|g| g[1] < g[0]), "{gaps:?}");
        assert!(gaps[4] < 1e-4, "{gaps:?}");
    }
}
