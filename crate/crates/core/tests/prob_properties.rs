use cryptogen::prob::{cross_entropy_gap, mutual_information};
use cryptogen::{ExtendedReal, FiniteDist, JointDist, Rational};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn axis(i: usize) -> String {
    format!("V{i}")
}

/// Weights laid out in mixed radix over the axis sizes; `None` when all are zero.
fn build(sizes: &[usize], weights: &[u32]) -> Option<JointDist> {
    if weights.iter().all(|&w| w == 0) {
        return None;
    }
    let axes: Vec<String> = (0..sizes.len()).map(axis).collect();
    let cells = weights.iter().enumerate().map(|(mut idx, &w)| {
        let mut key = Vec::with_capacity(sizes.len());
        for &s in sizes {
            key.push(format!("v{}", idx % s));
            idx /= s;
        }
        (key, Rational::from(w))
    });
    Some(JointDist::from_weights(axes, cells).unwrap())
}

fn joint() -> impl Strategy<Value = JointDist> {
    prop::collection::vec(1usize..=3, 1..=4)
        .prop_flat_map(|sizes| {
            let n: usize = sizes.iter().product();
            (Just(sizes), prop::collection::vec(0u32..6, n))
        })
        .prop_filter_map("all-zero weights", |(s, w)| build(&s, &w))
}

/// `H(B | A)` as the average of conditional entropies.
fn conditional_entropy(j: &JointDist, given: &[&str], of: &[&str]) -> f64 {
    if given.is_empty() {
        return j.entropy_of(of).unwrap();
    }
    j.values_of(given)
        .unwrap()
        .into_iter()
        .map(|(vals, p)| {
            let event: Vec<(&str, &str)> = given.iter().copied().zip(vals.iter().map(String::as_str)).collect();
            p.to_f64() * j.condition(&event).unwrap().entropy_of(of).unwrap()
        })
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn chain_rule(j in joint()) {
        let names: Vec<String> = j.axes().to_vec();
        let names: Vec<&str> = names.iter().map(String::as_str).collect();
        let total = j.entropy_of(&names).unwrap();
        let summed: f64 = (0..names.len())
            .map(|k| conditional_entropy(&j, &names[..k], &names[k..=k]))
            .sum();
        prop_assert!((total - summed).abs() <= TOL, "{total} vs {summed}");
    }
}

proptest! {
    #[test]
    fn information_is_nonnegative_and_splits(j in joint()) {
        let names: Vec<String> = j.axes().to_vec();
        let names: Vec<&str> = names.iter().map(String::as_str).collect();
        let (a, b) = names.split_at(1);
        if !b.is_empty() {
            prop_assert!(mutual_information(&j, a, b).unwrap() >= -1e-12);
        }
        let h_ab = j.entropy_of(&names).unwrap();
        let h_a = j.entropy_of(a).unwrap();
        let h_b_given_a = if b.is_empty() { 0.0 } else { conditional_entropy(&j, a, b) };
        prop_assert!((h_ab - h_a - h_b_given_a).abs() <= TOL);
    }

    #[test]
    fn marginal_and_condition_commute(j in joint()) {
        let names: Vec<String> = j.axes().to_vec();
        let names: Vec<&str> = names.iter().map(String::as_str).collect();
        let kept: Vec<&str> = std::iter::once(names[0]).chain(names.iter().skip(2).copied()).collect();
        let value = j.values_of(&names[..1]).unwrap()[0].0[0].clone();
        let event = [(names[0], value.as_str())];
        let one = j.marginal(&kept).unwrap().condition(&event).unwrap();
        let other = j.condition(&event).unwrap().marginal(&kept).unwrap();
        prop_assert_eq!(one.values_of(&kept).unwrap(), other.values_of(&kept).unwrap());
    }

    #[test]
    fn gap_vanishes_exactly_on_equal_laws(
        p in prop::collection::vec(0u32..4, 3),
        q in prop::collection::vec(0u32..4, 3),
    ) {
        prop_assume!(p.iter().any(|&w| w > 0) && q.iter().any(|&w| w > 0));
        let labels: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let dist = |w: &[u32]| FiniteDist::from_weights(labels.clone(), w.iter().map(|&v| Rational::from(v)).collect()).unwrap();
        let (p, q) = (dist(&p), dist(&q));
        let gap = cross_entropy_gap(&p, &q).unwrap();
        prop_assert_eq!(gap == ExtendedReal::ZERO, p.same_law(&q));
        prop_assert!(gap >= ExtendedReal::ZERO);
    }
}
