//! The leaker-hunting game: the group wins when the decoder names the secret
//! and the adversary, who is told the secret, accuses a non-leaker.

use std::collections::BTreeMap;
use std::f64::consts::LOG2_E;

use serde::Serialize;

use crate::leakcode::capacity_term;
use crate::protocol::{
    enumerate, uniform_bits, Leaf, LeakScenario, Node, ProtocolError, ProtocolTree,
};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GameError {
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error("parameters out of range: {0}")]
    Range(String),
}

/// Both guesses after one complete transcript.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decision {
    pub transcript: Vec<String>,
    pub prob: Rational,
    /// The decoder's guess of the secret.
    pub frank: String,
    /// The adversary's accusation for each secret value, in support order.
    pub eve_by_x: Vec<usize>,
    /// `Pr(X = frank, T = t) - max_i Pr(X = frank, L_i = 1, T = t)`.
    pub win: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GameValue {
    pub succ: Rational,
    pub decisions: Vec<Decision>,
}

impl GameValue {
    pub fn frank_guess(&self) -> BTreeMap<Vec<String>, String> {
        self.decisions
            .iter()
            .map(|d| (d.transcript.clone(), d.frank.clone()))
            .collect()
    }

    /// The accusation made when the secret is the decoder's guess.
    pub fn eve_guess(&self, x_support: &[String]) -> BTreeMap<Vec<String>, usize> {
        self.decisions
            .iter()
            .map(|d| {
                let x = x_support.iter().position(|v| *v == d.frank).expect("guess in support");
                (d.transcript.clone(), d.eve_by_x[x])
            })
            .collect()
    }
}

/// `Pr(X = x, T = t)` and `Pr(X = x, L_i = 1, T = t)` for every `x` and `i`.
fn leaf_table(scenario: &LeakScenario, leaf: &Leaf) -> Vec<(Rational, Vec<Rational>)> {
    let mut table =
        vec![(Rational::zero(), vec![Rational::zero(); scenario.n_players()]); scenario.x_support().len()];
    for (o, m) in scenario.outcomes().iter().zip(&leaf.masses) {
        let row = &mut table[o.x];
        row.0 += m;
        for (i, &l) in o.leaks.iter().enumerate() {
            if l {
                row.1[i] += m;
            }
        }
    }
    table
}

/// First index attaining the maximum.
fn argmax<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Option<(usize, &'a Rational)> {
    let mut best: Option<(usize, &Rational)> = None;
    for (i, v) in values.into_iter().enumerate() {
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    best
}

/// Group win mass at one transcript when the decoder guesses `x`.
fn win_at(row: &(Rational, Vec<Rational>)) -> (Rational, usize) {
    match argmax(&row.1) {
        Some((i, v)) => (&row.0 - v, i),
        None => (row.0.clone(), 0),
    }
}

fn decide(scenario: &LeakScenario, leaf: &Leaf, guess: Option<usize>) -> Decision {
    let table = leaf_table(scenario, leaf);
    let wins: Vec<(Rational, usize)> = table.iter().map(win_at).collect();
    let x = guess.unwrap_or_else(|| argmax(wins.iter().map(|w| &w.0)).expect("non-empty support").0);
    Decision {
        transcript: leaf.transcript.clone(),
        prob: leaf.prob(),
        frank: scenario.x_label(x).to_string(),
        eve_by_x: wins.iter().map(|w| w.1).collect(),
        win: wins[x].0.clone(),
    }
}

/// Optimal play for both sides on an enumerated protocol, in exact rationals.
///
/// Ties go to the lowest secret index and the lowest player index.
pub fn succ_of_protocol(
    tree: &ProtocolTree,
    scenario: &LeakScenario,
    budget: usize,
) -> Result<GameValue, GameError> {
    let e = enumerate(tree, scenario, budget)?;
    let decisions: Vec<Decision> = e.leaves.iter().map(|l| decide(scenario, l, None)).collect();
    let succ = decisions.iter().map(|d| &d.win).sum();
    Ok(GameValue { succ, decisions })
}

/// Group win probability when the decoder follows `frank` instead of its best guess.
pub fn succ_with_frank(
    tree: &ProtocolTree,
    scenario: &LeakScenario,
    budget: usize,
    frank: impl Fn(&[String]) -> usize,
) -> Result<Rational, GameError> {
    let e = enumerate(tree, scenario, budget)?;
    Ok(e.leaves
        .iter()
        .map(|l| decide(scenario, l, Some(frank(&l.transcript))).win)
        .sum())
}

/// Largest gain any single-transcript change of the decoder's guess achieves
/// over the implemented strategy; never positive when the strategy is optimal.
pub fn frank_deviation_gain(
    tree: &ProtocolTree,
    scenario: &LeakScenario,
    budget: usize,
) -> Result<Rational, GameError> {
    let e = enumerate(tree, scenario, budget)?;
    let mut gain: Option<Rational> = None;
    for leaf in &e.leaves {
        let best = decide(scenario, leaf, None).win;
        for x in 0..scenario.x_support().len() {
            let g = decide(scenario, leaf, Some(x)).win - &best;
            if gain.as_ref().is_none_or(|v| g > *v) {
                gain = Some(g);
            }
        }
    }
    Ok(gain.unwrap_or_else(Rational::zero))
}

/// Secret uniform on `h` bits and `l` of `n` players leaking, uniformly placed.
pub fn game_scenario(h: u32, l: usize, n: usize) -> Result<LeakScenario, GameError> {
    Ok(LeakScenario::fixed(&uniform_bits(h), l, n)?)
}

/// `1 - (c h + l log(1-c) + l c log e - c) / h`.
pub fn succ_upper_bound(h: f64, l: u64, c: f64) -> Result<f64, GameError> {
    if !(c > 0.0 && c < 1.0) || h.is_nan() || h <= 0.0 || l == 0 {
        return Err(GameError::Range(format!("need 0 < c < 1, h > 0, l >= 1; got c={c}, h={h}, l={l}")));
    }
    let l = l as f64;
    Ok(1.0 - (c * h + l * (1.0 - c).log2() + l * c * LOG2_E - c) / h)
}

/// Smallest [`succ_upper_bound`] over the grid `c = k/(points+1)`, with its `c`.
pub fn best_upper_bound(h: f64, l: u64, points: u32) -> Result<(f64, f64), GameError> {
    let mut best: Option<(f64, f64)> = None;
    for k in 1..=points {
        let c = k as f64 / (points + 1) as f64;
        let v = succ_upper_bound(h, l, c)?;
        if best.is_none_or(|(_, b)| v < b) {
            best = Some((c, v));
        }
    }
    best.ok_or_else(|| GameError::Range("empty grid".into()))
}

/// Limit of the win-probability bound when `h = r · l · log e` and `l` grows: `ln(1+r)/r`.
pub fn asymptotic_upper(r: f64) -> Result<f64, GameError> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(GameError::Range(format!("need r > 0, got {r}")));
    }
    Ok(r.ln_1p() / r)
}

/// Bits per leaker at which the group can still win with probability `p`:
/// `-log(p)/(1-p) - log e`.
pub fn asymptotic_lower_rate(p: &Rational) -> Result<f64, GameError> {
    if !p.is_positive() || *p >= Rational::one() {
        return Err(GameError::Range(format!("need 0 < p < 1, got {p}")));
    }
    Ok(capacity_term(p, &p.complement()))
}

/// Embeds a protocol for an `h`-bit secret into one for an `h_small`-bit
/// secret: player 0 first announces `h - h_small` uniform bits `s`, then all
/// players run the original protocol as if the secret were `x' ‖ s`.
pub fn pad_secret(tree: &ProtocolTree, h: u32, h_small: u32) -> Result<ProtocolTree, GameError> {
    if h_small > h {
        return Err(GameError::Range(format!("h_small={h_small} exceeds h={h}")));
    }
    let pad = uniform_bits(h - h_small);
    let small = uniform_bits(h_small);
    fn specialize(node: &Node, suffix: &str, small: &[String]) -> Node {
        Node {
            speaker: node.speaker,
            alphabet: node.alphabet.clone(),
            p_innocent: node.p_innocent.clone(),
            p_leak: small
                .iter()
                .map(|x| {
                    let law = node.p_leak[&format!("{x}{suffix}")].clone();
                    (x.clone(), law)
                })
                .collect(),
            children: node
                .children
                .iter()
                .map(|(m, c)| (m.clone(), specialize(c, suffix, small)))
                .collect(),
        }
    }
    let Some(r) = &tree.root else {
        return Ok(ProtocolTree::empty());
    };
    if pad.len() == 1 {
        return Ok(ProtocolTree::new(specialize(r, &pad.support()[0], small.support())));
    }
    let mut root = Node::uninformative(0, pad.clone(), small.support());
    for s in pad.support() {
        root.children.insert(s.clone(), specialize(r, s, small.support()));
    }
    Ok(ProtocolTree::new(root))
}

/// A scenario from an explicit joint law of `(X, leaker)` with exactly one leaker.
pub fn single_leaker_scenario(
    x_support: &[String],
    players: usize,
    weights: &[(usize, usize, Rational)],
) -> Result<LeakScenario, GameError> {
    let outcomes = weights
        .iter()
        .map(|(x, leaker, p)| crate::protocol::Outcome {
            x: *x,
            leaks: (0..players).map(|i| i == *leaker).collect(),
            prob: p.clone(),
        })
        .collect();
    Ok(LeakScenario::new(x_support.to_vec(), players, outcomes)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::leakcode::fixed_capacity;
    use crate::protocol::{random_protocol, RandomProtocolConfig, DEFAULT_BUDGET};
    use crate::ratio;
    use crate::seed::rng_from;

    #[test]
    fn empty_protocol_quarter() {
        let s = game_scenario(1, 1, 2).unwrap();
        let v = succ_of_protocol(&ProtocolTree::empty(), &s, DEFAULT_BUDGET).unwrap();
        assert_eq!(v.succ, ratio(1, 4));
    }

    #[test]
    fn single_accusation_example() {
        let xs = vec!["0".to_string(), "1".to_string()];
        let s = single_leaker_scenario(
            &xs,
            2,
            &[(0, 0, ratio(97, 100)), (1, 0, ratio(1, 100)), (1, 1, ratio(2, 100))],
        )
        .unwrap();
        let v = succ_of_protocol(&ProtocolTree::empty(), &s, DEFAULT_BUDGET).unwrap();
        assert_eq!(v.succ, ratio(1, 100));
        assert_eq!(v.decisions[0].frank, "1");
        assert_eq!(v.eve_guess(&xs)[&Vec::new()], 1);
    }

    #[test]
    fn bound_values() {
        assert!((succ_upper_bound(2.0, 1, 0.5).unwrap() - 0.889326).abs() < 1e-6);
        assert!(succ_upper_bound(2.0, 0, 0.5).is_err());
        for k in 1..10 {
            assert!(succ_upper_bound(1.0, 1, k as f64 / 10.0).unwrap() >= 0.25);
        }
        assert!((asymptotic_upper(1.0).unwrap() - std::f64::consts::LN_2).abs() < 1e-12);
        assert!((asymptotic_upper(1e-6).unwrap() - 1.0).abs() < 1e-5);
        let e1 = std::f64::consts::E - 1.0;
        assert!((asymptotic_upper(e1).unwrap() - 1.0 / e1).abs() < 1e-12);
        assert!((asymptotic_upper(e1).unwrap() - 0.581977).abs() < 1e-6);
        assert!(asymptotic_upper(0.0).is_err());
    }

    #[test]
    fn lower_rate_matches_fixed_capacity() {
        assert!((asymptotic_lower_rate(&ratio(1, 2)).unwrap() - 0.557305).abs() < 1e-6);
        assert!((asymptotic_lower_rate(&ratio(1, 4)).unwrap() - 1.223972).abs() < 1e-6);
        assert!(asymptotic_lower_rate(&ratio(999_999, 1_000_000)).unwrap().abs() < 1e-5);
        for k in 1..50 {
            let p = ratio(k, 50);
            assert_eq!(asymptotic_lower_rate(&p).unwrap(), fixed_capacity(&p.complement()).unwrap());
        }
    }

    #[test]
    fn implemented_strategy_is_optimal() {
        let mut rng = rng_from(31);
        let s = game_scenario(2, 1, 2).unwrap();
        let cfg = RandomProtocolConfig {
            full_support: false,
            ..Default::default()
        };
        for _ in 0..30 {
            let t = random_protocol(&cfg, s.x_support(), &mut rng);
            assert!(!frank_deviation_gain(&t, &s, DEFAULT_BUDGET).unwrap().is_positive());
            let v = succ_of_protocol(&t, &s, DEFAULT_BUDGET).unwrap();
            assert!(v.succ >= Rational::zero() && v.succ <= Rational::one());
            let always_first = succ_with_frank(&t, &s, DEFAULT_BUDGET, |_| 0).unwrap();
            assert!(always_first <= v.succ);
        }
    }

    #[test]
    fn padding_never_lowers_the_value() {
        let mut rng = rng_from(5);
        let big = game_scenario(2, 1, 3).unwrap();
        let small = game_scenario(1, 1, 3).unwrap();
        let cfg = RandomProtocolConfig {
            players: 3,
            full_support: false,
            ..Default::default()
        };
        for _ in 0..20 {
            let t = random_protocol(&cfg, big.x_support(), &mut rng);
            let padded = pad_secret(&t, 2, 1).unwrap();
            let a = succ_of_protocol(&t, &big, DEFAULT_BUDGET).unwrap().succ;
            let b = succ_of_protocol(&padded, &small, DEFAULT_BUDGET).unwrap().succ;
            assert!(a <= b, "{a} > {b}");
        }
    }

    #[test]
    fn best_bound_grid() {
        let (c, v) = best_upper_bound(2.0, 1, 99).unwrap();
        assert!(c > 0.0 && c < 1.0);
        for k in 1..100 {
            assert!(v <= succ_upper_bound(2.0, 1, k as f64 / 100.0).unwrap());
        }
    }
}
