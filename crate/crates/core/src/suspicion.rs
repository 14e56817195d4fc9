//! Suspicion: the surprisal of "this player did not know the secret", and the
//! bounds that tie leaked information to expected growth in suspicion.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::prob::{self, ExtendedReal, JointDist, ProbError};
use crate::protocol::{
    enumerate, leak_axis, LeakScenario, ProtocolError, ProtocolTree, DEFAULT_BUDGET,
    TRANSCRIPT_AXIS,
};
use crate::Rational;

/// Float tolerance used by certificate checks.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SuspicionError {
    #[error(transparent)]
    Prob(#[from] ProbError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error("model violation: {0}")]
    ModelViolation(String),
    #[error("parameters out of range: {0}")]
    Range(String),
}

/// `lhs ≤ rhs` with `slack = rhs - lhs`; `equality` is decided exactly.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SuspicionCertificate {
    pub lhs_bits: ExtendedReal,
    pub rhs_bits: ExtendedReal,
    pub slack: ExtendedReal,
    pub equality: bool,
}

impl SuspicionCertificate {
    fn new(lhs: ExtendedReal, rhs: ExtendedReal, equality: bool) -> Self {
        let slack = match (lhs, rhs) {
            (ExtendedReal::PosInf, ExtendedReal::PosInf) => ExtendedReal::ZERO,
            (ExtendedReal::PosInf, ExtendedReal::Finite(_)) => ExtendedReal::Finite(f64::NEG_INFINITY),
            (ExtendedReal::Finite(l), r) => r - l,
        };
        SuspicionCertificate {
            lhs_bits: lhs,
            rhs_bits: rhs,
            slack,
            equality,
        }
    }

    /// The inequality holds within [`TOLERANCE`], and a claimed equality is tight.
    pub fn holds(&self) -> bool {
        let ok = self.slack >= ExtendedReal::Finite(-TOLERANCE);
        let tight = !self.equality || self.slack.finite().is_some_and(|s| s.abs() <= TOLERANCE);
        ok && tight
    }
}

/// Expected suspicion from `(mass of y, mass of y with L = 0)` pairs.
///
/// Zero-mass groups are skipped; a positive-mass group with no innocent mass makes the result `+∞`.
pub fn expected_suspicion_from_groups<'a>(
    groups: impl IntoIterator<Item = (&'a Rational, &'a Rational)>,
) -> ExtendedReal {
    let mut total = Rational::zero();
    let mut acc = 0.0;
    let mut parts = Vec::new();
    for (all, innocent) in groups {
        if all.is_zero() {
            continue;
        }
        if innocent.is_zero() {
            return ExtendedReal::PosInf;
        }
        total += all;
        parts.push((all, innocent));
    }
    for (all, innocent) in parts {
        let w = (all / &total).to_f64();
        acc += w * (all.log2() - innocent.log2());
    }
    ExtendedReal::Finite(acc)
}

/// `-log2 Pr(L = 0 | Y = y)` for the named leak axis and conditioning event.
pub fn suspicion_point(
    j: &JointDist,
    leak_axis: &str,
    conditioning: &[(&str, &str)],
) -> Result<ExtendedReal, SuspicionError> {
    let all = j.prob_of(conditioning)?;
    if all.is_zero() {
        return Err(ProbError::ZeroProbabilityEvent(format!("{conditioning:?}")).into());
    }
    let mut event = conditioning.to_vec();
    event.push((leak_axis, "0"));
    let innocent = j.prob_of(&event)?;
    Ok(ExtendedReal::surprisal(&(innocent / all)))
}

fn grouped(
    j: &JointDist,
    leak_axis: &str,
    cond_axes: &[&str],
) -> Result<BTreeMap<Vec<String>, (Rational, Rational)>, ProbError> {
    let leak = j.axis_index(leak_axis)?;
    let idx: Vec<usize> = cond_axes
        .iter()
        .map(|a| j.axis_index(a))
        .collect::<Result<_, _>>()?;
    let mut groups: BTreeMap<Vec<String>, (Rational, Rational)> = BTreeMap::new();
    for (key, p) in j.cells() {
        let y: Vec<String> = idx.iter().map(|&i| key[i].clone()).collect();
        let e = groups
            .entry(y)
            .or_insert_with(|| (Rational::zero(), Rational::zero()));
        e.0 += p;
        if key[leak] == "0" {
            e.1 += p;
        }
    }
    Ok(groups)
}

/// `susp(Y) = E_y susp(Y = y)` with `Y` the tuple of `cond_axes`.
pub fn expected_suspicion(
    j: &JointDist,
    leak_axis: &str,
    cond_axes: &[&str],
) -> Result<ExtendedReal, SuspicionError> {
    let groups = grouped(j, leak_axis, cond_axes)?;
    Ok(expected_suspicion_from_groups(groups.values().map(|(a, b)| (a, b))))
}

fn concat<'a>(a: &[&'a str], b: &[&'a str]) -> Vec<&'a str> {
    a.iter().chain(b).copied().collect()
}

/// `susp(X, A) - susp(X)`, infinite as soon as either side is.
fn suspicion_increase(
    j: &JointDist,
    leak_axis: &str,
    before: &[&str],
    after: &[&str],
) -> Result<ExtendedReal, SuspicionError> {
    let s0 = expected_suspicion(j, leak_axis, before)?;
    let s1 = expected_suspicion(j, leak_axis, after)?;
    Ok(match (s0, s1) {
        (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => ExtendedReal::Finite(b - a),
        _ => ExtendedReal::PosInf,
    })
}

/// Information a single sender's message carries about the secret, against
/// the sender's expected increase in suspicion given the secret.
///
/// Requires that a non-leaking sender's message is independent of `X`.
/// Equality is certified exactly: the law of the message must equal its law
/// given `L = 0`.
pub fn check_message(
    j: &JointDist,
    x_axis: &str,
    leak_axis: &str,
    msg_axis: &str,
) -> Result<SuspicionCertificate, SuspicionError> {
    let quiet = j.prob_of(&[(leak_axis, "0")])?;
    let innocent_law = if quiet.is_positive() {
        let law = j.condition(&[(leak_axis, "0")])?.law(msg_axis)?;
        for (xs, _) in j.values_of(&[x_axis])? {
            let x = xs[0].as_str();
            if j.prob_of(&[(x_axis, x), (leak_axis, "0")])?.is_zero() {
                continue;
            }
            let given_x = j.condition(&[(x_axis, x), (leak_axis, "0")])?.law(msg_axis)?;
            if !given_x.same_law(&law) {
                return Err(SuspicionError::ModelViolation(format!(
                    "non-leaker's message depends on {x_axis}={x}"
                )));
            }
        }
        Some(law)
    } else {
        None
    };
    let lhs = prob::mutual_information(j, &[x_axis], &[msg_axis])?;
    let rhs = suspicion_increase(j, leak_axis, &[x_axis], &[x_axis, msg_axis])?;
    let equality = !rhs.is_infinite()
        && innocent_law.is_some_and(|law| law.same_law(&j.law(msg_axis).expect("axis checked")));
    Ok(SuspicionCertificate::new(ExtendedReal::Finite(lhs), rhs, equality))
}

/// [`check_message`] on a joint with axes `X`, `L`, `A`.
pub fn check_single_message(j: &JointDist) -> Result<SuspicionCertificate, SuspicionError> {
    check_message(j, "X", "L", "A")
}

/// `susp(Y) ≤ susp(Y, B)`: hearing more never lowers expected suspicion.
///
/// Equality holds exactly when, for every `y`, `Pr(L = 0 | y, b)` does not depend on `b`.
pub fn check_listener_monotone(
    j: &JointDist,
    leak_axis: &str,
    y_axes: &[&str],
    b_axes: &[&str],
) -> Result<SuspicionCertificate, SuspicionError> {
    let yb = concat(y_axes, b_axes);
    let lhs = expected_suspicion(j, leak_axis, y_axes)?;
    let rhs = expected_suspicion(j, leak_axis, &yb)?;
    let fine = grouped(j, leak_axis, &yb)?;
    let mut ratio_by_y: BTreeMap<Vec<String>, Rational> = BTreeMap::new();
    let mut equality = true;
    for (key, (all, innocent)) in fine {
        if all.is_zero() {
            continue;
        }
        let y = key[..y_axes.len()].to_vec();
        let r = innocent / all;
        match ratio_by_y.get(&y) {
            Some(prev) if *prev != r => equality = false,
            Some(_) => {}
            None => {
                ratio_by_y.insert(y, r);
            }
        }
    }
    Ok(SuspicionCertificate::new(lhs, rhs, equality))
}

/// Certificate for one round of a protocol, conditional on the prefix that reaches it.
#[derive(Clone, Debug, Serialize)]
pub struct RoundCheck {
    pub prefix: Vec<String>,
    pub speaker: usize,
    /// `I(X; T_k | t) ≤ susp_speaker(X, T_k | t) - susp_speaker(X | t)`.
    pub speaker_bound: SuspicionCertificate,
    /// For every other player: suspicion does not drop in expectation.
    pub listeners: Vec<(usize, SuspicionCertificate)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TranscriptCertificate {
    /// `I(X; T) ≤ Σ_i (susp_i(X, T) - susp_i(X))`.
    pub total: SuspicionCertificate,
    pub per_player_increase: Vec<ExtendedReal>,
    pub rounds: Vec<RoundCheck>,
    /// `Σ_t Pr(t) I(X; T_k | t)` over all rounds, which should equal `I(X; T)`.
    pub chain_rule_sum: f64,
}

impl TranscriptCertificate {
    pub fn holds(&self) -> bool {
        self.total.holds()
            && self.rounds.iter().all(|r| {
                r.speaker_bound.holds() && r.listeners.iter().all(|(_, c)| c.holds())
            })
    }
}

const MSG_AXIS: &str = "A";

fn round_joint(
    scenario: &LeakScenario,
    branches: &[(String, Vec<Rational>)],
) -> Result<JointDist, ProbError> {
    let mut axes = scenario.axes();
    axes.push(MSG_AXIS.to_string());
    let cells = branches.iter().flat_map(|(m, masses)| {
        scenario
            .outcomes()
            .iter()
            .zip(masses)
            .map(move |(o, p)| {
                let mut key = scenario.outcome_key(o);
                key.push(m.clone());
                (key, p.clone())
            })
    });
    JointDist::from_weights(axes, cells)
}

/// Checks the whole-transcript bound and its per-round decomposition by exact enumeration.
pub fn check_transcript_bound(
    tree: &ProtocolTree,
    scenario: &LeakScenario,
    budget: usize,
) -> Result<TranscriptCertificate, SuspicionError> {
    tree.ensure_valid_for(scenario)?;
    let e = enumerate(tree, scenario, budget)?;
    let j = e.joint(scenario);
    let lhs = prob::mutual_information(&j, &["X"], &[TRANSCRIPT_AXIS])?;
    let mut per_player = Vec::with_capacity(scenario.n_players());
    for i in 0..scenario.n_players() {
        per_player.push(suspicion_increase(&j, &leak_axis(i), &["X"], &["X", TRANSCRIPT_AXIS])?);
    }
    let rhs = per_player
        .iter()
        .fold(ExtendedReal::ZERO, |acc, v| acc + *v);

    let mut rounds = Vec::with_capacity(e.nodes.len());
    let mut chain_rule_sum = 0.0;
    for node in &e.nodes {
        let reach: Rational = node.masses.iter().sum();
        if reach.is_zero() {
            continue;
        }
        let rj = round_joint(scenario, &node.branches)?;
        let speaker_axis = leak_axis(node.speaker);
        let speaker_bound = check_message(&rj, "X", &speaker_axis, MSG_AXIS)?;
        chain_rule_sum += reach.to_f64() * speaker_bound.lhs_bits.to_f64();
        let listeners = (0..scenario.n_players())
            .filter(|&i| i != node.speaker)
            .map(|i| {
                check_listener_monotone(&rj, &leak_axis(i), &["X"], &[MSG_AXIS]).map(|c| (i, c))
            })
            .collect::<Result<Vec<_>, _>>()?;
        rounds.push(RoundCheck {
            prefix: node.prefix.clone(),
            speaker: node.speaker,
            speaker_bound,
            listeners,
        });
    }
    let equality = !rhs.is_infinite()
        && rounds.iter().all(|r| {
            r.speaker_bound.equality && r.listeners.iter().all(|(_, c)| c.equality)
        });
    Ok(TranscriptCertificate {
        total: SuspicionCertificate::new(ExtendedReal::Finite(lhs), rhs, equality),
        per_player_increase: per_player,
        rounds,
        chain_rule_sum,
    })
}

/// `(-b log(1-c) + c log(1-b)) / c · n`: the most a protocol can leak when every
/// player starts at leak probability `b` and never exceeds `c` given the secret.
pub fn general_upper_bound(b: &Rational, c: &Rational, n: u64) -> Result<f64, SuspicionError> {
    if !b.is_positive() || b > c || *c >= Rational::one() {
        return Err(SuspicionError::Range(format!("need 0 < b <= c < 1, got b={b}, c={c}")));
    }
    let (bf, cf) = (b.to_f64(), c.to_f64());
    let per_player = (-bf * c.complement().log2() + cf * b.complement().log2()) / cf;
    Ok(per_player * n as f64)
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneralBoundCheck {
    /// `Pr(L_i=1 | X=x) = b` for every player and secret.
    pub uniform_prior: bool,
    /// `Pr(L_i=1 | T=t, X=x) ≤ c` on every complete transcript.
    pub capped_posterior: bool,
    pub leaked_bits: f64,
    pub bound_bits: f64,
    pub holds: bool,
}

/// Verifies the premises of [`general_upper_bound`] on an enumerated protocol and compares.
pub fn check_general_bound(
    tree: &ProtocolTree,
    scenario: &LeakScenario,
    b: &Rational,
    c: &Rational,
) -> Result<GeneralBoundCheck, SuspicionError> {
    let bound_bits = general_upper_bound(b, c, scenario.n_players() as u64)?;
    let prior = scenario.prior_masses();
    let nx = scenario.x_support().len();
    let uniform_prior = (0..nx).all(|x| {
        (0..scenario.n_players()).all(|i| {
            crate::protocol::leak_posterior(scenario, &prior, x, i).as_ref() == Some(b)
        })
    });
    let e = enumerate(tree, scenario, DEFAULT_BUDGET)?;
    let capped_posterior = e.leaves.iter().all(|leaf| {
        (0..nx).all(|x| {
            (0..scenario.n_players()).all(|i| {
                crate::protocol::leak_posterior(scenario, &leaf.masses, x, i)
                    .is_none_or(|p| p <= *c)
            })
        })
    });
    let leaked_bits = prob::mutual_information(&e.joint(scenario), &["X"], &[TRANSCRIPT_AXIS])?;
    Ok(GeneralBoundCheck {
        uniform_prior,
        capped_posterior,
        leaked_bits,
        bound_bits,
        holds: leaked_bits <= bound_bits + TOLERANCE,
    })
}

/// `-log(1-q) ≤ (-log(1-c)/c) · q` for `0 ≤ q ≤ c < 1`.
pub fn concave_cap_holds(q: &Rational, c: &Rational) -> bool {
    let lhs = -q.complement().log2();
    let rhs = -c.complement().log2() / c.to_f64() * q.to_f64();
    lhs <= rhs + TOLERANCE
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{Node, ProtocolTree};
    use crate::{ratio, FiniteDist};

    fn joint(axes: &[&str], cells: &[(&[&str], (i64, i64))]) -> JointDist {
        JointDist::new(
            axes.iter().map(|s| s.to_string()).collect(),
            cells
                .iter()
                .map(|(k, p)| (k.iter().map(|s| s.to_string()).collect(), ratio(p.0, p.1))),
        )
        .unwrap()
    }

    #[test]
    fn point_values() {
        let j = joint(
            &["L", "Y"],
            &[
                (&["0", "a"], (1, 4)),
                (&["0", "b"], (1, 8)),
                (&["1", "b"], (3, 8)),
                (&["0", "c"], (1, 8)),
                (&["1", "c"], (1, 8)),
            ],
        );
        assert_eq!(suspicion_point(&j, "L", &[("Y", "a")]).unwrap(), ExtendedReal::Finite(0.0));
        assert_eq!(suspicion_point(&j, "L", &[("Y", "c")]).unwrap(), ExtendedReal::Finite(1.0));
        assert_eq!(suspicion_point(&j, "L", &[("Y", "b")]).unwrap(), ExtendedReal::Finite(2.0));
        assert!(suspicion_point(&j, "L", &[("Y", "z")]).is_err());
    }

    #[test]
    fn expectations() {
        let indep = joint(
            &["L", "Y"],
            &[(&["0", "a"], (1, 4)), (&["1", "a"], (1, 4)), (&["0", "b"], (1, 4)), (&["1", "b"], (1, 4))],
        );
        assert_eq!(expected_suspicion(&indep, "L", &["Y"]).unwrap(), ExtendedReal::Finite(1.0));
        let reveal = joint(&["L", "Y"], &[(&["0", "0"], (1, 2)), (&["1", "1"], (1, 2))]);
        assert!(expected_suspicion(&reveal, "L", &["Y"]).unwrap().is_infinite());
        // c_y = 0 and c_y = 1/2, equally likely
        let mix = joint(
            &["L", "Y"],
            &[(&["0", "a"], (1, 2)), (&["0", "b"], (1, 4)), (&["1", "b"], (1, 4))],
        );
        assert_eq!(expected_suspicion(&mix, "L", &["Y"]).unwrap(), ExtendedReal::Finite(0.5));
        assert!(matches!(
            expected_suspicion(&mix, "L", &["Q"]),
            Err(SuspicionError::Prob(ProbError::UnknownAxis(_)))
        ));
    }

    #[test]
    fn independent_message_is_tight_at_zero() {
        let mut cells = Vec::new();
        for x in ["0", "1"] {
            for l in ["0", "1"] {
                for a in ["p", "q"] {
                    cells.push((vec![x.to_string(), l.to_string(), a.to_string()], ratio(1, 8)));
                }
            }
        }
        let j = JointDist::new(vec!["X".into(), "L".into(), "A".into()], cells).unwrap();
        let c = check_single_message(&j).unwrap();
        assert!(c.equality && c.holds());
        assert!(c.lhs_bits.to_f64().abs() < 1e-12 && c.rhs_bits.to_f64().abs() < 1e-12);
    }

    /// Window channel with b=1/2, c=2/3: a=1, d=2, X uniform on {1,2}.
    fn window_joint() -> JointDist {
        let mut cells = Vec::new();
        for x in ["1", "2"] {
            for a in ["1", "2"] {
                cells.push((vec![x.into(), "0".into(), a.into()], ratio(1, 8)));
            }
            cells.push((vec![x.into(), "1".into(), x.into()], ratio(1, 4)));
        }
        JointDist::new(vec!["X".into(), "L".into(), "A".into()], cells).unwrap()
    }

    #[test]
    fn window_channel_meets_the_bound() {
        let c = check_single_message(&window_joint()).unwrap();
        let expected = 1.0 - (-(0.25f64) * 0.25f64.log2() - 0.75 * 0.75f64.log2());
        assert!((c.lhs_bits.to_f64() - expected).abs() < 1e-9);
        assert!((c.rhs_bits.to_f64() - expected).abs() < 1e-9);
        assert!((expected - 0.188722).abs() < 1e-6);
        assert!(c.equality && c.holds());
    }

    #[test]
    fn strict_cases() {
        // leaker says X, non-leaker says "none"
        let mut cells = Vec::new();
        for x in ["0", "1"] {
            cells.push((vec![x.to_string(), "0".into(), "none".into()], ratio(1, 4)));
            cells.push((vec![x.to_string(), "1".into(), x.to_string()], ratio(1, 4)));
        }
        let j = JointDist::new(vec!["X".into(), "L".into(), "A".into()], cells).unwrap();
        let c = check_single_message(&j).unwrap();
        assert!(c.rhs_bits.is_infinite() && !c.equality && c.holds());

        // leaker says X w.p. 1/10, else "none"
        let mut cells = Vec::new();
        for x in ["0", "1"] {
            cells.push((vec![x.to_string(), "0".into(), "none".into()], ratio(1, 4)));
            cells.push((vec![x.to_string(), "1".into(), "none".into()], ratio(9, 40)));
            cells.push((vec![x.to_string(), "1".into(), x.to_string()], ratio(1, 40)));
        }
        let j = JointDist::new(vec!["X".into(), "L".into(), "A".into()], cells).unwrap();
        let c = check_single_message(&j).unwrap();
        assert!(c.rhs_bits.is_infinite() && !c.equality);

        // leaker mixes 9/10 toward the non-leaker law (uniform over two symbols)
        let mut cells = Vec::new();
        for x in ["0", "1"] {
            for a in ["0", "1"] {
                cells.push((vec![x.to_string(), "0".into(), a.to_string()], ratio(1, 8)));
                let w = if a == x { ratio(11, 20) } else { ratio(9, 20) };
                cells.push((vec![x.to_string(), "1".into(), a.to_string()], w * ratio(1, 4)));
            }
        }
        let j = JointDist::new(vec!["X".into(), "L".into(), "A".into()], cells).unwrap();
        let c = check_single_message(&j).unwrap();
        assert!(!c.rhs_bits.is_infinite());
        assert!(c.equality, "A is still uniform, so the bound is tight");
        assert!(c.holds());
    }

    #[test]
    fn model_violation_is_reported() {
        let j = joint(
            &["X", "L", "A"],
            &[(&["0", "0", "0"], (1, 2)), (&["1", "0", "1"], (1, 2))],
        );
        assert!(matches!(
            check_single_message(&j),
            Err(SuspicionError::ModelViolation(_))
        ));
    }

    #[test]
    fn listener_cases() {
        let indep = joint(
            &["L", "Y", "B"],
            &[
                (&["0", "y", "0"], (1, 4)),
                (&["0", "y", "1"], (1, 4)),
                (&["1", "y", "0"], (1, 4)),
                (&["1", "y", "1"], (1, 4)),
            ],
        );
        let c = check_listener_monotone(&indep, "L", &["Y"], &["B"]).unwrap();
        assert!(c.equality && c.holds());
        let reveal = joint(&["L", "Y", "B"], &[(&["0", "y", "0"], (1, 2)), (&["1", "y", "1"], (1, 2))]);
        let c = check_listener_monotone(&reveal, "L", &["Y"], &["B"]).unwrap();
        assert_eq!(c.lhs_bits, ExtendedReal::Finite(1.0));
        assert!(c.rhs_bits.is_infinite() && !c.equality && c.holds());
    }

    #[test]
    fn empty_protocol_certificate() {
        let s = LeakScenario::indep(&crate::protocol::uniform_bits(1), 2, &ratio(1, 2)).unwrap();
        let c = check_transcript_bound(&ProtocolTree::empty(), &s, DEFAULT_BUDGET).unwrap();
        assert!(c.total.equality && c.holds());
        assert_eq!(c.total.rhs_bits, ExtendedReal::Finite(0.0));
    }

    #[test]
    fn general_bound_values() {
        assert!(general_upper_bound(&ratio(1, 3), &ratio(1, 3), 5).unwrap().abs() < 1e-12);
        let v = general_upper_bound(&ratio(1, 2), &ratio(2, 3), 3).unwrap();
        assert!((v - 0.566166).abs() < 1e-6);
        let direct = 10.0 * (-0.1 * 0.5f64.log2() + 0.5 * 0.9f64.log2()) / 0.5;
        let v = general_upper_bound(&ratio(1, 10), &ratio(1, 2), 10).unwrap();
        assert!((v - direct).abs() < 1e-9);
        assert!((v - 0.480).abs() < 1e-3);
        assert!(general_upper_bound(&ratio(2, 3), &ratio(1, 2), 1).is_err());
    }

    #[test]
    fn general_bound_on_window_protocol() {
        // one player, b=1/10, c=1/2: a/d = (1/10 · 1/2)/(1/2 · 9/10) = 1/9
        let xs: Vec<String> = (1..=9).map(|v| v.to_string()).collect();
        let x = FiniteDist::uniform(xs.clone());
        let s = LeakScenario::indep(&x, 1, &ratio(1, 10)).unwrap();
        let leak = xs.iter().enumerate().map(|(i, v)| (v.clone(), FiniteDist::point(xs.clone(), i)));
        let t = ProtocolTree::new(Node::new(0, x.clone(), leak));
        let chk = check_general_bound(&t, &s, &ratio(1, 10), &ratio(1, 2)).unwrap();
        assert!(chk.uniform_prior && chk.capped_posterior && chk.holds);
        assert!((chk.leaked_bits - chk.bound_bits).abs() < 1e-9);
    }

    #[test]
    fn concave_cap_grid() {
        for c in [ratio(1, 10), ratio(1, 2), ratio(9, 10)] {
            for k in 0..=10 {
                assert!(concave_cap_holds(&(&c * ratio(k, 10)), &c));
            }
        }
    }
}
