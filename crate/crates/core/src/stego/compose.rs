use std::collections::BTreeMap;

use serde::Serialize;

use super::{
    embed_leaker_step, f_cell, f_partition, g_partition, interpret_step, node_at, InnocentChannel,
    InterpreterState, StegoError,
};
use crate::protocol::{enumerate, sample, LeakScenario, Node, ProtocolTree, DEFAULT_BUDGET};
use crate::seed::rng_from;
use crate::{FiniteDist, Rational};

fn check_inputs(
    tree: &ProtocolTree,
    channel: &InnocentChannel,
    scenario: &LeakScenario,
) -> Result<(), StegoError> {
    tree.ensure_valid_for(scenario)?;
    if !tree.non_revealing() {
        return Err(StegoError::Revealing("some leaker message is impossible for a non-leaker".into()));
    }
    if channel.players() < scenario.n_players() {
        return Err(StegoError::Invalid(format!(
            "channel has {} players, scenario {}",
            channel.players(),
            scenario.n_players()
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InnocentMessage {
    pub round: usize,
    pub player: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComposeRun {
    pub x: String,
    pub leaks: Vec<bool>,
    pub innocent: Vec<InnocentMessage>,
    /// `None` when the embedded transcript is still incomplete after `max_rounds`.
    pub decoded: Option<Vec<String>>,
}

/// Runs the embedded protocol on top of the innocent chatter.
///
/// Everyone follows the channel except a leaker whose embedded message is
/// being decoded. The run stops as soon as the embedded transcript is complete,
/// since from then on everyone follows the channel.
pub fn compose_run(
    tree: &ProtocolTree,
    channel: &InnocentChannel,
    scenario: &LeakScenario,
    seed: u64,
    max_rounds: usize,
) -> Result<ComposeRun, StegoError> {
    check_inputs(tree, channel, scenario)?;
    let mut rng = rng_from(seed);
    let pick = FiniteDist::new(
        (0..scenario.outcomes().len()).map(|i| i.to_string()).collect(),
        scenario.outcomes().iter().map(|o| o.prob.clone()).collect(),
    )?;
    let outcome = &scenario.outcomes()[sample(&pick, &mut rng).parse::<usize>().expect("index label")];
    let x = scenario.x_label(outcome.x).to_string();
    let mut state = InterpreterState::start(tree);
    let mut chosen: Option<String> = None;
    let mut innocent = Vec::new();
    for k in 0..max_rounds {
        let (Some(node), Some(round)) = (state.node(tree), channel.round(k)) else {
            break;
        };
        let embedding = round.player == node.speaker && outcome.leaks[node.speaker];
        let message = if embedding {
            let a = match &chosen {
                Some(a) => a.clone(),
                None => sample(node.law(true, &x)?, &mut rng),
            };
            let m = embed_leaker_step(tree, &state, &a, &round.law, &mut rng)?;
            chosen = Some(a);
            m
        } else {
            sample(&round.law, &mut rng)
        };
        let next = interpret_step(tree, &state, round.player, &message, &round.law)?;
        if next.pi_transcript.len() > state.pi_transcript.len() {
            let emitted = &next.pi_transcript[state.pi_transcript.len()];
            if chosen.as_ref().is_some_and(|a| a != emitted) {
                return Err(StegoError::EmptyIntersection);
            }
            chosen = None;
        }
        state = next;
        innocent.push(InnocentMessage {
            round: k,
            player: round.player,
            message,
        });
    }
    Ok(ComposeRun {
        x,
        leaks: outcome.leaks.clone(),
        innocent,
        decoded: state.finished.then(|| state.pi_transcript.clone()),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AuditBudget {
    pub max_rounds: usize,
    pub max_branches: usize,
}

impl Default for AuditBudget {
    fn default() -> Self {
        AuditBudget {
            max_rounds: 400,
            max_branches: 1_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditReport {
    pub rounds_expanded: usize,
    pub decoded_branches: usize,
    pub pending_branches: usize,
    pub decoded_mass: Rational,
    pub pending_mass: Rational,
    /// Total variation between the joint law of (outcome, embedded transcript)
    /// from decoded mass plus projected pending mass, and the direct enumeration.
    pub joint_discrepancy: Rational,
    /// Decoded innocent transcripts whose posterior over outcomes differs from
    /// the posterior at the decoded embedded transcript.
    pub posterior_mismatches: usize,
    pub passed: bool,
}

/// Mass still undecoded that the audit tolerates.
pub fn mass_tolerance() -> Rational {
    Rational::new(1, 1_000_000)
}

type Members = BTreeMap<(usize, Option<String>), Rational>;

/// Innocent transcripts that differ only in messages that cannot move the
/// interpreter share one branch: those messages are drawn from the channel
/// independently of everything else, so merging them changes no conditional law.
struct Branch {
    state: InterpreterState,
    members: Members,
}

/// Leaking speakers at the current node commit to their embedded message.
fn commit(tree: &ProtocolTree, scenario: &LeakScenario, state: &InterpreterState, members: Members) -> Result<Members, StegoError> {
    let Some(node) = state.node(tree) else {
        return Ok(members.into_iter().map(|((o, _), m)| ((o, None), m)).collect());
    };
    let mut out = Members::new();
    for ((o, a), mass) in members {
        let outcome = &scenario.outcomes()[o];
        if a.is_none() && outcome.leaks[node.speaker] {
            for (choice, p) in node.law(true, scenario.x_label(outcome.x))?.iter() {
                if p.is_positive() {
                    *out.entry((o, Some(choice.to_string()))).or_insert_with(Rational::zero) += &mass * p;
                }
            }
        } else {
            *out.entry((o, a)).or_insert_with(Rational::zero) += mass;
        }
    }
    Ok(out)
}

fn completions(
    node: &Node,
    first: Vec<(String, Rational)>,
    x: &str,
    leaks: &[bool],
    prefix: &mut Vec<String>,
    weight: &Rational,
    out: &mut BTreeMap<Vec<String>, Rational>,
) -> Result<(), StegoError> {
    for (m, p) in first {
        if p.is_zero() {
            continue;
        }
        let w = weight * &p;
        prefix.push(m.clone());
        match node.child(&m) {
            None => *out.entry(prefix.clone()).or_insert_with(Rational::zero) += w,
            Some(c) => {
                let law = c.law(leaks[c.speaker], x)?;
                let next = law.iter().map(|(a, q)| (a.to_string(), q.clone())).collect();
                completions(c, next, x, leaks, prefix, &w, out)?;
            }
        }
        prefix.pop();
    }
    Ok(())
}

/// Exhaustively expands the composed process and checks it against the
/// embedded protocol run on its own.
pub fn equivalence_audit(
    tree: &ProtocolTree,
    channel: &InnocentChannel,
    scenario: &LeakScenario,
    budget: AuditBudget,
) -> Result<AuditReport, StegoError> {
    check_inputs(tree, channel, scenario)?;
    let reference = enumerate(tree, scenario, DEFAULT_BUDGET)?;
    let tolerance = mass_tolerance();

    let start = InterpreterState::start(tree);
    let initial: Members = scenario
        .outcomes()
        .iter()
        .enumerate()
        .map(|(i, o)| ((i, None), o.prob.clone()))
        .collect();
    let first = Branch {
        members: commit(tree, scenario, &start, initial)?,
        state: start,
    };
    let (mut done, mut active): (Vec<Branch>, Vec<Branch>) =
        std::iter::once(first).partition(|b| b.state.finished);

    let mut rounds_expanded = 0;
    for k in 0..budget.max_rounds {
        let pending: Rational = active.iter().flat_map(|b| b.members.values()).sum();
        if active.is_empty() || pending <= tolerance {
            break;
        }
        let Some(round) = channel.round(k) else { break };
        rounds_expanded = k + 1;
        let mut next = Vec::with_capacity(active.len());
        for b in active {
            let node = b.state.node(tree).expect("active branches are unfinished");
            if round.player != node.speaker {
                next.push(b);
                continue;
            }
            for (m, g) in g_partition(&b.state.interval, &round.law) {
                let state = interpret_step(tree, &b.state, round.player, &m, &round.law)?;
                let emitted = state.pi_transcript.get(b.state.pi_transcript.len());
                let mut members = Members::new();
                for ((o, a), mass) in &b.members {
                    let factor = match a {
                        Some(a) => {
                            let target = b
                                .state
                                .interval
                                .intersect(&f_cell(node, a)?)
                                .ok_or(StegoError::EmptyIntersection)?;
                            g.overlap(&target) / target.len()
                        }
                        None => round.law.prob(&m),
                    };
                    if factor.is_zero() {
                        continue;
                    }
                    let a = match (a, emitted) {
                        (Some(a), Some(e)) if a != e => return Err(StegoError::EmptyIntersection),
                        (_, Some(_)) => None,
                        (a, None) => a.clone(),
                    };
                    *members.entry((*o, a)).or_insert_with(Rational::zero) += mass * &factor;
                }
                if members.is_empty() {
                    continue;
                }
                if emitted.is_some() {
                    members = commit(tree, scenario, &state, members)?;
                }
                let branch = Branch { state, members };
                if branch.state.finished {
                    done.push(branch);
                } else {
                    next.push(branch);
                }
            }
        }
        active = next;
        if active.len() + done.len() > budget.max_branches {
            return Err(StegoError::BudgetExhausted {
                rounds: rounds_expanded,
                decoded_mass: done.iter().flat_map(|b| b.members.values()).sum::<Rational>().to_f64(),
            });
        }
    }

    let decoded_mass: Rational = done.iter().flat_map(|b| b.members.values()).sum();
    let pending_mass: Rational = active.iter().flat_map(|b| b.members.values()).sum();
    if pending_mass > tolerance {
        return Err(StegoError::BudgetExhausted {
            rounds: rounds_expanded,
            decoded_mass: decoded_mass.to_f64(),
        });
    }

    // decoded joint plus the projection of pending mass onto complete transcripts
    let mut joint: BTreeMap<(Vec<String>, usize), Rational> = BTreeMap::new();
    for b in &done {
        for ((o, _), m) in &b.members {
            *joint.entry((b.state.pi_transcript.clone(), *o)).or_insert_with(Rational::zero) += m;
        }
    }
    for b in &active {
        let node = node_at(tree, &b.state.pi_transcript).expect("pending branch has a node");
        let width = b.state.interval.len();
        for ((o, a), m) in &b.members {
            let outcome = &scenario.outcomes()[*o];
            let first = match a {
                Some(a) => vec![(a.clone(), Rational::one())],
                None => f_partition(&node.p_innocent)
                    .into_iter()
                    .map(|(a, cell)| (a, cell.overlap(&b.state.interval) / &width))
                    .collect(),
            };
            let mut out = BTreeMap::new();
            let mut prefix = b.state.pi_transcript.clone();
            completions(node, first, scenario.x_label(outcome.x), &outcome.leaks, &mut prefix, m, &mut out)?;
            for (t, w) in out {
                *joint.entry((t, *o)).or_insert_with(Rational::zero) += w;
            }
        }
    }
    let mut expected: BTreeMap<(Vec<String>, usize), Rational> = BTreeMap::new();
    for leaf in &reference.leaves {
        for (o, m) in leaf.masses.iter().enumerate() {
            if m.is_positive() {
                expected.insert((leaf.transcript.clone(), o), m.clone());
            }
        }
    }
    let mut diff = Rational::zero();
    for (key, m) in &joint {
        let e = expected.get(key).cloned().unwrap_or_else(Rational::zero);
        diff += if *m > e { m - &e } else { &e - m };
    }
    for (key, e) in &expected {
        if !joint.contains_key(key) {
            diff += e;
        }
    }
    let joint_discrepancy = diff / Rational::from_integer(2);

    let leaf_posterior: BTreeMap<&[String], Vec<Rational>> = reference
        .leaves
        .iter()
        .map(|l| {
            let total = l.prob();
            (l.transcript.as_slice(), l.masses.iter().map(|m| m / &total).collect())
        })
        .collect();
    let mut posterior_mismatches = 0;
    for b in &done {
        let total: Rational = b.members.values().sum();
        let mut post = vec![Rational::zero(); scenario.outcomes().len()];
        for ((o, _), m) in &b.members {
            post[*o] += m / &total;
        }
        if leaf_posterior.get(b.state.pi_transcript.as_slice()) != Some(&post) {
            posterior_mismatches += 1;
        }
    }

    let passed = joint_discrepancy.is_zero() && posterior_mismatches == 0;
    Ok(AuditReport {
        rounds_expanded,
        decoded_branches: done.len(),
        pending_branches: active.len(),
        decoded_mass,
        pending_mass,
        joint_discrepancy,
        posterior_mismatches,
        passed,
    })
}
