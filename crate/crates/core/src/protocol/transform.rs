//! Protocol rewrites that keep the posterior measure of `(X, L)` intact.

use std::collections::BTreeMap;

use serde::Serialize;

use super::enumerate::{branch_masses, leak_posterior, outcome_laws};
use super::{LeakScenario, Node, ProtocolError, ProtocolTree};
use crate::{FiniteDist, Rational};

const ZERO: &str = "0";
const ONE: &str = "1";

fn bits() -> Vec<String> {
    vec![ZERO.to_string(), ONE.to_string()]
}

/// Law over `alphabet` (two letters) giving `first` probability `p`.
fn two_point(alphabet: &[String], first: &str, p: Rational) -> FiniteDist {
    let probs = alphabet
        .iter()
        .map(|m| if m == first { p.clone() } else { p.complement() })
        .collect();
    FiniteDist::new(alphabet.to_vec(), probs).expect("two-point law")
}

fn bit_law(p_zero: Rational) -> FiniteDist {
    two_point(&bits(), ZERO, p_zero)
}

fn mass_of_x(scenario: &LeakScenario, masses: &[Rational], x: usize) -> Rational {
    scenario
        .outcomes()
        .iter()
        .zip(masses)
        .filter(|(o, _)| o.x == x)
        .map(|(_, m)| m)
        .sum()
}

fn restrict_to_x(scenario: &LeakScenario, x: usize) -> Vec<Rational> {
    scenario
        .outcomes()
        .iter()
        .map(|o| if o.x == x { o.prob.clone() } else { Rational::zero() })
        .collect()
}

fn check_threshold(c: &Rational) -> Result<(), ProtocolError> {
    if !c.is_positive() || *c >= Rational::one() {
        return Err(ProtocolError::ParameterRange(format!(
            "threshold {c} must lie in (0,1)"
        )));
    }
    Ok(())
}

fn check_priors(scenario: &LeakScenario, c: &Rational) -> Result<(), ProtocolError> {
    let prior = scenario.prior_masses();
    for x in 0..scenario.x_support().len() {
        for i in 0..scenario.n_players() {
            let p = leak_posterior(scenario, &prior, x, i).expect("every secret has mass");
            if p > *c {
                return Err(ProtocolError::PriorAboveThreshold {
                    x: scenario.x_label(x).to_string(),
                    player: i,
                    prior: p,
                });
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- binarize

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BinarizeOptions {
    /// Most halving rounds inserted in front of one bit.
    pub max_inserted_rounds: usize,
}

impl Default for BinarizeOptions {
    fn default() -> Self {
        BinarizeOptions {
            max_inserted_rounds: 64,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BinarizeReport {
    /// Halving rounds added across the whole tree.
    pub inserted_rounds: usize,
    /// Bits left outside `[1/3, 2/3]` because they needed more rounds than allowed.
    pub cap_hits: usize,
    /// Bits every player sends with certainty, removed.
    pub collapsed_nodes: usize,
    /// Bits a non-leaker sends with certainty but a leaker may not; kept as they are.
    pub revealing_point_masses: usize,
}

#[derive(Clone, Debug)]
pub struct Binarized {
    pub tree: ProtocolTree,
    pub report: BinarizeReport,
}

enum Part {
    Leaf(usize),
    Split(Box<Part>, Box<Part>),
}

impl Part {
    fn members(&self, out: &mut Vec<usize>) {
        match self {
            Part::Leaf(i) => out.push(*i),
            Part::Split(a, b) => {
                a.members(out);
                b.members(out);
            }
        }
    }
}

/// Huffman merge on the innocent weights. Ties go to the lower alphabet index.
fn huffman(weights: &[Rational]) -> Part {
    let mut items: Vec<(Rational, usize, Part)> = weights
        .iter()
        .enumerate()
        .map(|(i, w)| (w.clone(), i, Part::Leaf(i)))
        .collect();
    while items.len() > 1 {
        items.sort_by(|a, b| (&a.0, a.1).cmp(&(&b.0, b.1)));
        let a = items.remove(0);
        let b = items.remove(0);
        let (lo, hi) = if a.1 < b.1 { (a, b) } else { (b, a) };
        items.push((lo.0 + hi.0, lo.1, Part::Split(Box::new(lo.2), Box::new(hi.2))));
    }
    items.pop().expect("non-empty alphabet").2
}

struct BitSpec {
    speaker: usize,
    p0_innocent: Rational,
    p0_leak: BTreeMap<String, Rational>,
    child0: Option<Node>,
    child1: Option<Node>,
}

fn attach(mut node: Node, message: &str, child: Option<Node>) -> Node {
    if let Some(c) = child {
        node.children.insert(message.to_string(), c);
    }
    node
}

fn plain_bit(spec: &BitSpec) -> Node {
    let node = Node::new(
        spec.speaker,
        bit_law(spec.p0_innocent.clone()),
        spec.p0_leak
            .iter()
            .map(|(x, p)| (x.clone(), bit_law(p.clone()))),
    );
    let node = attach(node, ZERO, spec.child0.clone());
    attach(node, ONE, spec.child1.clone())
}

fn finish_bit(spec: BitSpec, opts: &BinarizeOptions, report: &mut BinarizeReport) -> Option<Node> {
    let p = &spec.p0_innocent;
    if p.is_zero() || p.is_one() {
        if spec.p0_leak.values().all(|q| q == p) {
            report.collapsed_nodes += 1;
            return if p.is_one() { spec.child0 } else { spec.child1 };
        }
        report.revealing_point_masses += 1;
        return Some(plain_bit(&spec));
    }
    let third = Rational::new(1, 3);
    let two_thirds = Rational::new(2, 3);
    if *p >= third && *p <= two_thirds {
        return Some(plain_bit(&spec));
    }
    // `rare` is the unlikely bit for a non-leaker, sent with probability `pr < 1/3`.
    let (rare, common, pr, child_rare, child_common) = if *p < third {
        (ZERO, ONE, p.clone(), spec.child0.clone(), spec.child1.clone())
    } else {
        (ONE, ZERO, p.complement(), spec.child1.clone(), spec.child0.clone())
    };
    let three_pr = &pr * Rational::from(3);
    let half = Rational::new(1, 2);
    let mut rounds = 1;
    let mut scale = half.clone();
    while scale > three_pr {
        rounds += 1;
        scale = &scale * &half;
        if rounds > opts.max_inserted_rounds {
            report.cap_hits += 1;
            return Some(plain_bit(&spec));
        }
    }
    report.inserted_rounds += rounds;

    let rare_prob = |p0: &Rational| if rare == ZERO { p0.clone() } else { p0.complement() };
    let leak_rare: BTreeMap<&String, Rational> =
        spec.p0_leak.iter().map(|(x, p0)| (x, rare_prob(p0))).collect();
    // Pr(alpha < s) for a speaker with Pr(rare) = q, where s > pr.
    let below = |q: &Rational, s: &Rational| -> Rational {
        q + q.complement() * (s - &pr) / pr.complement()
    };
    let law_rare = |p_rare: Rational| two_point(&bits(), rare, p_rare);

    // scale == 2^-rounds here
    let reveal = Node::new(
        spec.speaker,
        law_rare(&pr / &scale),
        leak_rare
            .iter()
            .map(|(x, q)| ((*x).clone(), law_rare(q / below(q, &scale)))),
    );
    let reveal = attach(reveal, rare, child_rare);
    let mut next = attach(reveal, common, child_common.clone());

    let mut hi = scale.clone();
    for _ in 0..rounds {
        let lo = hi.clone();
        hi = &hi * Rational::from(2);
        let node = Node::new(
            spec.speaker,
            law_rare(half.clone()),
            leak_rare.iter().map(|(x, q)| {
                ((*x).clone(), law_rare(below(q, &lo) / below(q, &hi)))
            }),
        );
        let node = attach(node, common, child_common.clone());
        next = attach(node, rare, Some(next));
    }
    Some(next)
}

fn conditional_zero(weights: &[Rational], s0: &[usize], s1: &[usize]) -> Option<Rational> {
    let w0: Rational = s0.iter().map(|&i| &weights[i]).sum();
    let w1: Rational = s1.iter().map(|&i| &weights[i]).sum();
    let total = &w0 + &w1;
    if total.is_zero() {
        None
    } else {
        Some(w0 / total)
    }
}

struct NodeLaws<'a> {
    speaker: usize,
    innocent: Vec<Rational>,
    leak: BTreeMap<&'a String, Vec<Rational>>,
}

fn build(
    part: &Part,
    laws: &NodeLaws,
    kids: &[Option<Node>],
    opts: &BinarizeOptions,
    report: &mut BinarizeReport,
) -> Option<Node> {
    match part {
        Part::Leaf(i) => kids[*i].clone(),
        Part::Split(a, b) => {
            let (mut s0, mut s1) = (Vec::new(), Vec::new());
            a.members(&mut s0);
            b.members(&mut s1);
            let child0 = build(a, laws, kids, opts, report);
            let child1 = build(b, laws, kids, opts, report);
            let p0_innocent = conditional_zero(&laws.innocent, &s0, &s1)
                .unwrap_or_else(|| Rational::new(1, 2));
            let p0_leak = laws
                .leak
                .iter()
                .map(|(x, w)| {
                    let p = conditional_zero(w, &s0, &s1).unwrap_or_else(|| p0_innocent.clone());
                    ((*x).clone(), p)
                })
                .collect();
            finish_bit(
                BitSpec {
                    speaker: laws.speaker,
                    p0_innocent,
                    p0_leak,
                    child0,
                    child1,
                },
                opts,
                report,
            )
        }
    }
}

fn binarize_node(node: &Node, opts: &BinarizeOptions, report: &mut BinarizeReport) -> Option<Node> {
    let kids: Vec<Option<Node>> = node
        .alphabet
        .iter()
        .map(|m| node.child(m).and_then(|c| binarize_node(c, opts, report)))
        .collect();
    if node.alphabet.len() == 1 {
        report.collapsed_nodes += 1;
        return kids.into_iter().next().flatten();
    }
    let weights = |d: &FiniteDist| node.alphabet.iter().map(|m| d.prob(m)).collect::<Vec<_>>();
    let laws = NodeLaws {
        speaker: node.speaker,
        innocent: weights(&node.p_innocent),
        leak: node.p_leak.iter().map(|(x, d)| (x, weights(d))).collect(),
    };
    build(&huffman(&laws.innocent), &laws, &kids, opts, report)
}

/// Rewrites every round as bits a non-leaker sends with probability in `[1/3, 2/3]`.
///
/// Wider alphabets are split along a Huffman tree of the innocent law. A bit
/// with innocent probability `p < 1/3` (or `> 2/3`, mirrored) is preceded by
/// fair halving rounds: each round either settles the bit or doubles the
/// conditional probability of the rare value, until a final round reveals it
/// with probability in `[1/3, 2/3)`. Bits nobody can vary are dropped. Bits
/// only leakers can vary are left in place and counted.
pub fn binarize(tree: &ProtocolTree, opts: BinarizeOptions) -> Binarized {
    let mut report = BinarizeReport::default();
    let root = tree
        .root
        .as_ref()
        .and_then(|r| binarize_node(r, &opts, &mut report));
    Binarized {
        tree: ProtocolTree::from_root(root),
        report,
    }
}

/// Prefixes of nodes whose innocent bit law falls outside `[1/3, 2/3]`.
pub fn unbalanced_bits(tree: &ProtocolTree) -> Vec<Vec<String>> {
    let third = Rational::new(1, 3);
    let two_thirds = Rational::new(2, 3);
    let mut out = Vec::new();
    tree.visit(|prefix, node| {
        let ok = node.alphabet.len() == 2
            && node
                .p_innocent
                .probs()
                .iter()
                .all(|p| *p >= third && *p <= two_thirds);
        if !ok {
            out.push(prefix.to_vec());
        }
    });
    out
}

// --------------------------------------------------------------- stop at c

#[derive(Clone, Debug)]
pub struct StopAtC {
    pub tree: ProtocolTree,
    /// Number of rounds split.
    pub fixes: usize,
}

/// Splits a binary round so that sending `heavy` lands exactly on the target posterior.
///
/// The speaker first sends `heavy` whenever their bit is `heavy`, and otherwise
/// with probability `forward`. A second round then reveals the bit. Sending
/// the other letter first skips the second round.
fn split_round(node: Node, heavy: &str, light: &str, forward: &Rational) -> Node {
    let first = |d: &FiniteDist| two_point(&node.alphabet, heavy, d.prob(heavy) + forward * d.prob(light));
    let reveal = |d: &FiniteDist| {
        let h = d.prob(heavy);
        let denom = &h + forward * d.prob(light);
        two_point(&node.alphabet, heavy, h / denom)
    };
    let second = Node {
        speaker: node.speaker,
        alphabet: node.alphabet.clone(),
        p_innocent: reveal(&node.p_innocent),
        p_leak: node.p_leak.iter().map(|(x, d)| (x.clone(), reveal(d))).collect(),
        children: node.children.clone(),
    };
    let mut children = BTreeMap::new();
    children.insert(heavy.to_string(), second);
    if let Some(c) = node.children.get(light) {
        children.insert(light.to_string(), c.clone());
    }
    Node {
        speaker: node.speaker,
        alphabet: node.alphabet.clone(),
        p_innocent: first(&node.p_innocent),
        p_leak: node.p_leak.iter().map(|(x, d)| (x.clone(), first(d))).collect(),
        children,
    }
}

struct Target<'a> {
    scenario: &'a LeakScenario,
    x: usize,
    player: usize,
    c: &'a Rational,
}

fn land_pass(node: &mut Node, masses: Vec<Rational>, t: &Target, fixes: &mut usize) -> Result<(), ProtocolError> {
    let post = match leak_posterior(t.scenario, &masses, t.x, t.player) {
        Some(p) => p,
        None => return Ok(()),
    };
    if post == *t.c {
        return Ok(());
    }
    let branches: Vec<(String, Vec<Rational>, Option<Rational>)> = {
        let laws = outcome_laws(node, t.scenario)?;
        node.alphabet
            .iter()
            .map(|m| {
                let bm = branch_masses(&masses, &laws, m);
                let p = leak_posterior(t.scenario, &bm, t.x, t.player);
                (m.clone(), bm, p)
            })
            .collect()
    };
    let over = branches
        .iter()
        .position(|(_, _, p)| p.as_ref().is_some_and(|p| p > t.c));
    let Some(k) = over else {
        for (m, bm, p) in branches {
            if p.is_some() {
                if let Some(child) = node.children.get_mut(&m) {
                    land_pass(child, bm, t, fixes)?;
                }
            }
        }
        return Ok(());
    };
    let (heavy, heavy_masses, c_heavy) = &branches[k];
    let (light, light_masses, c_light) = &branches[1 - k];
    let c_heavy = c_heavy.as_ref().expect("checked above");
    let c_light = c_light
        .as_ref()
        .expect("a posterior below target on average needs mass on the other letter");
    let p = mass_of_x(t.scenario, heavy_masses, t.x) / mass_of_x(t.scenario, &masses, t.x);
    let q = (t.c - c_light) / (c_heavy - c_light);
    let forward = &p * q.complement() / (&q * p.complement());
    let old = std::mem::replace(node, Node::uninformative(0, FiniteDist::point(["_"], 0), &[]));
    *node = split_round(old, heavy, light, &forward);
    *fixes += 1;
    let skip = forward.complement();
    let next: Vec<Rational> = light_masses.iter().map(|m| m * &skip).collect();
    if let Some(child) = node.children.get_mut(light.as_str()) {
        land_pass(child, next, t, fixes)?;
    }
    Ok(())
}

/// An equivalent protocol in which no posterior `Pr(L_i=1 | t, X=x)` jumps over `c`:
/// before exceeding `c` it equals `c` at some earlier prefix.
pub fn stop_at_c(
    tree: &ProtocolTree,
    scenario: &LeakScenario,
    c: &Rational,
) -> Result<StopAtC, ProtocolError> {
    check_threshold(c)?;
    tree.ensure_valid_for(scenario)?;
    if !tree.is_binary() {
        return Err(ProtocolError::NotBinary);
    }
    check_priors(scenario, c)?;
    let mut out = tree.clone();
    let mut fixes = 0;
    if let Some(root) = out.root.as_mut() {
        for x in 0..scenario.x_support().len() {
            for player in 0..scenario.n_players() {
                let t = Target {
                    scenario,
                    x,
                    player,
                    c,
                };
                land_pass(root, restrict_to_x(scenario, x), &t, &mut fixes)?;
            }
        }
    }
    out.length_bound = out.length_bound.max(out.depth());
    Ok(StopAtC { tree: out, fixes })
}

fn lands_walk(node: Option<&Node>, masses: Vec<Rational>, landed: bool, t: &Target) -> Result<bool, ProtocolError> {
    let Some(post) = leak_posterior(t.scenario, &masses, t.x, t.player) else {
        return Ok(true);
    };
    if post > *t.c && !landed {
        return Ok(false);
    }
    let landed = landed || post == *t.c;
    let Some(node) = node else { return Ok(true) };
    let laws = outcome_laws(node, t.scenario)?;
    for m in &node.alphabet {
        let bm = branch_masses(&masses, &laws, m);
        if !lands_walk(node.child(m), bm, landed, t)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks the landing property for every secret and player by exhaustive scan.
pub fn lands_on_c(
    tree: &ProtocolTree,
    scenario: &LeakScenario,
    c: &Rational,
) -> Result<bool, ProtocolError> {
    for x in 0..scenario.x_support().len() {
        for player in 0..scenario.n_players() {
            let t = Target {
                scenario,
                x,
                player,
                c,
            };
            let prior = restrict_to_x(scenario, x);
            let prior_post = leak_posterior(scenario, &prior, x, player).expect("secret has mass");
            let landed = prior_post == *c;
            if let Some(root) = &tree.root {
                let laws = outcome_laws(root, scenario)?;
                for m in &root.alphabet {
                    let bm = branch_masses(&prior, &laws, m);
                    if !lands_walk(root.child(m), bm, landed, &t)? {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

// ------------------------------------------------------- pretend ignorance

#[derive(Clone, Debug, Serialize)]
pub struct PretendIgnorance {
    #[serde(skip)]
    pub tree: ProtocolTree,
    /// `Pr(leakers switch to innocent play | X = x)`.
    pub switch_prob: BTreeMap<String, Rational>,
}

fn ignore_pass(
    node: &mut Node,
    masses: Vec<Rational>,
    x: usize,
    c: &Rational,
    scenario: &LeakScenario,
    switched: bool,
    switch_mass: &mut Rational,
) -> Result<(), ProtocolError> {
    let label = scenario.x_label(x).to_string();
    if switched {
        node.p_leak.insert(label, node.p_innocent.clone());
        for child in node.children.values_mut() {
            ignore_pass(child, Vec::new(), x, c, scenario, true, switch_mass)?;
        }
        return Ok(());
    }
    let branches: Vec<(String, Vec<Rational>)> = {
        let laws = outcome_laws(node, scenario)?;
        node.alphabet
            .iter()
            .map(|m| (m.clone(), branch_masses(&masses, &laws, m)))
            .filter(|(_, bm)| bm.iter().any(Rational::is_positive))
            .collect()
    };
    let crosses = branches.iter().any(|(_, bm)| {
        (0..scenario.n_players())
            .any(|i| leak_posterior(scenario, bm, x, i).is_some_and(|p| p > *c))
    });
    if crosses {
        *switch_mass += mass_of_x(scenario, &masses, x);
        return ignore_pass(node, Vec::new(), x, c, scenario, true, switch_mass);
    }
    for (m, bm) in branches {
        if let Some(child) = node.children.get_mut(&m) {
            ignore_pass(child, bm, x, c, scenario, false, switch_mass)?;
        }
    }
    Ok(())
}

/// Leakers start behaving like non-leakers as soon as the next message could
/// push some posterior `Pr(L_i=1 | t, X=x)` strictly above `c`.
pub fn pretend_ignorance(
    tree: &ProtocolTree,
    scenario: &LeakScenario,
    c: &Rational,
) -> Result<PretendIgnorance, ProtocolError> {
    check_threshold(c)?;
    tree.ensure_valid_for(scenario)?;
    check_priors(scenario, c)?;
    let mut out = tree.clone();
    let mut switch_prob = BTreeMap::new();
    let prior = scenario.x_prior();
    for x in 0..scenario.x_support().len() {
        let mut mass = Rational::zero();
        if let Some(root) = out.root.as_mut() {
            ignore_pass(root, restrict_to_x(scenario, x), x, c, scenario, false, &mut mass)?;
        }
        switch_prob.insert(scenario.x_label(x).to_string(), mass / &prior.probs()[x]);
    }
    Ok(PretendIgnorance {
        tree: out,
        switch_prob,
    })
}
