use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::Serialize;

use super::{LeakScenario, ProtocolError, ProtocolTree};
use crate::FiniteDist;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimRun {
    pub x: String,
    pub leaks: Vec<bool>,
    pub transcript: Vec<String>,
}

/// Draws a label from an exact law. Sampling itself runs in `f64`.
pub fn sample<R: Rng + ?Sized>(d: &FiniteDist, rng: &mut R) -> String {
    let weights: Vec<f64> = d.probs().iter().map(|p| p.to_f64()).collect();
    let idx = WeightedIndex::new(&weights)
        .expect("a distribution has positive total weight")
        .sample(rng);
    d.support()[idx].clone()
}

/// One run of the protocol on a draw from the scenario.
pub fn simulate<R: Rng + ?Sized>(
    tree: &ProtocolTree,
    scenario: &LeakScenario,
    rng: &mut R,
) -> Result<SimRun, ProtocolError> {
    let weights: Vec<f64> = scenario.outcomes().iter().map(|o| o.prob.to_f64()).collect();
    let pick = WeightedIndex::new(&weights)
        .expect("scenario has positive mass")
        .sample(rng);
    let outcome = &scenario.outcomes()[pick];
    let x = scenario.x_label(outcome.x).to_string();
    let mut transcript = Vec::new();
    let mut node = tree.root.as_ref();
    while let Some(n) = node {
        let leaking = *outcome
            .leaks
            .get(n.speaker)
            .ok_or(ProtocolError::SpeakerOutOfRange {
                speaker: n.speaker,
                players: scenario.n_players(),
            })?;
        let m = sample(n.law(leaking, &x)?, rng);
        node = n.child(&m);
        transcript.push(m);
    }
    Ok(SimRun {
        x,
        leaks: outcome.leaks.clone(),
        transcript,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{uniform_bits, Node};
    use crate::seed::rng_from;
    use crate::ratio;

    #[test]
    fn replay_and_point_masses() {
        let s = LeakScenario::indep(&uniform_bits(1), 1, &ratio(1, 2)).unwrap();
        let one = FiniteDist::point(["0", "1"], 1);
        let t = ProtocolTree::new(
            Node::uninformative(0, one.clone(), s.x_support())
                .with_child("1", Node::uninformative(0, one, s.x_support())),
        );
        let a = simulate(&t, &s, &mut rng_from(9)).unwrap();
        let b = simulate(&t, &s, &mut rng_from(9)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.transcript, vec!["1".to_string(), "1".to_string()]);
    }
}
