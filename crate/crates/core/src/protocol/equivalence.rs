use std::collections::BTreeMap;

use super::{enumerate, LeakScenario, ProtocolError, ProtocolTree};
use crate::Rational;

/// Distribution of the posterior over scenario outcomes, keyed by the exact posterior vector.
pub type PosteriorMeasure = BTreeMap<Vec<Rational>, Rational>;

pub fn posterior_measure(
    tree: &ProtocolTree,
    scenario: &LeakScenario,
    budget: usize,
) -> Result<PosteriorMeasure, ProtocolError> {
    let e = enumerate(tree, scenario, budget)?;
    let mut out = PosteriorMeasure::new();
    for leaf in e.leaves {
        let total = leaf.prob();
        let mu: Vec<Rational> = leaf.masses.iter().map(|m| m / &total).collect();
        *out.entry(mu).or_insert_with(Rational::zero) += total;
    }
    Ok(out)
}

/// Two protocols are equivalent when their posterior measures coincide exactly.
pub fn equivalent(
    a: &ProtocolTree,
    b: &ProtocolTree,
    scenario: &LeakScenario,
    budget: usize,
) -> Result<bool, ProtocolError> {
    Ok(posterior_measure(a, scenario, budget)? == posterior_measure(b, scenario, budget)?)
}
