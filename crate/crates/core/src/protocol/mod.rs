//! Collaborating protocols: representation, exact enumeration, sampling and rewrites.

mod enumerate;
mod equivalence;
pub mod random;
mod scenario;
mod simulate;
mod transform;
mod tree;

pub use enumerate::{
    enumerate, enumerate_joint, leak_posterior, masses_at, posteriors, safety_check,
    transcript_key, Enumeration, Leaf, NodeVisit, Posterior, SafetyReport, DEFAULT_BUDGET,
    TRANSCRIPT_AXIS,
};
pub use random::{random_dist, random_protocol, random_scenario, RandomProtocolConfig};
pub use equivalence::{equivalent, posterior_measure, PosteriorMeasure};
pub use scenario::{leak_axis, uniform_bits, LeakScenario, Outcome, ScenarioSpec, SecretSpec};
pub use simulate::{sample, simulate, SimRun};
pub use transform::{
    binarize, lands_on_c, pretend_ignorance, stop_at_c, unbalanced_bits, BinarizeOptions,
    BinarizeReport, Binarized, PretendIgnorance, StopAtC,
};
pub use tree::{Node, ProtocolTree, ValidationReport};

use crate::{ProbError, Rational};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProtocolError {
    #[error(transparent)]
    Prob(#[from] ProbError),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("invalid protocol: {0}")]
    Invalid(String),
    #[error("no leak law for secret {0:?}")]
    MissingLeakLaw(String),
    #[error("speaker {speaker} out of range for {players} players")]
    SpeakerOutOfRange { speaker: usize, players: usize },
    #[error("enumeration exceeded {budget} transcripts")]
    BudgetExceeded { budget: usize },
    #[error("prefix {0:?} has probability zero")]
    ZeroProbabilityPrefix(Vec<String>),
    #[error("prefix {0:?} does not follow the protocol")]
    InvalidPrefix(Vec<String>),
    #[error("protocol has a round with more than two messages")]
    NotBinary,
    #[error("{0}")]
    ParameterRange(String),
    #[error("prior Pr(L{}=1 | X={x}) = {prior} already exceeds the threshold", player + 1)]
    PriorAboveThreshold {
        x: String,
        player: usize,
        prior: Rational,
    },
}
