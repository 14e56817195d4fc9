//! Running a non-revealing protocol inside innocent chatter: the speaker's
//! innocent messages successively narrow a rational interval, and an embedded
//! message is read off once the interval falls inside that message's cell.
//!
//! Cells are half-open, so an interval can never straddle a cell boundary at
//! a single point: either it lies inside one cell or it meets two of them in
//! sets of positive length.

mod channel;
mod compose;
mod interpret;
mod interval;

pub use channel::{informativeness_estimate, InformativenessReport, InnocentChannel, InnocentRound};
pub use compose::{
    compose_run, equivalence_audit, mass_tolerance, AuditBudget, AuditReport, ComposeRun, InnocentMessage,
};
pub use interpret::{
    embed_leaker_step, f_cell, interpret_step, leaker_message_law, node_at, InterpreterState,
};
pub use interval::{f_partition, g_partition, Interval};

use crate::prob::ProbError;
use crate::protocol::ProtocolError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StegoError {
    #[error(transparent)]
    Prob(#[from] ProbError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("protocol is revealing: {0}")]
    Revealing(String),
    #[error("leaker's committed interval no longer meets the current one")]
    EmptyIntersection,
    #[error("budget exhausted after {rounds} rounds with decoded mass {decoded_mass}")]
    BudgetExhausted { rounds: usize, decoded_mass: f64 },
}
