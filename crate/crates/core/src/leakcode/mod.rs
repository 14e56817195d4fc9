//! Leaking at positive rate: the window channel, capacities, random codes,
//! Monte Carlo experiments, and the hypergeometric ratio check.

mod codebook;
mod experiment;
mod ratio;
mod window;

pub use codebook::{match_count, message_bits, ml_decode, random_codebook, Codebook, CodebookSpec, DEFAULT_SYMBOL_BUDGET};
pub use experiment::{
    fixed_two_group_run, group_posterior, run_indep_experiment, ExperimentReport, FixedTwoGroupRun,
    IndepRun, LeakConfig,
};
pub use ratio::{
    binomial_pmf, hypergeometric_pmf, ratio_at, ratio_bound_check, ratio_sweep, RatioCheck, RatioSweep,
};
pub use window::{window_params, WindowChannel};

use std::f64::consts::LOG2_E;

use crate::prob::ProbError;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LeakError {
    #[error("parameters out of range: {0}")]
    Range(String),
    #[error("codebook needs {needed} symbols, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("maximum-likelihood tie between {count} codewords")]
    Tie { count: usize },
    #[error("invalid transcript: {0}")]
    Transcript(String),
    #[error(transparent)]
    Prob(#[from] ProbError),
}

/// Safe c-capacity per player when each player leaks independently with probability `b`.
pub fn indep_capacity(b: &Rational, c: &Rational) -> Result<f64, LeakError> {
    if !b.is_positive() || b > c || *c >= Rational::one() {
        return Err(LeakError::Range(format!("need 0 < b <= c < 1, got b={b}, c={c}")));
    }
    let cf = c.to_f64();
    Ok((-b.to_f64() * c.complement().log2() + cf * b.complement().log2()) / cf)
}

/// Safe c-capacity per leaker for a fixed number of leakers: `-log(1-c)/c - log e`.
pub fn fixed_capacity(c: &Rational) -> Result<f64, LeakError> {
    if !c.is_positive() || *c >= Rational::one() {
        return Err(LeakError::Range(format!("need 0 < c < 1, got c={c}")));
    }
    Ok(capacity_term(&c.complement(), c))
}

/// `-log2(q)/s - log2(e)`, shared so that `q = 1 - s` gives identical floats from either side.
pub(crate) fn capacity_term(q: &Rational, s: &Rational) -> f64 {
    -q.log2() / s.to_f64() - LOG2_E
}
