use std::time::{Duration, Instant};

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{message_bits, ml_decode, random_codebook, Codebook, LeakError, WindowChannel, DEFAULT_SYMBOL_BUDGET};
use crate::seed::{derive_seed, rng_from};
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub players: usize,
    pub message_bits: u32,
    pub trials: u64,
    /// Wrong decodes, ties included.
    pub decode_errors: u64,
    pub tie_errors: u64,
    pub max_posterior_seen: Rational,
    /// Trials in which some player's posterior exceeded the cap.
    pub posterior_violations: u64,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl ExperimentReport {
    pub fn error_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.decode_errors as f64 / self.trials as f64
        }
    }

    pub fn violation_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.posterior_violations as f64 / self.trials as f64
        }
    }
}

struct TrialOutcome {
    wrong: bool,
    tie: bool,
    max_posterior: Rational,
}

fn summarize(
    players: usize,
    message_bits: u32,
    cap: &Rational,
    outcomes: Vec<TrialOutcome>,
    started: Instant,
) -> ExperimentReport {
    let mut report = ExperimentReport {
        players,
        message_bits,
        trials: outcomes.len() as u64,
        decode_errors: 0,
        tie_errors: 0,
        max_posterior_seen: Rational::zero(),
        posterior_violations: 0,
        wall_time: Duration::ZERO,
    };
    for o in outcomes {
        report.decode_errors += o.wrong as u64;
        report.tie_errors += o.tie as u64;
        if o.max_posterior > *cap {
            report.posterior_violations += 1;
        }
        if o.max_posterior > report.max_posterior_seen {
            report.max_posterior_seen = o.max_posterior;
        }
    }
    report.wall_time = started.elapsed();
    report
}

/// Leaks a codeword through the window channel, one symbol per player.
/// Returns the transcript.
fn send<R: Rng>(ch: &WindowChannel, codeword: &[u64], leaking: impl Fn(usize, &mut R) -> bool, rng: &mut R) -> Vec<u64> {
    let mut out = Vec::with_capacity(codeword.len());
    for (i, &x) in codeword.iter().enumerate() {
        let l = leaking(i, rng);
        out.push(ch.leak_message(x, l, rng));
    }
    out
}

/// `n` players leak independently with probability `b`; a random code of
/// rate `rate` bits per player runs over the window channel for cap `c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndepRun {
    pub b: Rational,
    pub c: Rational,
    pub rate: f64,
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    #[serde(default = "default_budget")]
    pub symbol_budget: u64,
}

fn default_budget() -> u64 {
    DEFAULT_SYMBOL_BUDGET
}

impl IndepRun {
    pub fn run(&self) -> Result<ExperimentReport, LeakError> {
        let started = Instant::now();
        let ch = WindowChannel::new(self.b.clone(), self.c.clone())?;
        let h = message_bits(self.rate, self.n)?;
        let book = random_codebook(h, self.n, ch.d(), derive_seed(self.seed, u64::MAX), self.symbol_budget)?;
        let bf = self.b.to_f64();
        let outcomes = (0..self.trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = rng_from(derive_seed(self.seed, t));
                let x = rng.random_range(0..book.message_count());
                let cw = book.codeword(x);
                let tr = send(&ch, &cw, |_, r| r.random_bool(bf), &mut rng);
                let decoded = ml_decode(&book, &tr, &ch);
                let max_posterior = tr
                    .iter()
                    .zip(&cw)
                    .map(|(&m, &s)| ch.posterior_leak(m, s))
                    .max()
                    .unwrap_or_else(Rational::zero);
                TrialOutcome {
                    wrong: decoded.as_ref().map_or(true, |&j| j != x),
                    tie: matches!(decoded, Err(LeakError::Tie { .. })),
                    max_posterior,
                }
            })
            .collect();
        Ok(summarize(self.n, h, &self.c, outcomes, started))
    }
}

pub fn run_indep_experiment(
    b: &Rational,
    c: &Rational,
    rate: f64,
    n: usize,
    trials: u64,
    seed: u64,
) -> Result<ExperimentReport, LeakError> {
    IndepRun {
        b: b.clone(),
        c: c.clone(),
        rate,
        n,
        trials,
        seed,
        symbol_budget: DEFAULT_SYMBOL_BUDGET,
    }
    .run()
}

/// `Pr(L_i = 1 | T, X)` for a player whose message is consistent with the
/// secret, when `leakers` leakers sit uniformly among the `consistent` such players.
pub fn group_posterior(leakers: u64, consistent: u64) -> Rational {
    if consistent == 0 {
        return Rational::zero();
    }
    Rational::new(leakers, consistent)
}

/// `2l` leakers among `2n` players; each half of the players leaks its own
/// half of the secret with a code built for leak probability `l/n`.
///
/// The per-group window targets `c'` below `c` (by default a quarter of the
/// way from `c` down to `l/n`), leaving room for the number of consistent
/// players to fluctuate below its mean.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedTwoGroupRun {
    pub l: u64,
    pub n: usize,
    pub c: Rational,
    /// Bits per leaker.
    pub rate: f64,
    pub trials: u64,
    pub seed: u64,
    #[serde(default)]
    pub window_target: Option<Rational>,
    #[serde(default = "default_budget")]
    pub symbol_budget: u64,
}

impl FixedTwoGroupRun {
    pub fn window(&self) -> Result<WindowChannel, LeakError> {
        let b = Rational::new(self.l, self.n as u64);
        let target = match &self.window_target {
            Some(t) if t > &self.c => {
                return Err(LeakError::Range(format!("window target {t} above cap {}", self.c)))
            }
            Some(t) => t.clone(),
            None => &self.c - (&self.c - &b) / Rational::from_integer(4),
        };
        WindowChannel::new(b, target)
    }

    pub fn run(&self) -> Result<ExperimentReport, LeakError> {
        let started = Instant::now();
        if self.n == 0 || self.l > self.n as u64 {
            return Err(LeakError::Range(format!("need 0 <= l <= n, n > 0, got l={}, n={}", self.l, self.n)));
        }
        if self.l == 0 {
            let outcomes = (0..self.trials)
                .map(|_| TrialOutcome {
                    wrong: true,
                    tie: false,
                    max_posterior: Rational::zero(),
                })
                .collect();
            return Ok(summarize(2 * self.n, 0, &self.c, outcomes, started));
        }
        let ch = self.window()?;
        let h = message_bits(self.rate * self.l as f64 / self.n as f64, self.n)?;
        let books: Vec<Codebook> = (0..2)
            .map(|g| random_codebook(h, self.n, ch.d(), derive_seed(self.seed, u64::MAX - g), self.symbol_budget))
            .collect::<Result<_, _>>()?;
        let players = 2 * self.n;
        let leakers = 2 * self.l as usize;
        let outcomes = (0..self.trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = rng_from(derive_seed(self.seed, t));
                let xs = [
                    rng.random_range(0..books[0].message_count()),
                    rng.random_range(0..books[1].message_count()),
                ];
                let mut leaking = vec![false; players];
                for i in index::sample(&mut rng, players, leakers) {
                    leaking[i] = true;
                }
                let mut wrong = false;
                let mut tie = false;
                let mut consistent = 0u64;
                for g in 0..2 {
                    let cw = books[g].codeword(xs[g]);
                    let offset = g * self.n;
                    let tr = send(&ch, &cw, |i, _| leaking[offset + i], &mut rng);
                    consistent += tr.iter().zip(&cw).filter(|(&m, &s)| ch.in_window(m, s)).count() as u64;
                    match ml_decode(&books[g], &tr, &ch) {
                        Ok(j) => wrong |= j != xs[g],
                        Err(e) => {
                            wrong = true;
                            tie |= matches!(e, LeakError::Tie { .. });
                        }
                    }
                }
                TrialOutcome {
                    wrong,
                    tie,
                    max_posterior: group_posterior(leakers as u64, consistent),
                }
            })
            .collect();
        Ok(summarize(players, 2 * h, &self.c, outcomes, started))
    }
}

pub fn fixed_two_group_run(
    l: u64,
    n: usize,
    c: &Rational,
    rate: f64,
    trials: u64,
    seed: u64,
) -> Result<ExperimentReport, LeakError> {
    FixedTwoGroupRun {
        l,
        n,
        c: c.clone(),
        rate,
        trials,
        seed,
        window_target: None,
        symbol_budget: DEFAULT_SYMBOL_BUDGET,
    }
    .run()
}

/// Input of a leakage experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LeakConfig {
    Indep(IndepRun),
    FixedTwoGroup(FixedTwoGroupRun),
}

impl LeakConfig {
    pub fn run(&self) -> Result<ExperimentReport, LeakError> {
        match self {
            LeakConfig::Indep(r) => r.run(),
            LeakConfig::FixedTwoGroup(r) => r.run(),
        }
    }
}
