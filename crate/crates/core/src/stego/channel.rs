use serde::{Deserialize, Serialize};

use super::StegoError;
use crate::protocol::sample;
use crate::seed::{derive_seed, rng_from};
use crate::{FiniteDist, Rational};

/// One round of pre-existing chatter: who talks and how.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InnocentRound {
    pub player: usize,
    pub law: FiniteDist,
}

/// Innocent communication as an explicit schedule of per-round laws.
///
/// With `repeat` the schedule cycles forever; otherwise it ends after the last round.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawChannel", into = "RawChannel")]
pub struct InnocentChannel {
    players: usize,
    rounds: Vec<InnocentRound>,
    repeat: bool,
}

#[derive(Serialize, Deserialize)]
struct RawRound {
    player: usize,
    alphabet: Vec<String>,
    probs: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
struct RawChannel {
    players: usize,
    rounds: Vec<RawRound>,
    #[serde(default)]
    repeat: bool,
}

impl TryFrom<RawChannel> for InnocentChannel {
    type Error = StegoError;
    fn try_from(raw: RawChannel) -> Result<Self, StegoError> {
        let rounds = raw
            .rounds
            .into_iter()
            .map(|r| {
                Ok(InnocentRound {
                    player: r.player,
                    law: FiniteDist::new(r.alphabet, r.probs)?,
                })
            })
            .collect::<Result<_, StegoError>>()?;
        InnocentChannel::new(raw.players, rounds, raw.repeat)
    }
}

impl From<InnocentChannel> for RawChannel {
    fn from(c: InnocentChannel) -> Self {
        RawChannel {
            players: c.players,
            rounds: c
                .rounds
                .into_iter()
                .map(|r| RawRound {
                    player: r.player,
                    alphabet: r.law.support().to_vec(),
                    probs: r.law.probs().to_vec(),
                })
                .collect(),
            repeat: c.repeat,
        }
    }
}

impl InnocentChannel {
    pub fn new(players: usize, rounds: Vec<InnocentRound>, repeat: bool) -> Result<Self, StegoError> {
        if rounds.is_empty() {
            return Err(StegoError::Invalid("innocent channel has no rounds".into()));
        }
        if let Some(r) = rounds.iter().find(|r| r.player >= players) {
            return Err(StegoError::Invalid(format!(
                "round speaker {} out of range for {players} players",
                r.player
            )));
        }
        Ok(InnocentChannel {
            players,
            rounds,
            repeat,
        })
    }

    /// Players take turns in index order, each drawing from `law`, forever.
    pub fn iid(players: usize, law: FiniteDist) -> Result<Self, StegoError> {
        let rounds = (0..players)
            .map(|player| InnocentRound {
                player,
                law: law.clone(),
            })
            .collect();
        InnocentChannel::new(players, rounds, true)
    }

    pub fn players(&self) -> usize {
        self.players
    }

    pub fn rounds(&self) -> &[InnocentRound] {
        &self.rounds
    }

    pub fn repeat(&self) -> bool {
        self.repeat
    }

    /// Number of rounds before the chatter stops, `None` when it never does.
    pub fn horizon(&self) -> Option<usize> {
        (!self.repeat).then_some(self.rounds.len())
    }

    pub fn round(&self, k: usize) -> Option<&InnocentRound> {
        if self.repeat {
            self.rounds.get(k % self.rounds.len())
        } else {
            self.rounds.get(k)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InformativenessReport {
    pub player: usize,
    pub horizon: usize,
    pub trials: u64,
    /// Rounds within the horizon in which the player speaks.
    pub speaking_rounds: usize,
    pub median_log2_product: f64,
    pub max_log2_product: f64,
    pub median_product: f64,
    pub max_product: f64,
}

/// Distribution over sampled trajectories of `Π_k p_max(S^k)` over the
/// player's rounds up to `horizon`, where `p_max` is the largest message
/// probability of that round. The product tends to zero for an informative player.
pub fn informativeness_estimate(
    channel: &InnocentChannel,
    player: usize,
    horizon: usize,
    trials: u64,
    seed: u64,
) -> Result<InformativenessReport, StegoError> {
    if horizon == 0 || trials == 0 {
        return Err(StegoError::Invalid("horizon and trials must be positive".into()));
    }
    if player >= channel.players() {
        return Err(StegoError::Invalid(format!("player {player} out of range")));
    }
    let mut logs = Vec::with_capacity(trials as usize);
    let mut speaking_rounds = 0;
    for t in 0..trials {
        let mut rng = rng_from(derive_seed(seed, t));
        let mut log_product = 0.0;
        speaking_rounds = 0;
        for k in 0..horizon {
            let Some(round) = channel.round(k) else { break };
            if round.player == player {
                speaking_rounds += 1;
                log_product += round.law.max_prob().log2();
            }
            // the schedule's laws ignore the prefix, so the draw only advances the trajectory
            sample(&round.law, &mut rng);
        }
        logs.push(log_product);
    }
    logs.sort_by(|a, b| a.total_cmp(b));
    let median = logs[logs.len() / 2];
    let max = *logs.last().expect("trials > 0");
    Ok(InformativenessReport {
        player,
        horizon,
        trials,
        speaking_rounds,
        median_log2_product: median,
        max_log2_product: max,
        median_product: median.exp2(),
        max_product: max.exp2(),
    })
}
