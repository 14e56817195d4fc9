use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{LeakError, WindowChannel};
use crate::seed::{derive_seed, rng_from};

/// Default cap on `message_count · n`.
pub const DEFAULT_SYMBOL_BUDGET: u64 = 1 << 28;

const MAX_MESSAGE_BITS: u32 = 30;

/// What is persisted: the codewords are regenerated from the seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodebookSpec {
    pub seed: u64,
    /// `log2` of the number of codewords.
    pub h: u32,
    pub n: usize,
    pub d: u64,
}

/// I.i.d. uniform codewords of length `n` over `{1..d}`.
///
/// Codeword `j` is drawn from its own stream seeded by `derive_seed(seed, j)`.
/// Stored as one position bitmask per symbol so that decoding is popcounts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "CodebookSpec", try_from = "CodebookSpec")]
pub struct Codebook {
    spec: CodebookSpec,
    words: usize,
    masks: Vec<u64>,
}

impl From<Codebook> for CodebookSpec {
    fn from(b: Codebook) -> Self {
        b.spec
    }
}

impl TryFrom<CodebookSpec> for Codebook {
    type Error = LeakError;
    fn try_from(s: CodebookSpec) -> Result<Self, LeakError> {
        random_codebook(s.h, s.n, s.d, s.seed, DEFAULT_SYMBOL_BUDGET)
    }
}

/// Bits carried by a code of the given rate and length, `ceil(rate · n)`.
pub fn message_bits(rate: f64, n: usize) -> Result<u32, LeakError> {
    if !(rate.is_finite() && rate >= 0.0) {
        return Err(LeakError::Range(format!("rate must be finite and non-negative, got {rate}")));
    }
    // guard against 0.1 * 30 = 3.0000000000000004
    let h = (rate * n as f64 - 1e-9).ceil().max(0.0);
    if h > MAX_MESSAGE_BITS as f64 {
        return Err(LeakError::Range(format!("{h} message bits exceeds {MAX_MESSAGE_BITS}")));
    }
    Ok(h as u32)
}

pub fn random_codebook(h: u32, n: usize, d: u64, seed: u64, budget: u64) -> Result<Codebook, LeakError> {
    if d == 0 || n == 0 {
        return Err(LeakError::Range(format!("need n, d > 0, got n={n}, d={d}")));
    }
    if h > MAX_MESSAGE_BITS {
        return Err(LeakError::Range(format!("{h} message bits exceeds {MAX_MESSAGE_BITS}")));
    }
    let count = 1usize << h;
    let needed = (count as u128) * (n as u128);
    if needed > budget as u128 {
        return Err(LeakError::BudgetExceeded { needed, budget });
    }
    let words = n.div_ceil(64);
    let stride = d as usize * words;
    let mut masks = vec![0u64; count * stride];
    masks.par_chunks_mut(stride).enumerate().for_each(|(j, chunk)| {
        let mut rng = rng_from(derive_seed(seed, j as u64));
        for i in 0..n {
            let s = rng.random_range(0..d) as usize;
            chunk[s * words + i / 64] |= 1 << (i % 64);
        }
    });
    Ok(Codebook {
        spec: CodebookSpec { seed, h, n, d },
        words,
        masks,
    })
}

impl Codebook {
    pub fn spec(&self) -> CodebookSpec {
        self.spec
    }

    pub fn message_count(&self) -> usize {
        1 << self.spec.h
    }

    pub fn len(&self) -> usize {
        self.spec.n
    }

    pub fn is_empty(&self) -> bool {
        self.spec.n == 0
    }

    fn stride(&self) -> usize {
        self.spec.d as usize * self.words
    }

    fn masks_of(&self, j: usize) -> &[u64] {
        &self.masks[j * self.stride()..(j + 1) * self.stride()]
    }

    /// Codeword `j` as 1-based symbols.
    pub fn codeword(&self, j: usize) -> Vec<u64> {
        let m = self.masks_of(j);
        (0..self.spec.n)
            .map(|i| {
                let s = (0..self.spec.d as usize)
                    .find(|&s| m[s * self.words + i / 64] >> (i % 64) & 1 == 1)
                    .expect("every position holds one symbol");
                s as u64 + 1
            })
            .collect()
    }
}

fn transcript_masks(book: &Codebook, transcript: &[u64], ch: &WindowChannel) -> Result<Vec<u64>, LeakError> {
    let spec = book.spec;
    if ch.d() != spec.d {
        return Err(LeakError::Transcript(format!("channel alphabet {} vs codebook {}", ch.d(), spec.d)));
    }
    if transcript.len() != spec.n {
        return Err(LeakError::Transcript(format!(
            "length {} vs codeword length {}",
            transcript.len(),
            spec.n
        )));
    }
    let mut masks = vec![0u64; book.stride()];
    for (i, &t) in transcript.iter().enumerate() {
        if t == 0 || t > spec.d {
            return Err(LeakError::Transcript(format!("symbol {t} outside 1..={}", spec.d)));
        }
        for s in 0..spec.d {
            if ch.in_window(t, s + 1) {
                masks[s as usize * book.words + i / 64] |= 1 << (i % 64);
            }
        }
    }
    Ok(masks)
}

/// Positions where the transcript symbol lies in the window of codeword `j`'s symbol.
pub fn match_count(book: &Codebook, j: usize, transcript: &[u64], ch: &WindowChannel) -> Result<u32, LeakError> {
    let t = transcript_masks(book, transcript, ch)?;
    Ok(score(book.masks_of(j), &t))
}

fn score(cw: &[u64], t: &[u64]) -> u32 {
    cw.iter().zip(t).map(|(a, b)| (a & b).count_ones()).sum()
}

/// Maximum-likelihood codeword index.
///
/// The likelihood of codeword `j` is `p_out^n · (p_in/p_out)^m_j` with `m_j` its
/// match count and `p_in > p_out`, so ranking by match count is exact.
pub fn ml_decode(book: &Codebook, transcript: &[u64], ch: &WindowChannel) -> Result<usize, LeakError> {
    let t = transcript_masks(book, transcript, ch)?;
    let mut best = 0;
    let mut best_score = 0;
    let mut ties = 0;
    for j in 0..book.message_count() {
        let s = score(book.masks_of(j), &t);
        if j == 0 || s > best_score {
            best = j;
            best_score = s;
            ties = 1;
        } else if s == best_score {
            ties += 1;
        }
    }
    if ties > 1 {
        return Err(LeakError::Tie { count: ties });
    }
    Ok(best)
}
