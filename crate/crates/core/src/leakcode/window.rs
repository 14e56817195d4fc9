use num_traits::ToPrimitive;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::LeakError;
use crate::{JointDist, Rational};

/// Largest alphabet accepted for a window channel.
const MAX_ALPHABET: u64 = 1 << 16;

/// Smallest `(a, d)` with `a/d = b(1-c) / (c(1-b))`.
pub fn window_params(b: &Rational, c: &Rational) -> Result<(u64, u64), LeakError> {
    if !b.is_positive() || b >= c || *c >= Rational::one() {
        return Err(LeakError::Range(format!("need 0 < b < c < 1, got b={b}, c={c}")));
    }
    let r = (b * c.complement()) / (c * b.complement());
    let (a, d) = (r.numer().to_u64(), r.denom().to_u64());
    match (a, d) {
        (Some(a), Some(d)) if d <= MAX_ALPHABET => Ok((a, d)),
        _ => Err(LeakError::Range(format!("window alphabet for b={b}, c={c} exceeds {MAX_ALPHABET}"))),
    }
}

/// One-shot channel over `{1..d}`: a leaker sends uniformly from the size-`a`
/// window belonging to its secret symbol, a non-leaker uniformly from everything.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "WindowSpec")]
pub struct WindowChannel {
    b: Rational,
    c: Rational,
    a: u64,
    d: u64,
}

#[derive(Deserialize)]
struct WindowSpec {
    b: Rational,
    c: Rational,
}

impl TryFrom<WindowSpec> for WindowChannel {
    type Error = LeakError;
    fn try_from(s: WindowSpec) -> Result<Self, LeakError> {
        WindowChannel::new(s.b, s.c)
    }
}

impl WindowChannel {
    pub fn new(b: Rational, c: Rational) -> Result<Self, LeakError> {
        let (a, d) = window_params(&b, &c)?;
        Ok(WindowChannel { b, c, a, d })
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn c(&self) -> &Rational {
        &self.c
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    /// Window of a secret symbol, as 1-based symbols in window order.
    pub fn window(&self, x_symbol: u64) -> Vec<u64> {
        let start = ((x_symbol - 1) % self.d) * (self.a % self.d) % self.d;
        (0..self.a).map(|j| (start + j) % self.d + 1).collect()
    }

    pub fn in_window(&self, message: u64, x_symbol: u64) -> bool {
        let start = ((x_symbol - 1) % self.d) * (self.a % self.d) % self.d;
        (message - 1 + self.d - start) % self.d < self.a
    }

    pub fn leak_message<R: Rng + ?Sized>(&self, x_symbol: u64, leaking: bool, rng: &mut R) -> u64 {
        if leaking {
            let start = ((x_symbol - 1) % self.d) * (self.a % self.d) % self.d;
            (start + rng.random_range(0..self.a)) % self.d + 1
        } else {
            rng.random_range(1..=self.d)
        }
    }

    /// `Pr(message | x)` for a message inside the window.
    pub fn in_window_prob(&self) -> Rational {
        &self.b / Rational::from_integer(self.a) + self.out_window_prob()
    }

    /// `Pr(message | x)` for a message outside the window.
    pub fn out_window_prob(&self) -> Rational {
        self.b.complement() / Rational::from_integer(self.d)
    }

    /// `Pr(L = 1 | message, x)`: zero outside the window, `c` inside.
    pub fn posterior_leak(&self, message: u64, x_symbol: u64) -> Rational {
        if !self.in_window(message, x_symbol) {
            return Rational::zero();
        }
        let leak = &self.b / Rational::from_integer(self.a);
        &leak / (&leak + self.out_window_prob())
    }

    /// Joint law of `(X, L, A)` for one use with `X` uniform on `{1..d}`.
    pub fn one_shot_joint(&self) -> JointDist {
        let d = Rational::from_integer(self.d);
        let px = d.recip();
        let quiet = &px * self.b.complement() / &d;
        let loud = &px * &self.b / Rational::from_integer(self.a);
        let mut cells = Vec::new();
        for x in 1..=self.d {
            for m in 1..=self.d {
                cells.push((vec![x.to_string(), "0".into(), m.to_string()], quiet.clone()));
            }
            for m in self.window(x) {
                cells.push((vec![x.to_string(), "1".into(), m.to_string()], loud.clone()));
            }
        }
        JointDist::new(vec!["X".into(), "L".into(), "A".into()], cells)
            .expect("window channel cells sum to one")
    }

    /// `I(X; A)` of [`one_shot_joint`](Self::one_shot_joint), by enumeration.
    pub fn one_shot_information(&self) -> f64 {
        crate::prob::mutual_information(&self.one_shot_joint(), &["X"], &["A"])
            .expect("axes exist")
    }
}
