//! Covert leaking of a secret in front of an eavesdropper, with exact
//! bookkeeping of how much the eavesdropper learns about who leaked.

pub mod game;
pub mod leakcode;
pub mod prob;
pub mod protocol;
pub mod rational;
pub mod seed;
pub mod stego;
pub mod suspicion;

pub use prob::{ExtendedReal, FiniteDist, JointDist, ProbError};
pub use rational::{ratio, Rational};
pub use seed::derive_seed;

/// Version of this library, embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
