//! Bell-test harness for classical distributed simulations.
//!
//! Two measurement stations each receive only their own setting and a shared
//! hidden variable, and reply with a `±1` outcome. The crate provides the
//! pieces needed to run such experiments and to show that no local strategy
//! reaches the full-amplitude singlet correlation `-cos θ`:
//!
//! * [`grid`], [`prng`], [`strategy`], [`singlet`]: the domain model, the
//!   shared splitmix64 stream and the built-in strategies.
//! * [`fourier`]: discrete Fourier analysis of measurement functions and the
//!   spectral impossibility certificate.
//! * [`stats`]: CHSH estimation, the exact binomial martingale test and the
//!   Fine/Boole feasibility checkers.
//! * [`harness`]: run configuration, in-process and TCP transports, run logs
//!   and replay.

pub mod fourier;
pub mod grid;
pub mod harness;
pub mod prng;
pub mod singlet;
pub mod stats;
pub mod strategy;

pub use grid::{Outcome, SettingGrid, SettingIndex};
pub use prng::{hidden_stream, prng_next, HiddenVariable, SplitMix64};
pub use strategy::{LocalStrategy, StrategyPair};

use thiserror::Error;

/// Errors raised by the domain model.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("grid must have an even number of points >= 4, got {0}")]
    InvalidGrid(usize),

    #[error("setting index {index} outside grid of {points} points")]
    IndexOutOfRange { index: usize, points: usize },

    #[error("{degrees} degrees is not a point of a {points}-point grid")]
    OffGrid { degrees: f64, points: usize },

    #[error("outcome must be -1 or +1, got {0}")]
    InvalidOutcome(i64),

    #[error("trial numbers start at 1")]
    ZeroTrial,

    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),
}
