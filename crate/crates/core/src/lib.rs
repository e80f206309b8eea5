//! Closed-form smoothing of classical divergences over total-variation balls.
//!
//! The crate provides:
//!
//! - validated probability vectors, Ky-Fan norms, likelihood-ratio orderings
//!   ([`prob`]);
//! - majorization and relative-majorization order tests with an independent
//!   LP feasibility oracle ([`majorization`]);
//! - the extremal elements of total-variation balls: flattest/steepest
//!   approximations, ratio clipping relative to an arbitrary reference, and
//!   subnormalized clipping ([`smoothing`]);
//! - Rényi divergences of every order, the hypothesis-testing divergence in
//!   closed form, and smoothed variants of both ([`divergence`]);
//! - the optimal universal correction terms relating smoothed and unsmoothed
//!   divergences of different orders ([`bounds`]);
//! - explicit families that witness tightness of those corrections, plus
//!   brute-force oracles used to verify the closed forms ([`families`],
//!   [`oracle`]).
//!
//! All logarithms are base 2; values are bits. The crate is `no_std`
//! compatible (`--no-default-features --features libm`), requiring only
//! `alloc`.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("divsmooth-core requires either the `std` or the `libm` feature");

extern crate alloc;

pub mod bounds;
pub mod divergence;
pub mod ext;
pub mod families;
pub mod majorization;
mod math;
pub mod oracle;
pub mod prob;
pub mod smoothing;

pub use ext::ExtReal;
pub use prob::{PairOrdering, ProbVec, SubProbVec};

use thiserror::Error;

/// Normalization tolerance for validating probability vectors.
pub const TOL_NORM: f64 = 1e-9;

/// Slack used in order comparisons on derived reals (partial sums, ratios).
pub const ORDER_SLACK: f64 = 1e-12;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("entry {index} is negative: {value}")]
    NegativeEntry { index: usize, value: f64 },
    #[error("entries do not sum to 1 (sum = {sum})")]
    NotNormalized { sum: f64 },
    #[error("entry {index} is not finite")]
    NonFinite { index: usize },
    #[error("empty input")]
    Empty,
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("input vector must be sorted in non-increasing order")]
    NotSorted,
    #[error("vector of this family is not sorted at dimension {dim}")]
    NotSortedForThisD { dim: usize },
    #[error("gamma = {gamma} outside [{lo}, {hi}]")]
    GammaOutOfRange { gamma: f64, lo: f64, hi: f64 },
    #[error("clip levels are infeasible: {reason}")]
    InfeasibleClip { reason: &'static str },
    #[error("vector is already inside the ball")]
    InsideBall,
    #[error("dimension {dim} exceeds oracle scale limit {max}")]
    OracleScaleExceeded { dim: usize, max: usize },
    #[error("parameters outside the supported regime: {reason}")]
    OutOfRegime { reason: &'static str },
    #[error("order {order} is not supported here")]
    UnsupportedOrder { order: f64 },
    #[error("family constraints violated: {reason}")]
    ConstraintViolated { reason: &'static str },
    #[error("objective arguments outside the domain: {reason}")]
    DomainViolated { reason: &'static str },
    #[error("infeasible parameters: {reason}")]
    Infeasible { reason: &'static str },
    #[error("epsilon = {eps} outside {range}")]
    EpsOutOfRange { eps: f64, range: &'static str },
    #[error("indeterminate extended-real arithmetic: {0}")]
    Indeterminate(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
