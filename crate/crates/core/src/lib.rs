//! Simulation and verification tools for minimal-absorption discrimination
//! of two transparencies.
//!
//! Two objects transmit a single photon with complex amplitudes α₁ and α₂
//! (and absorb it with amplitudes β₁, β₂, |α|² + |β|² = 1). Any quantum
//! protocol that decides which object is present with error probability
//! P_E must absorb, on average, at least
//!
//! ```text
//! N̄ ≥ 2|β₁β₂| (√(p₁p₂) − √(P_E(1−P_E))) / (|1 − ᾱ₁α₂| − |β₁β₂|)
//! ```
//!
//! photons, where p₁, p₂ are the prior probabilities of the two objects.
//! This crate evaluates that bound in closed form ([`bound`]), simulates
//! the variable-angle Zeno interferometer protocol that approaches it for
//! real amplitudes and equal priors ([`zeno`]), simulates the classical
//! sequential photon-counting baseline ([`classical`]), and numerically
//! verifies the inequality chain behind the bound on random multi-photon
//! coefficient tensors ([`verifier`]).
//!
//! With the default `parallel` feature, Monte Carlo trials, fuzz cases and
//! protocol sweeps run on a rayon thread pool; disabling the feature keeps
//! every public entry point available with a sequential implementation.
//! Either path produces bit-identical results for the same seed.

pub mod bound;
pub mod classical;
pub mod rng;
pub mod types;
pub mod verifier;
pub mod zeno;

pub use types::{ErrorProbability, PriorPair, RealPair, TransparencyPair};

/// Errors shared by the whole crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("|{which}| = {magnitude} exceeds 1: transmission amplitudes must lie in the unit disc")]
    AmplitudeOutOfRange { which: &'static str, magnitude: f64 },

    #[error("priors ({p1}, {p2}) are not a probability pair")]
    InvalidPriors { p1: f64, p2: f64 },

    #[error("error probability {0} outside [0, 1/2]")]
    InvalidErrorProbability(f64),

    #[error("|beta1 beta2| = 0: interaction-free regime, use absorbed_photon_bound which handles it")]
    InteractionFree,

    #[error("P_E = {pe} infeasible for these priors (maximum feasible P_E is {max_pe})")]
    InfeasibleErrorProbability { pe: f64, max_pe: f64 },

    #[error("{which} has a nonzero imaginary part; this operation requires real amplitudes")]
    ComplexAmplitude { which: &'static str },

    #[error("adaptive angle is 0/0 at this state: the protocol is stalled")]
    StalledAngle,

    #[error("initial angle is zero: the protocol never couples to the object")]
    ZeroInitialAngle,

    #[error("sign condition violated at step {step}: K exceeds the feasible step count")]
    SignConditionViolated { step: usize },

    #[error("tensor shapes differ: {left:?} vs {right:?}")]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("coefficient tensor has zero norm")]
    ZeroTensor,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// Cap the rayon thread pool used by the parallel entry points.
///
/// Call once, before any parallel work. Does nothing (and cannot fail)
/// when the `parallel` feature is disabled or `threads` is `None`.
pub fn init_thread_cap(threads: Option<usize>) -> Result<(), Error> {
    #[cfg(feature = "parallel")]
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::InvalidConfig("thread cap must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(())
}
