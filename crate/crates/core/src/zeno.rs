//! Exact simulation of the single-photon variable-angle Zeno protocol.
//!
//! A photon cycles through an interferometer with one object in the probe
//! arm. One step = interaction with the object followed by the rotation
//!
//! ```text
//! a′ = a cos θ − α b sin θ
//! b′ = α b cos θ + a sin θ        (absorbed amplitude: β b)
//! ```
//!
//! applied to the (empty-arm, object-arm) amplitudes (a, b) of each
//! hypothesis. After the first rotation θ⁰ every subsequent angle is
//! chosen by [`adaptive_angle`] so that both hypotheses absorb the photon
//! with the same probability — absorption then reveals nothing, and the
//! protocol is repeated until the photon survives. Under that rule the
//! mean number of absorbed photons approaches the lower bound of
//! [`crate::bound`] as θ⁰ → 0.
//!
//! Discrimination happens only on surviving photons, so the error
//! probability of a run is computed from the overlap of the two
//! survival-conditioned states, [`ZenoState::conditional_overlap`]. The
//! full-state inner product including absorbed components,
//! [`ZenoState::signed_overlap`], is what the proof's per-step inequality
//! constrains and is kept alongside for verification.

use serde::{Deserialize, Serialize};

use crate::bound::{absorbed_photon_bound, helstrom_error};
use crate::types::{ErrorProbability, PriorPair, RealPair};
use crate::Error;

/// Signed quantities closer to zero than this are sign-compatible with
/// anything in the stopping test.
pub const SIGN_EPSILON: f64 = 1e-14;

/// Both the angle numerator and denominator below this is a stalled
/// (0/0) adaptive-angle state.
const STALL_EPSILON: f64 = 1e-15;

/// Protocol state at step j: real amplitudes per hypothesis plus
/// absorption bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZenoState {
    /// Steps applied so far.
    pub step: usize,
    /// Empty-arm amplitude under hypothesis 1.
    pub a1: f64,
    /// Object-arm amplitude under hypothesis 1.
    pub b1: f64,
    pub a2: f64,
    pub b2: f64,
    /// Σ_{k<j} |β₁β₂| b₁^k b₂^k — the absorbed components' contribution
    /// to the full inner product ⟨Ψ₁|Ψ₂⟩.
    pub absorbed_overlap: f64,
    /// Accumulated absorption probability Σ_{k<j} β₁²(b₁^k)² under
    /// hypothesis 1.
    pub q1: f64,
    pub q2: f64,
}

impl ZenoState {
    /// The state before any step: photon in the empty arm, nothing
    /// absorbed.
    pub fn initial() -> Self {
        Self {
            step: 0,
            a1: 1.0,
            b1: 0.0,
            a2: 1.0,
            b2: 0.0,
            absorbed_overlap: 0.0,
            q1: 0.0,
            q2: 0.0,
        }
    }

    /// Signed full-state inner product a₁a₂ + b₁b₂ + s, whose absolute
    /// value is the overlap f^j of the proof's inequality chain.
    pub fn signed_overlap(&self) -> f64 {
        self.a1 * self.a2 + self.b1 * self.b2 + self.absorbed_overlap
    }

    /// Signed overlap of the two survival-conditioned photon states,
    /// (a₁a₂ + b₁b₂)/√((1−q₁)(1−q₂)).
    ///
    /// This is the overlap the final measurement discriminates under the
    /// repeat-until-success strategy: absorbed runs are discarded and,
    /// with equal per-step absorption, carry no which-object information.
    pub fn conditional_overlap(&self) -> f64 {
        let survive = (1.0 - self.q1) * (1.0 - self.q2);
        if survive <= 0.0 {
            return 0.0;
        }
        (self.a1 * self.a2 + self.b1 * self.b2) / survive.sqrt()
    }

    /// |a_i² + b_i² + q_i − 1| per hypothesis; zero up to rounding.
    pub fn norm_defects(&self) -> (f64, f64) {
        (
            (self.a1 * self.a1 + self.b1 * self.b1 + self.q1 - 1.0).abs(),
            (self.a2 * self.a2 + self.b2 * self.b2 + self.q2 - 1.0).abs(),
        )
    }
}

/// Apply one interaction-plus-rotation step with angle `theta`.
///
/// Absorption is booked from the pre-step object-arm amplitudes (the β·b
/// amplitude leaving the photon sector), then the amplitudes are updated.
pub fn step(state: &ZenoState, pair: &RealPair, theta: f64) -> ZenoState {
    let (r1, r2) = pair.absorption_probs();
    let q1 = state.q1 + r1 * state.b1 * state.b1;
    let q2 = state.q2 + r2 * state.b2 * state.b2;
    let absorbed_overlap = state.absorbed_overlap + pair.beta_product() * state.b1 * state.b2;
    let (cos, sin) = (theta.cos(), theta.sin());
    ZenoState {
        step: state.step + 1,
        a1: state.a1 * cos - pair.alpha1() * state.b1 * sin,
        b1: pair.alpha1() * state.b1 * cos + state.a1 * sin,
        a2: state.a2 * cos - pair.alpha2() * state.b2 * sin,
        b2: pair.alpha2() * state.b2 * cos + state.a2 * sin,
        absorbed_overlap,
        q1,
        q2,
    }
}

/// The rotation angle equalizing the next step's absorption amplitudes,
/// tan θ = (α₁β₁b₁ − α₂β₂b₂)/(β₂a₂ − β₁a₁), folded to the principal
/// branch (−π/2, π/2].
///
/// Errors with [`Error::StalledAngle`] on the 0/0 form (both numerator
/// and denominator below 1e−15), which occurs at the exact initial state
/// of an equal-|β| pair.
pub fn adaptive_angle(state: &ZenoState, pair: &RealPair) -> Result<f64, Error> {
    match angle_parts(state, pair) {
        Some((num, den)) => Ok(fold_principal(num.atan2(den))),
        None => Err(Error::StalledAngle),
    }
}

fn angle_parts(state: &ZenoState, pair: &RealPair) -> Option<(f64, f64)> {
    let num = pair.alpha1() * pair.beta1() * state.b1 - pair.alpha2() * pair.beta2() * state.b2;
    let den = pair.beta2() * state.a2 - pair.beta1() * state.a1;
    if num.abs() < STALL_EPSILON && den.abs() < STALL_EPSILON {
        None
    } else {
        Some((num, den))
    }
}

/// 0/0 means the equal-absorption condition holds for every angle
/// (identical dynamics); the trajectory then rotates by zero.
fn angle_or_zero(state: &ZenoState, pair: &RealPair) -> f64 {
    match angle_parts(state, pair) {
        Some((num, den)) => fold_principal(num.atan2(den)),
        None => 0.0,
    }
}

/// The equal-absorption condition is tangent-periodic, so fold atan2's
/// (−π, π] onto (−π/2, π/2] to keep rotations small.
fn fold_principal(theta: f64) -> f64 {
    if theta > std::f64::consts::FRAC_PI_2 {
        theta - std::f64::consts::PI
    } else if theta <= -std::f64::consts::FRAC_PI_2 {
        theta + std::f64::consts::PI
    } else {
        theta
    }
}

fn sign_of(x: f64) -> i8 {
    if x.abs() < SIGN_EPSILON {
        0
    } else if x > 0.0 {
        1
    } else {
        -1
    }
}

/// f^j, f^{j+1} and their difference must all be ≥ 0 or all ≤ 0; values
/// within [`SIGN_EPSILON`] of zero are compatible with both signs.
fn signs_compatible(before: f64, after: f64, difference: f64) -> bool {
    let mut positive = false;
    let mut negative = false;
    for s in [sign_of(before), sign_of(after), sign_of(difference)] {
        positive |= s > 0;
        negative |= s < 0;
    }
    !(positive && negative)
}

/// A lazily advanced variable-angle trajectory: the first step rotates by
/// θ⁰, every later step by the adaptive angle.
#[derive(Debug, Clone)]
pub struct Protocol<'a> {
    pair: &'a RealPair,
    state: ZenoState,
    next_theta: f64,
    previous_overlap: f64,
}

impl<'a> Protocol<'a> {
    pub fn new(pair: &'a RealPair, theta0: f64) -> Result<Self, Error> {
        if theta0 == 0.0 {
            return Err(Error::ZeroInitialAngle);
        }
        if !theta0.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "initial angle {theta0} is not finite"
            )));
        }
        let state = ZenoState::initial();
        Ok(Self {
            pair,
            previous_overlap: state.conditional_overlap(),
            state,
            next_theta: theta0,
        })
    }

    pub fn state(&self) -> &ZenoState {
        &self.state
    }

    /// The angle the next call to [`Self::advance`] will rotate by.
    pub fn next_theta(&self) -> f64 {
        self.next_theta
    }

    /// Take one step; returns whether the stopping condition held across
    /// it (all of f^j, f^{j+1}, f^j − f^{j+1} sharing a sign).
    pub fn advance(&mut self) -> bool {
        let next = step(&self.state, self.pair, self.next_theta);
        let overlap = next.conditional_overlap();
        let ok = signs_compatible(
            self.previous_overlap,
            overlap,
            self.previous_overlap - overlap,
        );
        self.previous_overlap = overlap;
        self.state = next;
        self.next_theta = angle_or_zero(&self.state, self.pair);
        ok
    }
}

/// Largest feasible step count: the first step index at which the
/// stopping condition fails, or `cap`.
pub fn max_steps(pair: &RealPair, theta0: f64, cap: usize) -> Result<usize, Error> {
    let mut protocol = Protocol::new(pair, theta0)?;
    for j in 0..cap {
        if !protocol.advance() {
            return Ok(j);
        }
    }
    Ok(cap)
}

/// Summary of one (θ⁰, K) protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    /// Initial rotation angle.
    pub theta0: f64,
    /// Number of steps.
    pub k: usize,
    /// Final conditional overlap |⟨ψ₁|ψ₂⟩| of the surviving states.
    pub f_final: f64,
    /// Helstrom error probability at that overlap.
    pub pe: ErrorProbability,
    /// Expected absorbed photons under repeat-until-success, object 1:
    /// q₁/(1 − q₁).
    pub nabs1: f64,
    pub nabs2: f64,
    /// p₁·nabs1 + p₂·nabs2.
    pub nabs_mean: f64,
    /// Lower bound evaluated at the achieved error probability.
    pub bound: f64,
    /// nabs_mean − bound; never meaningfully negative.
    pub gap: f64,
}

fn result_at(state: &ZenoState, pair: &RealPair, priors: &PriorPair, theta0: f64) -> RunResult {
    let f_final = state.conditional_overlap().abs().min(1.0);
    let pe = helstrom_error(f_final, priors);
    let nabs1 = repeat_until_success(state.q1);
    let nabs2 = repeat_until_success(state.q2);
    let nabs_mean = priors.p1() * nabs1 + priors.p2() * nabs2;
    let bound = absorbed_photon_bound(pair.pair(), priors, pe).bound;
    RunResult {
        theta0,
        k: state.step,
        f_final,
        pe,
        nabs1,
        nabs2,
        nabs_mean,
        bound,
        gap: nabs_mean - bound,
    }
}

/// Expected absorbed photons when rerunning until the photon survives:
/// q/(1 − q).
fn repeat_until_success(q: f64) -> f64 {
    if q <= 0.0 {
        0.0
    } else if q >= 1.0 {
        f64::INFINITY
    } else {
        q / (1.0 - q)
    }
}

/// Run K steps (first rotation θ⁰, then adaptive) and summarize.
///
/// Errors if K = 0, θ⁰ = 0, or the stopping condition fails before the
/// K-th step.
pub fn run_protocol(
    pair: &RealPair,
    priors: &PriorPair,
    theta0: f64,
    k: usize,
) -> Result<RunResult, Error> {
    if k == 0 {
        return Err(Error::InvalidConfig("step count K must be >= 1".into()));
    }
    let mut protocol = Protocol::new(pair, theta0)?;
    for j in 0..k {
        if !protocol.advance() {
            return Err(Error::SignConditionViolated { step: j });
        }
    }
    Ok(result_at(protocol.state(), pair, priors, theta0))
}

/// Sweep policy: which K to report and how long a trajectory may get.
#[derive(Debug, Clone, Copy)]
pub struct SweepSpec {
    /// Keep K = 1, 1 + stride, 1 + 2·stride, …
    pub k_stride: usize,
    /// Trajectory cap passed to the stopping rule.
    pub max_steps_cap: usize,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            k_stride: 1,
            max_steps_cap: 10_000,
        }
    }
}

fn sweep_one(
    pair: &RealPair,
    priors: &PriorPair,
    theta0: f64,
    spec: &SweepSpec,
) -> Result<Vec<RunResult>, Error> {
    let mut protocol = Protocol::new(pair, theta0)?;
    let mut rows = Vec::new();
    let stride = spec.k_stride.max(1);
    for _ in 0..spec.max_steps_cap {
        if !protocol.advance() {
            break;
        }
        let k = protocol.state().step;
        if (k - 1) % stride == 0 {
            rows.push(result_at(protocol.state(), pair, priors, theta0));
        }
    }
    Ok(rows)
}

/// Evaluate all admitted (θ⁰, K) protocols for each initial angle,
/// in the order given. Independent trajectories run in parallel with the
/// `parallel` feature; results are identical to [`sweep_sequential`].
pub fn sweep(
    pair: &RealPair,
    priors: &PriorPair,
    theta0s: &[f64],
    spec: &SweepSpec,
) -> Result<Vec<RunResult>, Error> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let per_theta: Vec<Vec<RunResult>> = theta0s
            .par_iter()
            .map(|&theta0| sweep_one(pair, priors, theta0, spec))
            .collect::<Result<_, _>>()?;
        Ok(per_theta.into_iter().flatten().collect())
    }
    #[cfg(not(feature = "parallel"))]
    sweep_sequential(pair, priors, theta0s, spec)
}

/// Single-threaded sweep with the same output as [`sweep`].
pub fn sweep_sequential(
    pair: &RealPair,
    priors: &PriorPair,
    theta0s: &[f64],
    spec: &SweepSpec,
) -> Result<Vec<RunResult>, Error> {
    let mut rows = Vec::new();
    for &theta0 in theta0s {
        rows.extend(sweep_one(pair, priors, theta0, spec)?);
    }
    Ok(rows)
}

/// Deterministic log-uniform samples on [lo, hi], the default way initial
/// angles are drawn for sweeps.
pub fn log_uniform_samples(count: usize, lo: f64, hi: f64, seed: u64) -> Result<Vec<f64>, Error> {
    use rand::Rng;
    if !(lo > 0.0 && hi >= lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "log-uniform range [{lo}, {hi}] requires 0 < lo <= hi"
        )));
    }
    let mut rng = crate::rng::substream(seed, 0);
    let (ln_lo, ln_hi) = (lo.ln(), hi.ln());
    Ok((0..count)
        .map(|_| (ln_lo + rng.random::<f64>() * (ln_hi - ln_lo)).exp())
        .collect())
}
