//! Monte Carlo simulation of the sequential photon-counting baseline.
//!
//! Photons are sent through the object one at a time; each is absorbed
//! with probability |β_i|². After m absorptions out of n photons the
//! posterior probability of object 1 is
//!
//! ```text
//! P(1|m,n) = p₁L₁ / (p₁L₁ + p₂L₂),   L_i = (|α_i|²)^(n−m) (|β_i|²)^m
//! ```
//!
//! and the trial stops as soon as the posterior leaves [x, 1 − x] —
//! deciding object 1 above 1 − x, object 2 below x — or when the photon
//! budget runs out (the trial is then decided by maximum posterior and
//! counted as undecided). Sweeping the tolerance x traces out the
//! (P_E, mean absorbed photons) curve the quantum bound is compared
//! against.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng::{mean_and_se, substream};
use crate::types::{PriorPair, RealPair};
use crate::Error;

/// Which object is actually present in a trial, and which one a trial
/// decides on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Hypothesis {
    Object1,
    Object2,
}

/// Exponent applied to the amplitudes when forming likelihoods.
///
/// `Squared` uses per-photon probabilities |α|², |β|² — the reading that
/// reproduces the exact single-photon error anchor. `Literal` uses the
/// raw magnitudes |α|, |β| (a tempered posterior) and is provided for
/// side-by-side comparison runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LikelihoodExponent {
    Squared,
    Literal,
}

impl LikelihoodExponent {
    fn scale(self) -> f64 {
        match self {
            Self::Squared => 1.0,
            Self::Literal => 0.5,
        }
    }
}

/// Configuration of one estimation run.
#[derive(Debug, Clone, Copy)]
pub struct ClassicalConfig {
    pub pair: RealPair,
    pub priors: PriorPair,
    /// Maximum tolerated posterior error, in (0, 1/2).
    pub x: f64,
    /// Photon budget per trial.
    pub max_photons: u32,
    pub trials: u64,
    pub seed: u64,
    pub likelihood_exponent: LikelihoodExponent,
}

impl ClassicalConfig {
    pub fn new(pair: RealPair, priors: PriorPair, x: f64, trials: u64, seed: u64) -> Self {
        Self {
            pair,
            priors,
            x,
            max_photons: 100_000,
            trials,
            seed,
            likelihood_exponent: LikelihoodExponent::Squared,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.x > 0.0 && self.x < 0.5) {
            return Err(Error::InvalidConfig(format!(
                "tolerance x = {} must lie strictly between 0 and 1/2",
                self.x
            )));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be >= 1".into()));
        }
        if self.max_photons == 0 {
            return Err(Error::InvalidConfig("max_photons must be >= 1".into()));
        }
        Ok(())
    }
}

/// Log-likelihoods of (m absorbed out of n) under both objects, in the
/// squared-amplitude basis, with the 0·ln 0 = 0 convention.
fn log_likelihoods(absorbed: u64, sent: u64, pair: &RealPair) -> (f64, f64) {
    let (t1, t2) = pair.transmission_probs();
    let (r1, r2) = pair.absorption_probs();
    let transmitted = (sent - absorbed) as f64;
    let absorbed = absorbed as f64;
    let term = |count: f64, p: f64| -> f64 {
        if count == 0.0 {
            0.0
        } else {
            count * p.ln() // ln 0 = −inf marks an impossible observation
        }
    };
    (
        term(transmitted, t1) + term(absorbed, r1),
        term(transmitted, t2) + term(absorbed, r2),
    )
}

fn posterior_from_loglik(
    l1: f64,
    l2: f64,
    priors: &PriorPair,
    exponent: LikelihoodExponent,
) -> Result<f64, Error> {
    if l1 == f64::NEG_INFINITY && l2 == f64::NEG_INFINITY {
        return Err(Error::InvalidConfig(
            "observation impossible under both objects".into(),
        ));
    }
    if l1 == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    if l2 == f64::NEG_INFINITY {
        return Ok(if priors.p1() > 0.0 { 1.0 } else { 0.0 });
    }
    // p1 L1 / (p1 L1 + p2 L2) stabilized through the log-likelihood
    // difference; exp may saturate to 0 or inf and the ratio stays exact.
    let d = (l2 - l1) * exponent.scale();
    Ok(priors.p1() / (priors.p1() + priors.p2() * d.exp()))
}

/// Posterior probability of object 1 after observing `absorbed` of
/// `sent` photons.
pub fn posterior(
    absorbed: u64,
    sent: u64,
    pair: &RealPair,
    priors: &PriorPair,
    exponent: LikelihoodExponent,
) -> Result<f64, Error> {
    if absorbed > sent {
        return Err(Error::InvalidConfig(format!(
            "absorbed count {absorbed} exceeds sent count {sent}"
        )));
    }
    let (l1, l2) = log_likelihoods(absorbed, sent, pair);
    posterior_from_loglik(l1, l2, priors, exponent)
}

/// Outcome of a single sequential trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub decision: Hypothesis,
    pub absorbed: u32,
    pub sent: u32,
    /// True when the photon budget ran out before a threshold was hit;
    /// the decision is then the maximum-posterior one.
    pub undecided: bool,
    /// Posterior probability of object 1 at the stopping point.
    pub posterior_object1: f64,
}

/// Run one trial with `true_object` present, drawing photon fates from
/// `rng`.
///
/// The stopping rule is evaluated before each photon is sent, so priors
/// already outside [x, 1 − x] decide immediately with zero photons.
pub fn run_trial(
    true_object: Hypothesis,
    cfg: &ClassicalConfig,
    rng: &mut impl Rng,
) -> Result<TrialOutcome, Error> {
    cfg.validate()?;
    let (r1, r2) = cfg.pair.absorption_probs();
    let absorb_prob = match true_object {
        Hypothesis::Object1 => r1,
        Hypothesis::Object2 => r2,
    };
    let mut absorbed: u32 = 0;
    let mut sent: u32 = 0;
    // Running log-likelihoods; equivalent to recomputing
    // log_likelihoods(absorbed, sent) but O(1) per photon.
    let mut l1 = 0.0_f64;
    let mut l2 = 0.0_f64;
    let (t1, t2) = cfg.pair.transmission_probs();
    loop {
        let post = posterior_from_loglik(l1, l2, &cfg.priors, cfg.likelihood_exponent)?;
        if post > 1.0 - cfg.x {
            return Ok(TrialOutcome {
                decision: Hypothesis::Object1,
                absorbed,
                sent,
                undecided: false,
                posterior_object1: post,
            });
        }
        if post < cfg.x {
            return Ok(TrialOutcome {
                decision: Hypothesis::Object2,
                absorbed,
                sent,
                undecided: false,
                posterior_object1: post,
            });
        }
        if sent == cfg.max_photons {
            return Ok(TrialOutcome {
                decision: if post >= 0.5 {
                    Hypothesis::Object1
                } else {
                    Hypothesis::Object2
                },
                absorbed,
                sent,
                undecided: true,
                posterior_object1: post,
            });
        }
        sent += 1;
        if rng.random_bool(absorb_prob) {
            absorbed += 1;
            l1 += r1.ln();
            l2 += r2.ln();
        } else {
            l1 += t1.ln();
            l2 += t2.ln();
        }
    }
}

/// Empirical estimates from many trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalEstimate {
    /// Error estimated the posterior-averaging way: mean over trials of
    /// the posterior assigned to the object NOT chosen.
    pub pe_posterior: f64,
    pub pe_posterior_se: f64,
    /// Error estimated as the frequency of wrong decisions.
    pub pe_frequency: f64,
    pub pe_frequency_se: f64,
    /// Mean absorbed photons per trial.
    pub nabs: f64,
    pub nabs_se: f64,
    /// Fraction of trials that hit the photon budget.
    pub undecided_fraction: f64,
    pub trials: u64,
}

struct TrialRecord {
    error_mass: f64,
    wrong: f64,
    absorbed: f64,
    undecided: bool,
}

fn trial_record(cfg: &ClassicalConfig, index: u64) -> Result<TrialRecord, Error> {
    let mut rng = substream(cfg.seed, index);
    let true_object = if rng.random::<f64>() < cfg.priors.p1() {
        Hypothesis::Object1
    } else {
        Hypothesis::Object2
    };
    let outcome = run_trial(true_object, cfg, &mut rng)?;
    let error_mass = match outcome.decision {
        Hypothesis::Object1 => 1.0 - outcome.posterior_object1,
        Hypothesis::Object2 => outcome.posterior_object1,
    };
    Ok(TrialRecord {
        error_mass,
        wrong: if outcome.decision == true_object { 0.0 } else { 1.0 },
        absorbed: f64::from(outcome.absorbed),
        undecided: outcome.undecided,
    })
}

fn summarize(records: Vec<TrialRecord>) -> ClassicalEstimate {
    let trials = records.len() as u64;
    let error_mass: Vec<f64> = records.iter().map(|r| r.error_mass).collect();
    let wrong: Vec<f64> = records.iter().map(|r| r.wrong).collect();
    let absorbed: Vec<f64> = records.iter().map(|r| r.absorbed).collect();
    let undecided = records.iter().filter(|r| r.undecided).count();
    let (pe_posterior, pe_posterior_se) = mean_and_se(&error_mass);
    let (pe_frequency, pe_frequency_se) = mean_and_se(&wrong);
    let (nabs, nabs_se) = mean_and_se(&absorbed);
    ClassicalEstimate {
        pe_posterior,
        pe_posterior_se,
        pe_frequency,
        pe_frequency_se,
        nabs,
        nabs_se,
        undecided_fraction: undecided as f64 / trials as f64,
        trials,
    }
}

/// Estimate (P_E, mean absorbed photons) over `cfg.trials` independent
/// trials, objects drawn from the priors. Deterministic given the seed;
/// trials run in parallel with the `parallel` feature and reduce in
/// trial order either way.
pub fn estimate(cfg: &ClassicalConfig) -> Result<ClassicalEstimate, Error> {
    cfg.validate()?;
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let records: Vec<TrialRecord> = (0..cfg.trials)
            .into_par_iter()
            .map(|i| trial_record(cfg, i))
            .collect::<Result<_, _>>()?;
        Ok(summarize(records))
    }
    #[cfg(not(feature = "parallel"))]
    estimate_sequential(cfg)
}

/// Single-threaded estimation with the same output as [`estimate`].
pub fn estimate_sequential(cfg: &ClassicalConfig) -> Result<ClassicalEstimate, Error> {
    cfg.validate()?;
    let records: Vec<TrialRecord> = (0..cfg.trials)
        .map(|i| trial_record(cfg, i))
        .collect::<Result<_, _>>()?;
    Ok(summarize(records))
}

/// Exact error probability of the one-photon protocol: send a single
/// photon, decide by maximum posterior on (absorbed | transmitted).
/// Combinatorial, no Monte Carlo.
pub fn single_photon_error(pair: &RealPair, priors: &PriorPair) -> Result<f64, Error> {
    let exponent = LikelihoodExponent::Squared;
    let (t1, t2) = pair.transmission_probs();
    let (r1, r2) = pair.absorption_probs();
    let mut pe = 0.0;
    for (outcome_probs, m) in [((r1, r2), 1), ((t1, t2), 0)] {
        let post = posterior(m, 1, pair, priors, exponent)?;
        let decide_one = post >= 0.5;
        // Error mass: probability of this outcome under the object the
        // decision rules out.
        pe += if decide_one {
            priors.p2() * outcome_probs.1
        } else {
            priors.p1() * outcome_probs.0
        };
    }
    Ok(pe)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(a1: f64, a2: f64, x: f64, trials: u64, seed: u64) -> ClassicalConfig {
        ClassicalConfig::new(
            RealPair::new(a1, a2).unwrap(),
            PriorPair::equal(),
            x,
            trials,
            seed,
        )
    }

    #[test]
    fn posterior_with_no_data_is_the_prior() {
        let pair = RealPair::new(0.2, 0.8).unwrap();
        let priors = PriorPair::new(0.3, 0.7).unwrap();
        let p = posterior(0, 0, &pair, &priors, LikelihoodExponent::Squared).unwrap();
        assert_eq!(p, 0.3);
    }

    #[test]
    fn identical_objects_leave_the_prior_unchanged() {
        let pair = RealPair::new(0.4, 0.4).unwrap();
        let priors = PriorPair::new(0.3, 0.7).unwrap();
        for (m, n) in [(0, 5), (3, 7), (10, 10)] {
            let p = posterior(m, n, &pair, &priors, LikelihoodExponent::Squared).unwrap();
            assert!((p - 0.3).abs() < 1e-12);
        }
    }

    #[test]
    fn one_photon_posteriors_for_the_wide_pair() {
        let pair = RealPair::new(0.2, 0.8).unwrap();
        let eq = PriorPair::equal();
        let p_abs = posterior(1, 1, &pair, &eq, LikelihoodExponent::Squared).unwrap();
        let p_trans = posterior(0, 1, &pair, &eq, LikelihoodExponent::Squared).unwrap();
        // 0.96/(0.96+0.36) and 0.04/(0.04+0.64).
        assert!((p_abs - 0.96 / 1.32).abs() < 1e-12);
        assert!((p_trans - 0.04 / 0.68).abs() < 1e-12);
    }

    #[test]
    fn posterior_rejects_more_absorbed_than_sent() {
        let pair = RealPair::new(0.2, 0.8).unwrap();
        assert!(posterior(3, 2, &pair, &PriorPair::equal(), LikelihoodExponent::Squared).is_err());
    }

    #[test]
    fn impossible_observation_is_an_error() {
        // Both objects fully transparent: absorption impossible.
        let pair = RealPair::new(1.0, 1.0).unwrap();
        let err = posterior(1, 1, &pair, &PriorPair::equal(), LikelihoodExponent::Squared);
        assert!(err.is_err());
    }

    #[test]
    fn transparent_object_two_never_absorbs() {
        let c = ClassicalConfig::new(
            RealPair::new(0.2, 1.0).unwrap(),
            PriorPair::equal(),
            0.01,
            1,
            9,
        );
        let mut rng = substream(9, 0);
        let out = run_trial(Hypothesis::Object2, &c, &mut rng).unwrap();
        assert_eq!(out.absorbed, 0);
        assert_eq!(out.decision, Hypothesis::Object2);
        assert!(!out.undecided);
    }

    #[test]
    fn wide_tolerance_decides_on_the_first_photon() {
        let c = cfg(0.2, 0.8, 0.499, 1, 5);
        for seed in 0..50 {
            let mut rng = substream(seed, 0);
            let out = run_trial(Hypothesis::Object1, &c, &mut rng).unwrap();
            assert_eq!(out.sent, 1, "seed {seed}");
        }
    }

    #[test]
    fn single_photon_anchor_is_exact() {
        let pair = RealPair::new(0.2, 0.8).unwrap();
        let pe = single_photon_error(&pair, &PriorPair::equal()).unwrap();
        assert!((pe - 0.2).abs() < 1e-12, "got {pe}");
    }

    #[test]
    fn estimate_with_one_trial_is_that_trial() {
        let c = cfg(0.2, 0.8, 0.2, 1, 11);
        let est = estimate_sequential(&c).unwrap();
        let mut rng = substream(11, 0);
        let object = if rng.random::<f64>() < 0.5 {
            Hypothesis::Object1
        } else {
            Hypothesis::Object2
        };
        let out = run_trial(object, &c, &mut rng).unwrap();
        assert_eq!(est.nabs, f64::from(out.absorbed));
        assert_eq!(est.trials, 1);
        assert_eq!(est.nabs_se, 0.0);
    }

    #[test]
    fn estimates_are_seed_deterministic() {
        let c = cfg(0.2, 0.3, 0.05, 500, 123);
        assert_eq!(estimate(&c).unwrap(), estimate(&c).unwrap());
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_and_sequential_estimates_agree_bitwise() {
        let c = cfg(0.2, 0.8, 0.03, 800, 77);
        assert_eq!(estimate(&c).unwrap(), estimate_sequential(&c).unwrap());
    }

    #[test]
    fn undecided_trials_are_reported() {
        // Budget of one photon with a tight threshold: nothing decides.
        let mut c = cfg(0.2, 0.3, 1e-6, 50, 21);
        c.max_photons = 1;
        let est = estimate(&c).unwrap();
        assert_eq!(est.undecided_fraction, 1.0);
    }

    #[test]
    fn config_validation() {
        assert!(cfg(0.2, 0.3, 0.0, 10, 0).validate().is_err());
        assert!(cfg(0.2, 0.3, 0.5, 10, 0).validate().is_err());
        assert!(cfg(0.2, 0.3, 0.1, 0, 0).validate().is_err());
        let mut c = cfg(0.2, 0.3, 0.1, 10, 0);
        c.max_photons = 0;
        assert!(c.validate().is_err());
    }
}
