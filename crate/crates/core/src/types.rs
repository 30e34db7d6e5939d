//! Shared domain types: transparency pairs, priors and error probabilities.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::Error;

/// Magnitudes up to this far above 1 are treated as parser round-off and
/// clamped back onto the unit circle; anything larger is rejected.
pub const MAGNITUDE_SLACK: f64 = 1e-12;

/// The two complex transmission amplitudes under discrimination, with the
/// derived absorption magnitudes |β_i| = √(1 − |α_i|²).
///
/// Immutable value type; construction validates |α_i| ≤ 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransparencyPair {
    alpha1: Complex64,
    alpha2: Complex64,
    beta1_mag: f64,
    beta2_mag: f64,
}

impl TransparencyPair {
    pub fn new(alpha1: Complex64, alpha2: Complex64) -> Result<Self, Error> {
        let alpha1 = Self::admit(alpha1, "alpha1")?;
        let alpha2 = Self::admit(alpha2, "alpha2")?;
        Ok(Self {
            alpha1,
            alpha2,
            beta1_mag: beta_magnitude(alpha1),
            beta2_mag: beta_magnitude(alpha2),
        })
    }

    /// Convenience constructor for real amplitudes.
    pub fn real(alpha1: f64, alpha2: f64) -> Result<Self, Error> {
        Self::new(Complex64::new(alpha1, 0.0), Complex64::new(alpha2, 0.0))
    }

    fn admit(alpha: Complex64, which: &'static str) -> Result<Complex64, Error> {
        let mag = alpha.norm();
        if !mag.is_finite() {
            return Err(Error::AmplitudeOutOfRange {
                which,
                magnitude: mag,
            });
        }
        if mag <= 1.0 {
            Ok(alpha)
        } else if mag <= 1.0 + MAGNITUDE_SLACK {
            Ok(alpha / mag)
        } else {
            Err(Error::AmplitudeOutOfRange {
                which,
                magnitude: mag,
            })
        }
    }

    pub fn alpha1(&self) -> Complex64 {
        self.alpha1
    }

    pub fn alpha2(&self) -> Complex64 {
        self.alpha2
    }

    pub fn beta1_mag(&self) -> f64 {
        self.beta1_mag
    }

    pub fn beta2_mag(&self) -> f64 {
        self.beta2_mag
    }

    /// |β₁β₂|, the absorption-amplitude product entering the bound.
    pub fn beta_product(&self) -> f64 {
        self.beta1_mag * self.beta2_mag
    }

    /// ᾱ₁α₂, the transmission overlap entering every closed form.
    pub fn alpha_overlap(&self) -> Complex64 {
        self.alpha1.conj() * self.alpha2
    }

    /// A pair is degenerate when both amplitudes coincide exactly; the
    /// bound denominator vanishes and the bound is flagged infinite.
    pub fn is_degenerate(&self) -> bool {
        self.alpha1 == self.alpha2
    }

    /// Swap the two objects (α₁ ↔ α₂).
    pub fn swapped(&self) -> Self {
        Self {
            alpha1: self.alpha2,
            alpha2: self.alpha1,
            beta1_mag: self.beta2_mag,
            beta2_mag: self.beta1_mag,
        }
    }

    /// Conjugate both amplitudes.
    pub fn conjugated(&self) -> Self {
        Self {
            alpha1: self.alpha1.conj(),
            alpha2: self.alpha2.conj(),
            ..*self
        }
    }
}

fn beta_magnitude(alpha: Complex64) -> f64 {
    (1.0 - alpha.norm_sqr()).max(0.0).sqrt()
}

/// A transparency pair with both amplitudes exactly real, as required by
/// the Zeno protocol and the photon-counting baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealPair {
    pair: TransparencyPair,
    alpha1: f64,
    alpha2: f64,
    beta1: f64,
    beta2: f64,
}

impl RealPair {
    pub fn new(alpha1: f64, alpha2: f64) -> Result<Self, Error> {
        TransparencyPair::real(alpha1, alpha2)?.try_into()
    }

    pub fn alpha1(&self) -> f64 {
        self.alpha1
    }

    pub fn alpha2(&self) -> f64 {
        self.alpha2
    }

    pub fn beta1(&self) -> f64 {
        self.beta1
    }

    pub fn beta2(&self) -> f64 {
        self.beta2
    }

    pub fn beta_product(&self) -> f64 {
        self.beta1 * self.beta2
    }

    pub fn pair(&self) -> &TransparencyPair {
        &self.pair
    }

    /// Per-photon transmission probabilities (|α₁|², |α₂|²).
    pub fn transmission_probs(&self) -> (f64, f64) {
        (self.alpha1 * self.alpha1, self.alpha2 * self.alpha2)
    }

    /// Per-photon absorption probabilities (|β₁|², |β₂|²).
    pub fn absorption_probs(&self) -> (f64, f64) {
        (self.beta1 * self.beta1, self.beta2 * self.beta2)
    }
}

impl TryFrom<TransparencyPair> for RealPair {
    type Error = Error;

    fn try_from(pair: TransparencyPair) -> Result<Self, Error> {
        if pair.alpha1().im != 0.0 {
            return Err(Error::ComplexAmplitude { which: "alpha1" });
        }
        if pair.alpha2().im != 0.0 {
            return Err(Error::ComplexAmplitude { which: "alpha2" });
        }
        Ok(Self {
            pair,
            alpha1: pair.alpha1().re,
            alpha2: pair.alpha2().re,
            beta1: pair.beta1_mag(),
            beta2: pair.beta2_mag(),
        })
    }
}

/// Prior probabilities (p₁, p₂) of the two objects.
///
/// Construction accepts pairs summing to 1 within 1e−12 and renormalizes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorPair {
    p1: f64,
    p2: f64,
}

impl PriorPair {
    pub const SUM_TOLERANCE: f64 = 1e-12;

    pub fn new(p1: f64, p2: f64) -> Result<Self, Error> {
        let sum = p1 + p2;
        if !(p1 >= 0.0 && p2 >= 0.0 && (sum - 1.0).abs() <= Self::SUM_TOLERANCE) {
            return Err(Error::InvalidPriors { p1, p2 });
        }
        Ok(Self {
            p1: p1 / sum,
            p2: p2 / sum,
        })
    }

    /// Equal priors p₁ = p₂ = 1/2.
    pub fn equal() -> Self {
        Self { p1: 0.5, p2: 0.5 }
    }

    /// Priors (p₁, 1 − p₁).
    pub fn from_p1(p1: f64) -> Result<Self, Error> {
        if !(0.0..=1.0).contains(&p1) {
            return Err(Error::InvalidPriors { p1, p2: 1.0 - p1 });
        }
        Ok(Self {
            p1,
            p2: 1.0 - p1,
        })
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn p2(&self) -> f64 {
        self.p2
    }

    /// √(p₁p₂).
    pub fn sqrt_product(&self) -> f64 {
        (self.p1 * self.p2).sqrt()
    }

    pub fn swapped(&self) -> Self {
        Self {
            p1: self.p2,
            p2: self.p1,
        }
    }
}

/// A discrimination error probability, constrained to [0, 1/2].
///
/// Values above 1/2 are never meaningful for two-hypothesis testing:
/// flipping the decision does better.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ErrorProbability(f64);

impl ErrorProbability {
    pub fn new(value: f64) -> Result<Self, Error> {
        if (0.0..=0.5).contains(&value) {
            Ok(Self(value))
        } else {
            Err(Error::InvalidErrorProbability(value))
        }
    }

    pub const ZERO: Self = Self(0.0);
    pub const HALF: Self = Self(0.5);

    pub fn value(&self) -> f64 {
        self.0
    }

    /// √(P_E(1 − P_E)), the term paired against √(p₁p₂) in the bound.
    pub fn geometric_term(&self) -> f64 {
        (self.0 * (1.0 - self.0)).sqrt()
    }
}
