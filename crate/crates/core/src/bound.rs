//! Closed-form evaluation of the absorbed-photon lower bound and the
//! Helstrom error/overlap relations.
//!
//! For a pair (α₁, α₂) with priors (p₁, p₂) and target error P_E the bound
//! reads
//!
//! ```text
//! N̄ ≥ 2|β₁β₂| (√(p₁p₂) − √(P_E(1−P_E))) / (|1 − ᾱ₁α₂| − |β₁β₂|)
//! ```
//!
//! The denominator uses the phase freedom of the absorption amplitudes:
//! the β phases are not observable, so the product β̄₁β₂ may be assigned
//! the phase φ* that minimizes |1 − σ| for σ = ᾱ₁α₂ + e^{iφ}|β₁β₂|, and
//! for that phase |1 − σ^m| ≤ m·|1 − σ| for every photon number m ≥ 1.

use num_complex::Complex64;

use crate::types::{ErrorProbability, PriorPair, TransparencyPair};
use crate::Error;

/// Denominators at or below this are treated as exactly zero and the
/// bound is flagged infinite (when the numerator is positive).
pub const DENOMINATOR_FLOOR: f64 = 1e-15;

/// The phase φ* ∈ [−π/2, π/2] solving
/// (1 − Re ᾱ₁α₂)·sin φ = −Im ᾱ₁α₂·cos φ,
/// which minimizes |1 − σ(φ)|. Zero for real amplitudes.
pub fn optimal_phase(pair: &TransparencyPair) -> f64 {
    let w = pair.alpha_overlap();
    // Equivalent to arg(1 − w); Re(1 − w) ≥ 0 keeps the principal value
    // inside [−π/2, π/2].
    (-w.im).atan2(1.0 - w.re)
}

/// σ(φ) = ᾱ₁α₂ + e^{iφ}|β₁β₂|.
pub fn sigma_at(pair: &TransparencyPair, phi: f64) -> Complex64 {
    pair.alpha_overlap() + Complex64::from_polar(pair.beta_product(), phi)
}

/// The bound denominator |1 − ᾱ₁α₂| − |β₁β₂|, clamped at zero.
///
/// Nonnegativity is the m = 1 case of the phase lemma; the clamp only
/// absorbs float rounding for near-degenerate pairs.
pub fn denominator(pair: &TransparencyPair) -> f64 {
    let raw = (Complex64::new(1.0, 0.0) - pair.alpha_overlap()).norm() - pair.beta_product();
    debug_assert!(raw >= -1e-12, "lemma guarantees a nonnegative denominator");
    raw.max(0.0)
}

/// γ = (|1 − ᾱ₁α₂| − |β₁β₂|) / |β₁β₂|, the per-absorbed-photon overlap
/// decrease rate. Errors when |β₁β₂| = 0 (the interaction-free regime,
/// where the bound itself is still well defined via
/// [`absorbed_photon_bound`]).
pub fn gamma(pair: &TransparencyPair) -> Result<f64, Error> {
    let bb = pair.beta_product();
    if bb <= 0.0 {
        return Err(Error::InteractionFree);
    }
    Ok(denominator(pair) / bb)
}

/// The bound together with the pieces it is assembled from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundBreakdown {
    /// Optimal absorption phase φ* ∈ [−π/2, π/2].
    pub phi_star: f64,
    /// σ = ᾱ₁α₂ + e^{iφ*}|β₁β₂|.
    pub sigma: Complex64,
    /// 2|β₁β₂|(√(p₁p₂) − √(P_E(1−P_E))); may be negative before clamping.
    pub numerator: f64,
    /// |1 − ᾱ₁α₂| − |β₁β₂| ≥ 0.
    pub denominator: f64,
    /// The bound value: 0 when the numerator is ≤ 0 (a nonpositive lower
    /// bound is vacuous), `f64::INFINITY` when the denominator vanishes
    /// with a positive numerator (degenerate pairs).
    pub bound: f64,
}

impl BoundBreakdown {
    pub fn is_infinite(&self) -> bool {
        self.bound.is_infinite()
    }
}

/// Lower bound on the mean number of absorbed photons for discriminating
/// `pair` at error probability `pe` under `priors`.
pub fn absorbed_photon_bound(
    pair: &TransparencyPair,
    priors: &PriorPair,
    pe: ErrorProbability,
) -> BoundBreakdown {
    let phi_star = optimal_phase(pair);
    let sigma = sigma_at(pair, phi_star);
    let numerator = 2.0 * pair.beta_product() * (priors.sqrt_product() - pe.geometric_term());
    let denominator = denominator(pair);
    let bound = if numerator <= 0.0 {
        0.0
    } else if denominator <= DENOMINATOR_FLOOR {
        f64::INFINITY
    } else {
        numerator / denominator
    };
    BoundBreakdown {
        phi_star,
        sigma,
        numerator,
        denominator,
        bound,
    }
}

/// Result of checking |1 − σ^m| ≤ m(|1 − ᾱ₁α₂| − |β₁β₂|) at the optimal
/// phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaCheck {
    pub holds: bool,
    /// rhs − lhs; equality (slack 0) at m = 1.
    pub slack: f64,
}

/// Check the phase-lemma inequality for a given photon number m ≥ 1.
pub fn lemma_rhs_holds(pair: &TransparencyPair, m: u32) -> LemmaCheck {
    debug_assert!(m >= 1, "the lemma is stated for m >= 1");
    let sigma = sigma_at(pair, optimal_phase(pair));
    let lhs = (Complex64::new(1.0, 0.0) - sigma.powu(m)).norm();
    let rhs = f64::from(m) * denominator(pair);
    LemmaCheck {
        holds: lhs <= rhs + 1e-10,
        slack: rhs - lhs,
    }
}

/// Minimum-error (Helstrom) probability for discriminating two pure
/// states with overlap `overlap` under `priors`:
/// P_E = ½(1 − √(1 − 4p₁p₂·overlap²)).
pub fn helstrom_error(overlap: f64, priors: &PriorPair) -> ErrorProbability {
    debug_assert!(
        (-1e-9..=1.0 + 1e-9).contains(&overlap),
        "overlap {overlap} outside [0, 1]"
    );
    let f = overlap.clamp(0.0, 1.0);
    let discr = (1.0 - 4.0 * priors.p1() * priors.p2() * f * f).max(0.0);
    let pe = 0.5 * (1.0 - discr.sqrt());
    ErrorProbability::new(pe.clamp(0.0, 0.5)).expect("helstrom error is in [0, 1/2] by construction")
}

/// Inverse of [`helstrom_error`]: the overlap √(P_E(1−P_E)/(p₁p₂)) that a
/// protocol must reach to allow error probability `pe`.
///
/// For unequal priors not every `pe` is feasible; infeasible inputs (the
/// square root would exceed 1) are rejected.
pub fn overlap_for_error(pe: ErrorProbability, priors: &PriorPair) -> Result<f64, Error> {
    if pe.value() == 0.0 {
        return Ok(0.0);
    }
    let p1p2 = priors.p1() * priors.p2();
    let max_pe = 0.5 * (1.0 - (1.0 - 4.0 * p1p2).max(0.0).sqrt());
    if p1p2 == 0.0 {
        return Err(Error::InfeasibleErrorProbability {
            pe: pe.value(),
            max_pe,
        });
    }
    let f = (pe.value() * (1.0 - pe.value()) / p1p2).sqrt();
    if f > 1.0 + 1e-12 {
        return Err(Error::InfeasibleErrorProbability {
            pe: pe.value(),
            max_pe,
        });
    }
    Ok(f.min(1.0))
}
