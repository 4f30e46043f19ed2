//! Two-photon interference at the beamsplitter: coincidence rates and dip
//! visibility.
//!
//! For two horizontally polarized photons the coincidence probability is 1/9
//! when they interfere perfectly (the exchange term cancels most of the
//! double-reflection path) and 5/9 when fully distinguishable (1/9 + 4/9
//! classically). A pair interferes with weight q, so the zero-delay rate is
//! the mixture of the two.

use crate::error::{Error, Result};
use crate::photonics::elements::DistinguishabilityModel;

/// Where on the delay scan the coincidence rate is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DelayRegime {
    /// Wavepackets overlapped; interference active with weight q.
    Zero,
    /// Wavepackets separated; photons fully distinguishable.
    Infinite,
}

/// Coincidence probability of an `|HH⟩` input at the beamsplitter.
pub fn hom_coincidence(regime: DelayRegime, model: &DistinguishabilityModel) -> f64 {
    const INTERFERING: f64 = 1.0 / 9.0;
    const DISTINGUISHABLE: f64 = 5.0 / 9.0;
    match regime {
        DelayRegime::Zero => model.q() * INTERFERING + (1.0 - model.q()) * DISTINGUISHABLE,
        DelayRegime::Infinite => DISTINGUISHABLE,
    }
}

/// Dip visibility `V = (c∞ − c₀)/c∞`.
pub fn visibility(c_zero: f64, c_infinity: f64) -> Result<f64> {
    if c_infinity <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "coincidence rate at large delay must be positive, got {c_infinity}"
        )));
    }
    Ok((c_infinity - c_zero) / c_infinity)
}

/// Visibility of the dip predicted by the overlap model; affine in q with
/// slope 0.8.
pub fn model_visibility(model: &DistinguishabilityModel) -> f64 {
    let c0 = hom_coincidence(DelayRegime::Zero, model);
    let cinf = hom_coincidence(DelayRegime::Infinite, model);
    visibility(c0, cinf).expect("rate 5/9 is positive")
}
