//! Arithmetic of frequency vectors: continued fractions, small denominators,
//! resonance search and finite-scale approximability profiles.

mod cf;
mod classify;
mod frequency;
pub mod real;
mod resonance;

pub use cf::{cf_expand, cf_expand_exact, convergent};
pub use classify::{classify, DiophantineProfile};
pub use frequency::{small_denominator, FrequencySummary, FrequencyVector, DEFAULT_PRECISION};
pub use real::ExactReal;
pub use resonance::{find_resonances, find_resonances_with, ResonanceHit, TauEff};
