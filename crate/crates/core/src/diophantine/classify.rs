use serde::{Deserialize, Serialize};

use super::frequency::FrequencyVector;
use super::resonance::{find_resonances, ResonanceHit};

/// Finite-scale arithmetic profile of a frequency vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiophantineProfile {
    /// Estimated Diophantine exponent.
    pub beta_est: f64,
    /// Largest raw ratio −ln|⟨ω,k⟩| / ln|k| over nonresonant hits.
    pub max_ratio: f64,
    pub hits: Vec<ResonanceHit>,
    pub scan_bound: u32,
    pub liouville_flag: bool,
    /// First exact resonance found, if any.
    pub resonant: Option<Vec<i64>>,
    /// (bound, beta_est) for each dyadic sub-scan, smallest bound first.
    pub subscans: Vec<(u32, f64)>,
}

impl DiophantineProfile {
    pub fn is_resonant(&self) -> bool {
        self.resonant.is_some()
    }
}

/// Estimates the Diophantine exponent from the record approximations found
/// by a Dirichlet scan (C = 1) up to `k_max`.
///
/// The raw ratio −ln|v|/ln|k| converges very slowly because of the constant
/// in |v| ≈ c|k|^(−β). Instead we look at successive record hits (primitive
/// vectors that strictly improve the best small denominator seen so far) and
/// take the local exponent ln(v_prev/v_next)/ln(|k_next|/|k_prev|) between
/// consecutive records, where the constant cancels.
pub fn classify(omega: &FrequencyVector, k_max: u32) -> DiophantineProfile {
    let d = omega.dim();
    let hits = find_resonances(omega, k_max.max(2), 1.0);
    let resonant = hits.iter().find(|h| h.is_exact()).map(|h| h.k.clone());
    let max_ratio = hits
        .iter()
        .filter(|h| !h.is_exact() && h.norm > 1.0)
        .map(|h| -h.value.abs().ln() / h.norm.ln())
        .fold(f64::NEG_INFINITY, f64::max);

    let mut subscans = Vec::new();
    let mut bound = k_max.max(2);
    while bound >= 2 {
        subscans.push((bound, estimate_exponent(&hits, bound, d)));
        bound /= 2;
    }
    subscans.reverse();
    let beta_est = subscans.last().map(|s| s.1).unwrap_or((d - 1) as f64);
    let liouville_flag = resonant.is_none()
        && subscans.len() >= 3
        && subscans.windows(2).all(|w| w[1].1 >= w[0].1)
        && subscans.last().unwrap().1 - subscans.first().unwrap().1 > 0.25;

    DiophantineProfile {
        beta_est,
        max_ratio,
        hits,
        scan_bound: k_max,
        liouville_flag,
        resonant,
        subscans,
    }
}

fn estimate_exponent(hits: &[ResonanceHit], bound: u32, d: usize) -> f64 {
    let base = (d - 1) as f64;
    let mut best = f64::INFINITY;
    let mut records: Vec<(f64, f64)> = Vec::new();
    for h in hits {
        if h.k.iter().any(|x| x.unsigned_abs() > bound as u64) || h.is_exact() || !h.is_primitive() {
            continue;
        }
        let v = h.value.abs();
        if v < best {
            best = v;
            records.push((h.norm, v));
        }
    }
    records
        .windows(2)
        .filter(|w| w[0].0 >= 2.0 && w[1].0 > w[0].0)
        .map(|w| (w[0].1 / w[1].1).ln() / (w[1].0 / w[0].0).ln())
        .fold(base, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_is_badly_approximable() {
        let p = classify(&FrequencyVector::golden(), 50);
        assert!(p.beta_est >= 1.0 && p.beta_est <= 1.1, "{}", p.beta_est);
        assert!(!p.liouville_flag);
        assert!(!p.is_resonant());
    }

    #[test]
    fn rational_vector_is_resonant() {
        let p = classify(&FrequencyVector::from_f64s(&[1.0, 0.5]).unwrap(), 5);
        assert_eq!(p.resonant, Some(vec![1, -2]));
        assert!(!p.liouville_flag);
    }
}
