use serde::{Deserialize, Serialize};

use super::frequency::FrequencyVector;
use crate::exec::{self, ExecMode};

/// Effective excess exponent of a hit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TauEff {
    Finite(f64),
    /// Exact resonance, ⟨ω,k⟩ = 0.
    Infinite,
    /// |⟨ω,k⟩| ≥ 1, or |k| = 1 where no exponent is defined.
    NonHit,
}

/// A near-resonance ⟨ω,k⟩ ≈ 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceHit {
    pub k: Vec<i64>,
    pub value: f64,
    pub norm: f64,
    pub norm_sq: u64,
    pub tau_eff: TauEff,
}

impl ResonanceHit {
    pub fn new(k: Vec<i64>, value: f64) -> Self {
        let d = k.len() as f64;
        let norm_sq: u64 = k.iter().map(|&x| (x * x) as u64).sum();
        let norm = (norm_sq as f64).sqrt();
        let tau_eff = if value == 0.0 {
            TauEff::Infinite
        } else if value.abs() >= 1.0 || norm_sq == 1 {
            TauEff::NonHit
        } else {
            TauEff::Finite(-value.abs().ln() / norm.ln() - (d - 1.0))
        };
        Self {
            k,
            value,
            norm,
            norm_sq,
            tau_eff,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.value == 0.0
    }

    pub fn is_primitive(&self) -> bool {
        self.k
            .iter()
            .fold(0i64, |g, &x| num_integer::gcd(g, x))
            == 1
    }
}

/// Sign representative of ±k: the sign making ⟨ω,k⟩ positive, or, for an exact
/// resonance, the sign making the first nonzero entry positive.
fn normalize_sign(k: &mut [i64], value: &mut f64) {
    let flip = if *value != 0.0 {
        *value < 0.0
    } else {
        k.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0)
    };
    if flip {
        k.iter_mut().for_each(|x| *x = -*x);
        *value = -*value;
    }
}

/// Every k with 0 < |k|_∞ ≤ k_max (one per ±k pair) with |⟨ω,k⟩| < C/|k|^(d−1),
/// sorted by |k| then lexicographically.
pub fn find_resonances(omega: &FrequencyVector, k_max: u32, c: f64) -> Vec<ResonanceHit> {
    find_resonances_with(omega, k_max, c, ExecMode::best())
}

pub fn find_resonances_with(
    omega: &FrequencyVector,
    k_max: u32,
    c: f64,
    mode: ExecMode,
) -> Vec<ResonanceHit> {
    let d = omega.dim();
    let kmax = k_max as i64;
    let w = omega.approx();
    let wmax = w.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    // Screening margin: double rounding in the f64 dot product plus the
    // rounding of ω itself, both bounded by a few ulps of Σ|k_i||ω_i|.
    let eps = f64::EPSILON * 4.0 * (d as f64 + 1.0);
    let side = 2 * kmax + 1;

    // Split on the first coordinate; only k_1 ≥ 0 is needed for ±k pairs,
    // with the k_1 = 0 slice restricted recursively by the same rule.
    let mut hits: Vec<ResonanceHit> = exec::map_range(mode, (kmax + 1) as usize, |i| {
        let k1 = i as i64;
        let mut out = Vec::new();
        let mut k = vec![0i64; d];
        k[0] = k1;
        let tail = d - 1;
        let total = (side as u64).pow(tail as u32);
        for idx in 0..total {
            let mut rem = idx;
            for slot in k.iter_mut().skip(1) {
                *slot = (rem % side as u64) as i64 - kmax;
                rem /= side as u64;
            }
            if !is_half_representative(&k) {
                continue;
            }
            let norm_sq: i64 = k.iter().map(|x| x * x).sum();
            let norm = (norm_sq as f64).sqrt();
            let threshold = c / norm.powi(d as i32 - 1);
            let approx: f64 = k.iter().zip(w).map(|(&a, &b)| a as f64 * b).sum();
            let scale: f64 = k.iter().map(|&a| a.abs() as f64).sum::<f64>() * wmax;
            if approx.abs() - eps * scale >= threshold {
                continue;
            }
            let mut value = omega.dot(&k).expect("dimension fixed");
            if value.abs() < threshold {
                let mut kk = k.clone();
                normalize_sign(&mut kk, &mut value);
                out.push(ResonanceHit::new(kk, value));
            }
        }
        out
    })
    .into_iter()
    .flatten()
    .collect();
    hits.sort_by(|a, b| a.norm_sq.cmp(&b.norm_sq).then_with(|| a.k.cmp(&b.k)));
    hits
}

/// True for exactly one of k and −k (the one whose first nonzero entry is positive).
fn is_half_representative(k: &[i64]) -> bool {
    k.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_contains_fibonacci_vector() {
        let w = FrequencyVector::golden();
        let hits = find_resonances(&w, 10, 1.0);
        let h = hits.iter().find(|h| h.k == vec![-3, 5]).expect("(-3,5) present");
        assert!((h.value - 0.0901699437494742).abs() < 1e-15);
        assert!(h.value < 1.0 / 34f64.sqrt());
    }

    #[test]
    fn rational_resonance_is_exact_zero() {
        let w = FrequencyVector::parse("1,0.3333333333333333").unwrap();
        assert!(!find_resonances(&w, 5, 1.0).iter().any(|h| h.is_exact()));
        let third = FrequencyVector::new(
            vec![super::super::ExactReal::Int(1), super::super::ExactReal::rational(1, 3)],
            128,
        )
        .unwrap();
        let hits = find_resonances(&third, 5, 1.0);
        let h = hits.iter().find(|h| h.k == vec![1, -3]).unwrap();
        assert_eq!(h.value, 0.0);
        assert_eq!(h.tau_eff, TauEff::Infinite);
    }

    #[test]
    fn output_is_sorted_and_unique_up_to_sign() {
        let w = FrequencyVector::spread(3).unwrap();
        let hits = find_resonances(&w, 6, 1.0);
        for pair in hits.windows(2) {
            assert!((pair[0].norm_sq, &pair[0].k) < (pair[1].norm_sq, &pair[1].k));
        }
        for h in &hits {
            let neg: Vec<i64> = h.k.iter().map(|x| -x).collect();
            assert!(!hits.iter().any(|o| o.k == neg));
        }
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let w = FrequencyVector::golden();
        let a = find_resonances_with(&w, 60, 1.5, ExecMode::Sequential);
        let b = find_resonances_with(&w, 60, 1.5, ExecMode::Parallel);
        assert_eq!(a, b);
    }
}
