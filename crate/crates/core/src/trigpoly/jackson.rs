//! Jackson-type approximation by trigonometric polynomials.
//!
//! The operator is the Boolean sum `J = I − (I − K)^r` of a normalized
//! generalized Jackson kernel
//!
//! ```text
//! K(t) ∝ (sin(Mt/2) / sin(t/2))^(2p),
//! ```
//!
//! truncated to frequencies |n| ≤ M. It acts diagonally on Fourier
//! coefficients with multiplier `λ_n = 1 − (1 − K̂_n)^r`. A single positive
//! kernel saturates at rate M^(−2); the Boolean sum of order r = ⌈κ/2⌉ lifts
//! the saturation to M^(−κ), and the kernel power p = 2κ keeps the truncation
//! tail small enough that the rate survives.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::norm::{holder_norm, DEFAULT_GRID};
use super::periodic::PeriodicFn;
use super::poly::{Term, TrigPoly};
use super::spectrum::dft_coefficients;
use crate::error::{domain, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacksonInfo {
    pub degree: usize,
    pub kappa: u32,
    pub kernel_power: u32,
    pub boolean_order: u32,
    pub samples: usize,
    /// ‖f‖_{C^κ} on the default grid.
    pub norm_ck: f64,
    /// C'_κ with error_bound = C'_κ·M^(−κ)·‖f‖_{C^κ}.
    pub certified_constant: f64,
}

#[derive(Debug, Clone)]
pub struct JacksonApprox {
    pub poly: TrigPoly,
    pub error_bound: f64,
    pub info: JacksonInfo,
}

pub fn kernel_power(kappa: u32) -> u32 {
    2 * kappa
}

pub fn boolean_order(kappa: u32) -> u32 {
    kappa.div_ceil(2)
}

/// Fourier multipliers λ_0..=λ_M of the operator.
pub fn multipliers(m: usize, kappa: u32) -> Vec<f64> {
    let p = kernel_power(kappa);
    let r = boolean_order(kappa) as i32;
    kernel_coefficients(m, p)
        .into_iter()
        .map(|k| 1.0 - (1.0 - k).powi(r))
        .collect()
}

/// Normalized coefficients K̂_0..=K̂_M of (sin(Mt/2)/sin(t/2))^(2p).
///
/// The kernel has degree p(M−1), so sampling at more than 2p(M−1) points
/// gives its coefficients without aliasing. Values are formed in logarithms
/// because M^(2p) overflows for the orders of interest.
pub fn kernel_coefficients(m: usize, p: u32) -> Vec<f64> {
    if m <= 1 {
        let mut out = vec![0.0; m + 1];
        out[0] = 1.0;
        return out;
    }
    let len = (2 * p as usize * m + 2).next_power_of_two();
    let mf = m as f64;
    let log_peak = 2.0 * mf.ln();
    let mut buf: Vec<Complex64> = (0..len)
        .map(|j| {
            let t = 2.0 * std::f64::consts::PI * j as f64 / len as f64;
            let v = if j == 0 {
                1.0
            } else {
                let ratio = (mf * t / 2.0).sin() / (t / 2.0).sin();
                let f = ratio * ratio;
                if f == 0.0 {
                    0.0
                } else {
                    (p as f64 * (f.ln() - log_peak)).exp()
                }
            };
            Complex64::new(v, 0.0)
        })
        .collect();
    FftPlanner::<f64>::new().plan_fft_forward(len).process(&mut buf);
    let c0 = buf[0].re;
    (0..=m).map(|n| buf[n].re / c0).collect()
}

/// Certified constant C'_κ(M) = M^κ·(Σ_{n≠0} |1 − λ_n|² n^(−2κ))^(1/2).
///
/// Since f̂_n = (f^(κ))^_n / (in)^κ, Cauchy–Schwarz and Parseval give
/// ‖f − Jf‖_∞ ≤ Σ |1 − λ_n||f̂_n| ≤ (Σ |1−λ_n|² n^(−2κ))^(1/2)·‖f^(κ)‖_∞.
pub fn certified_constant(lambda: &[f64], kappa: u32) -> f64 {
    let m = lambda.len() - 1;
    let q = 2 * kappa as i32;
    let mut s: f64 = (1..=m)
        .map(|n| {
            let e = 1.0 - lambda[n];
            e * e / (n as f64).powi(q)
        })
        .sum();
    // Σ_{n>M} n^(−q) ≤ (M+1)^(−q) + (M+1)^(1−q)/(q−1)
    let m1 = (m + 1) as f64;
    s += m1.powi(-q) + m1.powi(1 - q) / (q - 1) as f64;
    (2.0 * s).sqrt() * (m as f64).powi(kappa as i32)
}

/// Degree-≤M approximation of `f` with a certified sup-norm error bound.
pub fn jackson(f: &PeriodicFn, m: usize, kappa: u32) -> Result<JacksonApprox> {
    if kappa < 2 {
        return domain("Jackson order kappa must be at least 2");
    }
    if m == 0 {
        return domain("Jackson degree must be positive");
    }
    if !f.smoothness().at_least(kappa) {
        return domain(format!("function is not C^{kappa}"));
    }
    let p = kernel_power(kappa);
    let samples = (8 * m * p as usize).max(4096).next_power_of_two();
    let values = f.sample_uniform(samples);
    let fhat = dft_coefficients(&values);
    let lambda = multipliers(m, kappa);
    let noise = 4.0 * f64::EPSILON * values.iter().map(|v| v.abs()).fold(0.0, f64::max);

    let mut terms = Vec::with_capacity(m + 1);
    for (n, &l) in lambda.iter().enumerate() {
        let c = fhat[n] * l;
        let (cos, sin) = if n == 0 { (c.re, 0.0) } else { (2.0 * c.re, -2.0 * c.im) };
        if cos.hypot(sin) > noise {
            terms.push(Term {
                freq: vec![n as i64],
                cos,
                sin,
            });
        }
    }
    let poly = TrigPoly::new(1, terms)?;
    let norm_ck = holder_norm(f, kappa as f64, DEFAULT_GRID)?.value;
    let constant = certified_constant(&lambda, kappa);
    let error_bound = constant * (m as f64).powi(-(kappa as i32)) * norm_ck;
    Ok(JacksonApprox {
        poly,
        error_bound,
        info: JacksonInfo {
            degree: m,
            kappa,
            kernel_power: p,
            boolean_order: boolean_order(kappa),
            samples,
            norm_ck,
            certified_constant: constant,
        },
    })
}

/// Sup-norm distance between `f` and `p` on `n` uniform points.
pub fn sup_error(f: &PeriodicFn, p: &TrigPoly, n: usize) -> f64 {
    let h = 2.0 * std::f64::consts::PI / n as f64;
    crate::exec::max_range(crate::exec::ExecMode::best(), n, |j| {
        let x = -std::f64::consts::PI + h * j as f64;
        (f.eval(x) - p.eval(&[x])).abs()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trigpoly::bump;

    #[test]
    fn constants_are_reproduced() {
        let f = PeriodicFn::constant(2.5);
        let j = jackson(&f, 12, 3).unwrap();
        assert_eq!(j.poly.len(), 1);
        assert!((j.poly.terms()[0].cos - 2.5).abs() < 1e-15);
        assert!(sup_error(&f, &j.poly, 1000) < 1e-14);
    }

    #[test]
    fn kernel_is_normalized_and_decreasing() {
        let k = kernel_coefficients(16, 4);
        assert_eq!(k[0], 1.0);
        assert!(k.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        assert!(k.iter().all(|&x| (0.0..=1.0 + 1e-15).contains(&x)));
    }

    #[test]
    fn cosine_error_is_within_bound() {
        let f = PeriodicFn::cos();
        let j = jackson(&f, 8, 2).unwrap();
        let err = sup_error(&f, &j.poly, 10_000);
        assert!(err <= j.error_bound, "{err} > {}", j.error_bound);
    }

    #[test]
    fn degree_never_exceeds_m() {
        let j = jackson(&bump(0.7).unwrap(), 20, 4).unwrap();
        assert!(j.poly.max_abs_freq() <= 20);
    }
}
