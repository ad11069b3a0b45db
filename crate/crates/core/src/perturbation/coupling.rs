//! The localized coupling v(q₁, q₂) = S·u(q₁)·w(q₂) with
//! u(q₁) = (1 − cos q₁)·g(q₁ − π)² and w(q₂) = g(q₂)², where g is a Jackson
//! approximation of a bump of radius R.
//!
//! Writing the coupling as a tensor product keeps both factors
//! one-dimensional, so everything downstream (evaluation, norms, the
//! degree count) stays cheap even when g has thousands of terms.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::params::PerturbationParams;
use crate::error::{Error, Result};
use crate::trigpoly::spectrum::Spectrum;
use crate::trigpoly::{bump, jackson, JacksonInfo, Term, TrigPoly};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BuildOptions {
    /// Double M until the quality thresholds hold.
    pub escalate: bool,
    pub max_doublings: u32,
    /// Fail with an approximation-quality error when a threshold is missed.
    pub enforce_thresholds: bool,
    /// Lower limit for T(π, 0).
    pub peak_min: f64,
    /// Upper limit for μ.
    pub mu_max: f64,
    /// Largest number of terms for which the flattened polynomials are built.
    pub term_cap: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            escalate: false,
            max_doublings: 12,
            enforce_thresholds: true,
            peak_min: 1.0,
            mu_max: 0.25,
            term_cap: 250_000,
        }
    }
}

impl BuildOptions {
    pub fn escalating() -> Self {
        Self {
            escalate: true,
            ..Self::default()
        }
    }

    pub fn diagnostic() -> Self {
        Self {
            enforce_thresholds: false,
            ..Self::default()
        }
    }
}

/// Measured quality of the Jackson factor g.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    /// T(π, 0) = g(0)².
    pub peak: f64,
    /// max |T| = (max |g|)².
    pub max_t: f64,
    /// max |T| off the support box = max|g| · max_{|x|>R} |g|.
    pub mu: f64,
    pub grid: usize,
    pub passed: bool,
}

/// One attempt of the escalation loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EscalationStep {
    pub m: usize,
    pub jackson_degree: usize,
    pub peak: f64,
    pub mu: f64,
}

#[derive(Debug, Clone)]
pub struct Coupling {
    pub m: usize,
    pub jackson_degree: usize,
    pub radius: f64,
    pub g: TrigPoly,
    pub u: TrigPoly,
    pub w: TrigPoly,
    /// S = |k|^(−a)·M^(−2s0)/max|T|².
    pub scale: f64,
    pub jackson: JacksonInfo,
    pub jackson_error_bound: f64,
    pub thresholds: ThresholdReport,
    pub history: Vec<EscalationStep>,
}

impl Coupling {
    pub fn eval(&self, q1: f64, q2: f64) -> f64 {
        self.scale * self.u.eval(&[q1]) * self.w.eval(&[q2])
    }

    /// Largest frequency of u (in q₁) and of w (in q₂).
    pub fn max_freqs(&self) -> (i64, i64) {
        (self.u.max_abs_freq(), self.w.max_abs_freq())
    }

    /// Number of terms of the expanded two-variable polynomial (upper bound).
    pub fn expanded_len(&self) -> usize {
        2 * self.u.len() * self.w.len()
    }

    /// The expanded polynomial v(q₁, q₂), or `None` above `cap` terms.
    pub fn to_trigpoly(&self, cap: usize) -> Result<Option<TrigPoly>> {
        if self.expanded_len() > cap {
            return Ok(None);
        }
        let u2 = self.u.compose_linear(&[vec![1, 0]])?;
        let w2 = self.w.compose_linear(&[vec![0, 1]])?;
        Ok(Some(u2.mul(&w2)?.scale(self.scale)))
    }

    /// v at the q-grid (2πi/n₁, 2πj/n₂), row-major.
    pub fn sample_grid(&self, n1: usize, n2: usize) -> Vec<f64> {
        let us = Spectrum::from_poly(&self.u).sample(n1, 0);
        let ws = Spectrum::from_poly(&self.w).sample(n2, 0);
        let mut out = Vec::with_capacity(n1 * n2);
        for &a in &us {
            out.extend(ws.iter().map(|&b| self.scale * a * b));
        }
        out
    }
}

/// Largest Jackson degree M_g with (2M_g+1)²|k|² + (2M_g)²|k'|² ≤ (2M+1)²|k|²,
/// so that the assembled perturbation stays within the degree budget.
pub fn jackson_degree_for(m: usize, k_norm_sq: i64, k_prime_norm_sq: i64) -> usize {
    let budget = (2 * m as i128 + 1).pow(2) * k_norm_sq as i128;
    let fits = |g: i128| (2 * g + 1).pow(2) * k_norm_sq as i128 + (2 * g).pow(2) * k_prime_norm_sq as i128 <= budget;
    let (mut lo, mut hi) = (0i128, m as i128);
    while lo < hi {
        let mid = (lo + hi + 1) / 2;
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo as usize
}

fn measure(g: &TrigPoly, radius: f64, opts: &BuildOptions) -> ThresholdReport {
    let deg = g.max_abs_freq() as usize;
    let grid = (8 * deg).max(4096).max((16.0 * PI / radius) as usize).next_power_of_two();
    let vals = Spectrum::from_poly(g).sample(grid, 0);
    let h = 2.0 * PI / grid as f64;
    let mut gmax = 0.0f64;
    let mut off = 0.0f64;
    for (j, v) in vals.iter().enumerate() {
        let x = j as f64 * h;
        let dist = x.min(2.0 * PI - x);
        gmax = gmax.max(v.abs());
        if dist > radius {
            off = off.max(v.abs());
        }
    }
    let g0: f64 = g.terms().iter().map(|t| t.cos).sum();
    let peak = g0 * g0;
    let mu = gmax * off;
    ThresholdReport {
        peak,
        max_t: gmax * gmax,
        mu,
        grid,
        passed: peak >= opts.peak_min && mu < opts.mu_max,
    }
}

fn one_minus_cos() -> TrigPoly {
    TrigPoly::new(
        1,
        vec![
            Term { freq: vec![0], cos: 1.0, sin: 0.0 },
            Term { freq: vec![1], cos: -1.0, sin: 0.0 },
        ],
    )
    .expect("1-D")
}

/// Builds the coupling for `params`, escalating M if requested.
///
/// `k_prime_norm_sq` is |k'|² of the frame partner; it enters the split of
/// the degree budget between the two factors.
pub fn build_coupling(params: &PerturbationParams, k_prime_norm_sq: i64, opts: &BuildOptions) -> Result<Coupling> {
    let phi = bump(params.radius)?;
    let mut m = params.m;
    let mut history = Vec::new();
    let mut doublings = 0;
    loop {
        let mg = jackson_degree_for(m, params.k_norm_sq, k_prime_norm_sq).max(1);
        let approx = jackson(&phi, mg, params.kappa)?;
        let report = measure(&approx.poly, params.radius, opts);
        history.push(EscalationStep {
            m,
            jackson_degree: mg,
            peak: report.peak,
            mu: report.mu,
        });
        let retry = !report.passed && opts.escalate && doublings < opts.max_doublings;
        if retry {
            m *= 2;
            doublings += 1;
            continue;
        }
        if !report.passed && opts.enforce_thresholds {
            return Err(Error::ApproximationQuality(format!(
                "T(pi,0) = {:.4e} (need >= {}), mu = {:.4e} (need < {}) at M = {m}, Jackson degree {mg}",
                report.peak, opts.peak_min, report.mu, opts.mu_max
            )));
        }
        let g = approx.poly;
        let gpi = g.shifted_by_pi();
        let u = gpi.mul(&gpi)?.mul(&one_minus_cos())?;
        let w = g.mul(&g)?;
        let scale = params.pendulum_strength() * (m as f64).powf(-2.0 * params.s0) / (report.max_t * report.max_t);
        return Ok(Coupling {
            m,
            jackson_degree: mg,
            radius: params.radius,
            g,
            u,
            w,
            scale,
            jackson: approx.info,
            jackson_error_bound: approx.error_bound,
            thresholds: report,
            history,
        });
    }
}

/// The expanded coupling v(q₁, q₂) for `params` as a two-variable polynomial.
pub fn build_v(params: &PerturbationParams, k_prime_norm_sq: i64, opts: &BuildOptions) -> Result<TrigPoly> {
    let c = build_coupling(params, k_prime_norm_sq, opts)?;
    c.to_trigpoly(opts.term_cap)?.ok_or_else(|| {
        Error::ApproximationQuality(format!(
            "expanded coupling would have {} terms (cap {})",
            c.expanded_len(),
            opts.term_cap
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perturbation::params::{plan_parameters, PlanOptions};

    fn golden() -> PerturbationParams {
        plan_parameters(2, 0.0, 0.1, 1e-3, 0.0901699437494742, 34, &PlanOptions::default()).unwrap()
    }

    #[test]
    fn budget_split() {
        assert_eq!(jackson_degree_for(61, 34, 34), 43);
        let mg = jackson_degree_for(61, 34, 34) as i128;
        assert!((2 * mg + 3).pow(2) + (2 * mg + 2).pow(2) > 123i128.pow(2));
    }

    #[test]
    fn desk_build_fails_thresholds_but_diagnostic_succeeds() {
        let p = golden();
        assert!(matches!(
            build_coupling(&p, 34, &BuildOptions::default()),
            Err(Error::ApproximationQuality(_))
        ));
        let c = build_coupling(&p, 34, &BuildOptions::diagnostic()).unwrap();
        assert_eq!(c.m, 61);
        assert_eq!(c.jackson_degree, 43);
        assert!(!c.thresholds.passed);
    }

    #[test]
    fn escalation_reaches_thresholds() {
        let c = build_coupling(&golden(), 34, &BuildOptions::escalating()).unwrap();
        assert!(c.thresholds.passed);
        assert!(c.thresholds.peak >= 1.0 && c.thresholds.mu < 0.25);
        assert!(c.m > 61 && c.m % 61 == 0);
        assert_eq!(c.history.last().unwrap().m, c.m);
    }

    #[test]
    fn coupling_vanishes_on_q1_zero_and_is_nonnegative() {
        let c = build_coupling(&golden(), 34, &BuildOptions::diagnostic()).unwrap();
        for q2 in [-3.0, -0.5, 0.0, 1.0, 2.9] {
            assert!(c.eval(0.0, q2).abs() < 1e-30);
        }
        let n = 512;
        let vals = c.sample_grid(n, n);
        assert!(vals.iter().all(|&v| v >= -1e-12));
    }
}
