use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::numeric::simpson;

/// Solution of q̈ = g·sin q with fixed endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BvpSolution {
    pub times: Vec<f64>,
    pub q: Vec<f64>,
    pub qdot: Vec<f64>,
    /// ∫ ½q̇² + g(1 − cos q) dt.
    pub action: f64,
    pub initial_velocity: f64,
    /// max − min of ½q̇² − g(1 − cos q) along the solution.
    pub energy_spread: f64,
}

fn rk4_end(g: f64, q0: f64, v0: f64, dt: f64, steps: usize) -> f64 {
    let (mut q, mut v) = (q0, v0);
    for _ in 0..steps {
        let a1 = g * q.sin();
        let (q2, v2) = (q + 0.5 * dt * v, v + 0.5 * dt * a1);
        let a2 = g * q2.sin();
        let (q3, v3) = (q + 0.5 * dt * v2, v + 0.5 * dt * a2);
        let a3 = g * q3.sin();
        let (q4, v4) = (q + dt * v3, v + dt * a3);
        let a4 = g * q4.sin();
        q += dt / 6.0 * (v + 2.0 * v2 + 2.0 * v3 + v4);
        v += dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
    }
    q
}

fn rk4_path(g: f64, q0: f64, v0: f64, dt: f64, steps: usize) -> (Vec<f64>, Vec<f64>) {
    let mut qs = Vec::with_capacity(steps + 1);
    let mut vs = Vec::with_capacity(steps + 1);
    let (mut q, mut v) = (q0, v0);
    qs.push(q);
    vs.push(v);
    for _ in 0..steps {
        let a1 = g * q.sin();
        let (q2, v2) = (q + 0.5 * dt * v, v + 0.5 * dt * a1);
        let a2 = g * q2.sin();
        let (q3, v3) = (q + 0.5 * dt * v2, v + 0.5 * dt * a2);
        let a3 = g * q3.sin();
        let (q4, v4) = (q + dt * v3, v + dt * a3);
        let a4 = g * q4.sin();
        q += dt / 6.0 * (v + 2.0 * v2 + 2.0 * v3 + v4);
        v += dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
        qs.push(q);
        vs.push(v);
    }
    (qs, vs)
}

/// Number of RK4 steps used over a span (always even, for Simpson's rule).
fn step_count(span: f64, g: f64) -> usize {
    let per_unit = 400.0 * g.sqrt().max(1.0);
    let n = ((span * per_unit).ceil() as usize).max(4000);
    n + n % 2
}

/// Solves the pendulum boundary value problem by shooting on the initial
/// velocity: a scan brackets the root, bisection shrinks the bracket to
/// adjacent doubles.
pub fn pendulum_bvp(g: f64, q_a: f64, q_b: f64, t_a: f64, t_b: f64) -> Result<BvpSolution> {
    if !(t_b > t_a) {
        return domain("need t_a < t_b");
    }
    if !(g >= 0.0) {
        return domain("pendulum strength must be nonnegative");
    }
    if (q_b - q_a).abs() > 2.0 * std::f64::consts::PI * (1.0 + 1e-12) {
        return domain("endpoints must satisfy |q_b - q_a| <= 2 pi");
    }
    let span = t_b - t_a;
    let n = step_count(span, g);
    let dt = span / n as f64;
    let miss = |v: f64| rk4_end(g, q_a, v, dt, n) - q_b;

    let guess = (q_b - q_a) / span;
    let unit = guess.abs().max(1.0) + 2.0 * g.sqrt();
    let mut scan = Vec::new();
    let (mut lo, mut hi) = (guess, guess);
    let mut f_lo = miss(lo);
    scan.push((lo, f_lo));
    let mut f_hi = f_lo;
    let mut width = unit;
    for _ in 0..60 {
        if f_lo <= 0.0 {
            break;
        }
        lo = guess - width;
        f_lo = miss(lo);
        scan.push((lo, f_lo));
        width *= 2.0;
    }
    width = unit;
    for _ in 0..60 {
        if f_hi >= 0.0 {
            break;
        }
        hi = guess + width;
        f_hi = miss(hi);
        scan.push((hi, f_hi));
        width *= 2.0;
    }
    if !(f_lo <= 0.0 && f_hi >= 0.0) {
        return Err(Error::Bvp {
            message: "no sign change in the shooting scan".into(),
            scan,
        });
    }
    let mut root = if f_lo == 0.0 { lo } else { hi };
    if f_lo != 0.0 && f_hi != 0.0 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let f = miss(mid);
            if f == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if f < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        root = 0.5 * (lo + hi);
    }

    let (q, qdot) = rk4_path(g, q_a, root, dt, n);
    let integrand: Vec<f64> = q.iter().zip(&qdot).map(|(x, v)| 0.5 * v * v + g * (1.0 - x.cos())).collect();
    let action = simpson(&integrand, dt);
    let energies = q.iter().zip(&qdot).map(|(x, v)| 0.5 * v * v - g * (1.0 - x.cos()));
    let (emin, emax) = energies.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), e| (a.min(e), b.max(e)));
    Ok(BvpSolution {
        times: (0..=n).map(|j| t_a + dt * j as f64).collect(),
        q,
        qdot,
        action,
        initial_velocity: root,
        energy_spread: emax - emin,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionProfile {
    pub points: Vec<(f64, f64)>,
    /// Differences change sign exactly once (from negative to positive).
    pub unimodal: bool,
    /// Index of the smallest value.
    pub argmin: usize,
    /// max |𝕃(t₀+σ) − 𝕃(t₂−σ)| over mirrored grid pairs.
    pub symmetry_residual: f64,
}

/// 𝕃(s) = action(0 → π on (t₀, s)) + action(π → 2π on (s, t₂)).
pub fn action_profile(g: f64, t0: f64, t2: f64, s_grid: &[f64]) -> Result<ActionProfile> {
    if s_grid.iter().any(|&s| !(s > t0 && s < t2)) {
        return domain("grid points must lie strictly inside (t0, t2)");
    }
    let pi = std::f64::consts::PI;
    let values = crate::exec::map_slice(crate::exec::ExecMode::best(), s_grid, |&s| {
        let first = pendulum_bvp(g, 0.0, pi, t0, s)?;
        let second = pendulum_bvp(g, pi, 2.0 * pi, s, t2)?;
        Ok::<_, Error>(first.action + second.action)
    });
    let values: Vec<f64> = values.into_iter().collect::<Result<_>>()?;
    let points: Vec<(f64, f64)> = s_grid.iter().copied().zip(values.iter().copied()).collect();
    let argmin = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map_or(0, |(i, _)| i);
    let diffs: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let unimodal = diffs[..argmin].iter().all(|&d| d < 0.0) && diffs[argmin..].iter().all(|&d| d > 0.0);
    let n = values.len();
    let symmetry_residual = (0..n / 2)
        .map(|i| (values[i] - values[n - 1 - i]).abs())
        .fold(0.0, f64::max);
    Ok(ActionProfile {
        points,
        unimodal,
        argmin,
        symmetry_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn free_motion_action() {
        let s = pendulum_bvp(0.0, 0.0, 2.0 * PI, 0.0, 3.0).unwrap();
        assert!((s.action - 2.0 * PI * PI / 3.0).abs() < 1e-10);
    }

    #[test]
    fn separatrix_action() {
        let s = pendulum_bvp(1.0, 0.0, 2.0 * PI, 0.0, 40.0).unwrap();
        assert!((s.action - 8.0).abs() < 8e-4, "{}", s.action);
        assert!(s.energy_spread < 1e-8);
    }

    #[test]
    fn time_translation() {
        let a = pendulum_bvp(0.7, 0.3, 4.0, 0.0, 5.0).unwrap();
        let b = pendulum_bvp(0.7, 0.3, 4.0, 10.0, 15.0).unwrap();
        assert!((a.action - b.action).abs() < 1e-12);
    }

    #[test]
    fn negative_direction_is_supported() {
        let a = pendulum_bvp(1.0, 0.0, -2.0, 0.0, 3.0).unwrap();
        let b = pendulum_bvp(1.0, 0.0, 2.0, 0.0, 3.0).unwrap();
        assert!((a.action - b.action).abs() < 1e-10);
    }
}
