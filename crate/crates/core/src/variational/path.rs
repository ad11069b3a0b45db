//! Discrete action minimization with the midpoint discrete Lagrangian
//!
//! ```text
//! L_d(q_j, q_{j+1}) = h·L((q_j + q_{j+1})/2, (q_{j+1} − q_j)/h).
//! ```
//!
//! Stationary points of Σ L_d satisfy the discrete Euler–Lagrange equations,
//! which are exactly the components of the gradient below. Newton steps use
//! the block tridiagonal Hessian.

use std::fmt::Write;

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::model::LagrangianModel;
use crate::error::{domain, Error, Result};
use crate::numeric::CompensatedSum;
use crate::trigpoly::fmt_real;

/// A minimizing path sampled on a uniform time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretePath {
    pub times: Vec<f64>,
    /// Lifted positions in the universal cover.
    pub points: Vec<Vec<f64>>,
    pub action: f64,
    /// Sup-norm of the discrete Euler–Lagrange residual.
    pub grad_norm: f64,
    pub rotation_estimate: Vec<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MinimizeOptions {
    pub tol: f64,
    pub max_iterations: usize,
    /// Step reduction factor of the backtracking line search.
    pub damping: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iterations: 200,
            damping: 0.5,
        }
    }
}

fn midpoint_terms(model: &LagrangianModel, points: &[Vec<f64>], h: f64) -> Vec<f64> {
    points
        .windows(2)
        .map(|w| {
            let mid: Vec<f64> = w[0].iter().zip(&w[1]).map(|(a, b)| 0.5 * (a + b)).collect();
            let vel: Vec<f64> = w[0].iter().zip(&w[1]).map(|(a, b)| (b - a) / h).collect();
            h * model.lagrangian(&mid, &vel)
        })
        .collect()
}

/// Σ_j L_d(q_j, q_{j+1}) with compensated summation.
pub fn discrete_action(model: &LagrangianModel, points: &[Vec<f64>], h: f64) -> f64 {
    let mut acc = CompensatedSum::new();
    for t in midpoint_terms(model, points, h) {
        acc.add(t);
    }
    acc.value()
}

/// Gradient and block tridiagonal Hessian with respect to the interior points.
struct Linearization {
    grad: Vec<f64>,
    /// Diagonal blocks, row-major d×d.
    diag: Vec<Vec<f64>>,
    /// Block coupling interior point j to j+1.
    off: Vec<Vec<f64>>,
}

fn linearize(model: &LagrangianModel, points: &[Vec<f64>], h: f64, with_hessian: bool) -> Linearization {
    let d = model.d;
    let k = points.len() - 1;
    let n = k - 1;
    let masses = model.masses();
    let mut grad = vec![0.0; n * d];
    let mut diag = if with_hessian { vec![vec![0.0; d * d]; n] } else { Vec::new() };
    let mut off = if with_hessian { vec![vec![0.0; d * d]; n.saturating_sub(1)] } else { Vec::new() };
    let mut mid = vec![0.0; d];
    let mut g = vec![0.0; d];
    let mut hs = vec![0.0; d * d];
    // Interval j joins points j and j+1; interior index of point j is j−1.
    for j in 0..k {
        for i in 0..d {
            mid[i] = 0.5 * (points[j][i] + points[j + 1][i]);
        }
        model.scaled_potential(&mid, &mut g, &mut hs);
        for i in 0..d {
            let kin = masses[i] * (points[j + 1][i] - points[j][i]) / h;
            let pot = 0.5 * h * g[i];
            if j >= 1 {
                grad[(j - 1) * d + i] += -kin + pot;
            }
            if j + 1 <= n {
                grad[j * d + i] += kin + pot;
            }
        }
        if with_hessian {
            for r in 0..d {
                for c in 0..d {
                    let pot = 0.25 * h * hs[r * d + c];
                    let kin = if r == c { masses[r] / h } else { 0.0 };
                    if j >= 1 {
                        diag[j - 1][r * d + c] += kin + pot;
                    }
                    if j + 1 <= n {
                        diag[j][r * d + c] += kin + pot;
                    }
                    if j >= 1 && j + 1 <= n {
                        off[j - 1][r * d + c] += -kin + pot;
                    }
                }
            }
        }
    }
    Linearization { grad, diag, off }
}

/// Solves the block tridiagonal system (with `shift` added to the diagonal)
/// by block Cholesky elimination; `None` if a pivot block is not positive
/// definite.
fn block_solve(lin: &Linearization, d: usize, shift: f64) -> Option<Vec<f64>> {
    let n = lin.diag.len();
    let mut chols: Vec<Cholesky<f64, nalgebra::Dyn>> = Vec::with_capacity(n);
    let mut rhs: Vec<DVector<f64>> = Vec::with_capacity(n);
    let mut prev_c: Option<DMatrix<f64>> = None;
    for j in 0..n {
        let mut dj = DMatrix::from_row_slice(d, d, &lin.diag[j]);
        for i in 0..d {
            dj[(i, i)] += shift;
        }
        let mut bj = DVector::from_iterator(d, lin.grad[j * d..(j + 1) * d].iter().map(|x| -x));
        if let Some(c) = &prev_c {
            // c = D̃_{j−1}^{-1} O_{j−1}; eliminate the sub-diagonal block O_{j−1}ᵀ.
            let o = DMatrix::from_row_slice(d, d, &lin.off[j - 1]);
            dj -= o.transpose() * c;
            let y = chols[j - 1].solve(&rhs[j - 1]);
            bj -= o.transpose() * y;
        }
        let ch = Cholesky::new(dj)?;
        if j + 1 < n {
            let o = DMatrix::from_row_slice(d, d, &lin.off[j]);
            prev_c = Some(ch.solve(&o));
        }
        chols.push(ch);
        rhs.push(bj);
    }
    let mut x = vec![DVector::zeros(d); n];
    for j in (0..n).rev() {
        let mut b = rhs[j].clone();
        if j + 1 < n {
            let o = DMatrix::from_row_slice(d, d, &lin.off[j]);
            b -= o * &x[j + 1];
        }
        x[j] = chols[j].solve(&b);
    }
    Some(x.into_iter().flat_map(|v| v.iter().copied().collect::<Vec<_>>()).collect())
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Discrete Euler–Lagrange residual (the action gradient) at the interior points.
pub fn action_gradient(model: &LagrangianModel, points: &[Vec<f64>], h: f64) -> Vec<f64> {
    linearize(model, points, h, false).grad
}

/// Straight line between the endpoint lifts with `k` intervals.
pub fn straight_line(start: &[f64], end: &[f64], k: usize) -> Vec<Vec<f64>> {
    (0..=k)
        .map(|j| {
            let t = j as f64 / k as f64;
            start.iter().zip(end).map(|(a, b)| a + t * (b - a)).collect()
        })
        .collect()
}

/// Minimizes the discrete action over paths with fixed endpoint lifts,
/// starting from the straight line.
pub fn minimize_path(
    model: &LagrangianModel,
    start: &[f64],
    end: &[f64],
    t_a: f64,
    t_b: f64,
    k: usize,
) -> Result<DiscretePath> {
    minimize_from(model, straight_line(start, end, k), t_a, t_b, &MinimizeOptions::default())
}

/// Minimizes starting from `initial`, whose first and last points are the
/// fixed endpoints.
pub fn minimize_from(
    model: &LagrangianModel,
    initial: Vec<Vec<f64>>,
    t_a: f64,
    t_b: f64,
    opts: &MinimizeOptions,
) -> Result<DiscretePath> {
    let d = model.d;
    let k = initial.len().saturating_sub(1);
    if k < 16 {
        return domain("paths need at least 16 intervals");
    }
    if !(t_b > t_a) {
        return domain("need t_b > t_a");
    }
    if initial.iter().any(|p| p.len() != d) {
        return Err(Error::Dimension {
            expected: d,
            got: initial.iter().find(|p| p.len() != d).map_or(0, |p| p.len()),
        });
    }
    let h = (t_b - t_a) / k as f64;
    let mut points = initial;
    let mut action = discrete_action(model, &points, h);
    let mut history = Vec::new();
    let scale_hint = model.masses().iter().fold(0.0f64, |m, x| m.max(*x)) / h;

    for iteration in 0..=opts.max_iterations {
        let lin = linearize(model, &points, h, true);
        let res = sup(&lin.grad);
        history.push(res);
        if res < opts.tol {
            return Ok(finish(points, t_a, h, action, res, iteration));
        }
        if iteration == opts.max_iterations {
            break;
        }
        let mut shift = 0.0;
        let step = loop {
            if let Some(s) = block_solve(&lin, d, shift) {
                break s;
            }
            shift = if shift == 0.0 { 1e-8 * scale_hint } else { shift * 10.0 };
            if shift > 1e12 * scale_hint {
                return Err(Error::Minimization {
                    iterations: iteration,
                    residual: res,
                    history,
                });
            }
        };
        let slope: f64 = lin.grad.iter().zip(&step).map(|(g, s)| g * s).sum();
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<Vec<f64>> = points
                .iter()
                .enumerate()
                .map(|(j, p)| {
                    if j == 0 || j == k {
                        p.clone()
                    } else {
                        p.iter().enumerate().map(|(i, x)| x + alpha * step[(j - 1) * d + i]).collect()
                    }
                })
                .collect();
            let trial_action = discrete_action(model, &trial, h);
            let armijo = trial_action <= action + 1e-4 * alpha * slope;
            // Near convergence action differences drown in rounding; fall
            // back to the residual as the merit function.
            let better_residual = || sup(&action_gradient(model, &trial, h)) < res;
            if armijo || better_residual() {
                points = trial;
                action = trial_action;
                accepted = true;
                break;
            }
            alpha *= opts.damping;
        }
        if !accepted {
            break;
        }
    }
    Err(Error::Minimization {
        iterations: history.len().saturating_sub(1),
        residual: history.last().copied().unwrap_or(f64::NAN),
        history,
    })
}

fn finish(points: Vec<Vec<f64>>, t_a: f64, h: f64, action: f64, res: f64, iterations: usize) -> DiscretePath {
    let k = points.len() - 1;
    let times: Vec<f64> = (0..=k).map(|j| t_a + h * j as f64).collect();
    let span = times[k] - times[0];
    let rotation_estimate = points[k].iter().zip(&points[0]).map(|(b, a)| (b - a) / span).collect();
    DiscretePath {
        times,
        points,
        action,
        grad_norm: res,
        rotation_estimate,
        iterations,
    }
}

impl DiscretePath {
    pub fn step(&self) -> f64 {
        self.times[1] - self.times[0]
    }

    /// Velocities at the nodes: central differences inside, one-sided at the ends.
    pub fn velocities(&self) -> Vec<Vec<f64>> {
        let k = self.points.len() - 1;
        let h = self.step();
        (0..=k)
            .map(|j| {
                let (a, b, span) = match j {
                    0 => (0, 1, h),
                    _ if j == k => (k - 1, k, h),
                    _ => (j - 1, j + 1, 2.0 * h),
                };
                self.points[b].iter().zip(&self.points[a]).map(|(x, y)| (x - y) / span).collect()
            })
            .collect()
    }

    /// CSV with columns t, q₁..q_d, q̇₁..q̇_d, action-so-far.
    pub fn to_csv(&self, model: &LagrangianModel) -> String {
        let d = self.points[0].len();
        let mut out = String::from("t");
        for i in 1..=d {
            let _ = write!(out, ",q{i}");
        }
        for i in 1..=d {
            let _ = write!(out, ",qdot{i}");
        }
        out.push_str(",action\n");
        let terms = midpoint_terms(model, &self.points, self.step());
        let vel = self.velocities();
        let mut acc = CompensatedSum::new();
        for (j, (p, v)) in self.points.iter().zip(&vel).enumerate() {
            if j > 0 {
                acc.add(terms[j - 1]);
            }
            out.push_str(&fmt_real(self.times[j]));
            for x in p.iter().chain(v) {
                out.push(',');
                out.push_str(&fmt_real(*x));
            }
            out.push(',');
            out.push_str(&fmt_real(acc.value()));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn free_motion_is_a_straight_line() {
        let m = LagrangianModel::free(2);
        let (a, b) = ([0.0, 1.0], [3.0, -2.0]);
        let p = minimize_path(&m, &a, &b, 0.0, 2.0, 64).unwrap();
        let expected = (9.0 + 9.0) / (2.0 * 2.0);
        assert!((p.action - expected).abs() < 1e-8);
        assert_eq!(p.rotation_estimate, vec![1.5, -1.5]);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let m = LagrangianModel {
            d: 2,
            kinetic_weights: vec![1.0, 0.7],
            pendulum_strength: 0.8,
            coupling: None,
            overall_scale: 0.5,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let k = 32;
        let h = 3.0 / k as f64;
        let mut pts = straight_line(&[0.0, 0.0], &[6.0, 2.0], k);
        for p in pts.iter_mut().take(k).skip(1) {
            p.iter_mut().for_each(|x| *x += rng.gen_range(-0.2..0.2));
        }
        let g = action_gradient(&m, &pts, h);
        let eps = 1e-6;
        for j in [1, 7, 20, 31] {
            for i in 0..2 {
                let mut plus = pts.clone();
                plus[j][i] += eps;
                let mut minus = pts.clone();
                minus[j][i] -= eps;
                let fd = (discrete_action(&m, &plus, h) - discrete_action(&m, &minus, h)) / (2.0 * eps);
                let an = g[(j - 1) * 2 + i];
                assert!((fd - an).abs() <= 1e-5 * an.abs().max(1e-3), "j={j} i={i}: {fd} vs {an}");
            }
        }
    }

    #[test]
    fn residual_is_below_tolerance() {
        let m = LagrangianModel::pendulum(1, 1.0);
        let p = minimize_path(&m, &[0.0], &[2.0 * std::f64::consts::PI], 0.0, 10.0, 400).unwrap();
        assert!(p.grad_norm < 1e-10);
        let csv = p.to_csv(&m);
        assert_eq!(csv.lines().count(), 402);
        assert!(csv.starts_with("t,q1,qdot1,action\n"));
    }
}
