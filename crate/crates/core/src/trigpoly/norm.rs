use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::periodic::PeriodicFn;
use super::poly::TrigPoly;
use super::spectrum::Spectrum;
use crate::error::{domain, Result};
use crate::exec::{self, ExecMode};

/// Default number of grid points per dimension for sup-norm estimates.
pub const DEFAULT_GRID: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormMethod {
    Analytic,
    Grid,
}

/// A Hölder `C^r` norm estimate Σ_{|α|≤[r]} sup|D^α f| (+ Hölder seminorm of
/// the top derivatives when r is not an integer).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub r: f64,
    pub value: f64,
    pub grid_size: usize,
    pub method: NormMethod,
    /// sup|f| on the same grid.
    pub sup_norm: f64,
    /// Sum of sups for each derivative order 0..=[r].
    pub order_sups: Vec<f64>,
    pub seminorm: Option<f64>,
}

/// Anything whose Hölder norm can be estimated.
#[derive(Debug, Clone, Copy)]
pub enum Normed<'a> {
    Fn(&'a PeriodicFn),
    Poly(&'a TrigPoly),
}

impl<'a> From<&'a PeriodicFn> for Normed<'a> {
    fn from(f: &'a PeriodicFn) -> Self {
        Normed::Fn(f)
    }
}

impl<'a> From<&'a TrigPoly> for Normed<'a> {
    fn from(p: &'a TrigPoly) -> Self {
        Normed::Poly(p)
    }
}

fn split_order(r: f64) -> Result<(usize, f64)> {
    if !(r >= 0.0) || !r.is_finite() {
        return domain(format!("norm order must be a finite nonnegative number, got {r}"));
    }
    let order = r.floor();
    Ok((order as usize, r - order))
}

pub fn holder_norm<'a>(f: impl Into<Normed<'a>>, r: f64, grid: usize) -> Result<NormReport> {
    if grid < 64 {
        return domain("norm grids need at least 64 points");
    }
    match f.into() {
        Normed::Fn(f) => holder_norm_fn(f, r, grid),
        Normed::Poly(p) => holder_norm_poly(p, r, grid),
    }
}

/// Compares the estimate at `grid` and `2·grid`; returns (coarse, fine, relative change).
pub fn refinement_check<'a>(f: impl Into<Normed<'a>>, r: f64, grid: usize) -> Result<(f64, f64, f64)> {
    let f = f.into();
    let coarse = holder_norm(f, r, grid)?.value;
    let fine = holder_norm(f, r, 2 * grid)?.value;
    Ok((coarse, fine, (fine - coarse).abs() / fine.abs().max(f64::MIN_POSITIVE)))
}

fn holder_norm_fn(f: &PeriodicFn, r: f64, grid: usize) -> Result<NormReport> {
    let (order, theta) = split_order(r)?;
    if !f.smoothness().at_least(order as u32) {
        return domain(format!("derivative of order {order} is not available"));
    }
    // Grid nodes: uniform over the declared support (endpoints included, where
    // the function and its derivatives vanish), otherwise over the whole circle.
    let (points, spacing, periodic): (Vec<f64>, f64, bool) = match f.support() {
        Some((a, b)) => {
            let h = (b - a) / grid as f64;
            ((0..=grid).map(|j| a + h * j as f64).collect(), h, false)
        }
        None => {
            let h = 2.0 * PI / grid as f64;
            ((0..grid).map(|j| -PI + h * j as f64).collect(), h, true)
        }
    };
    let ders: Vec<Vec<f64>> = exec::map_slice(ExecMode::best(), &points, |&x| f.derivatives(x, order));
    let order_sups: Vec<f64> = (0..=order)
        .map(|s| ders.iter().map(|d| d[s].abs()).fold(0.0, f64::max))
        .collect();
    let mut value: f64 = order_sups.iter().sum();
    let seminorm = (theta > 0.0).then(|| {
        let top: Vec<f64> = ders.iter().map(|d| d[order]).collect();
        pair_seminorm(&points, &top, theta, spacing, periodic)
    });
    if let Some(s) = seminorm {
        value += s;
    }
    Ok(NormReport {
        r,
        value,
        grid_size: grid,
        method: NormMethod::Grid,
        sup_norm: order_sups[0],
        order_sups,
        seminorm,
    })
}

/// max |g_i − g_j| / dist^θ over node pairs with dist ∈ [min_sep, π].
fn pair_seminorm(points: &[f64], g: &[f64], theta: f64, min_sep: f64, periodic: bool) -> f64 {
    let n = points.len();
    let lo = min_sep * (1.0 - 1e-9);
    let per_row = exec::map_range(ExecMode::best(), n, |i| {
        let mut best = 0.0f64;
        for j in i + 1..n {
            let mut dist = (points[j] - points[i]).abs();
            if periodic {
                dist = dist.min(2.0 * PI - dist);
            }
            if dist < lo || dist > PI * (1.0 + 1e-12) {
                continue;
            }
            best = best.max((g[i] - g[j]).abs() / dist.powf(theta));
        }
        best
    });
    per_row.into_iter().fold(0.0, f64::max)
}

/// All multi-indices of the given total order in `dim` variables.
pub fn multi_indices(dim: usize, order: usize) -> Vec<Vec<u32>> {
    if dim == 1 {
        return vec![vec![order as u32]];
    }
    let mut out = Vec::new();
    for first in (0..=order).rev() {
        for mut rest in multi_indices(dim - 1, order - first) {
            rest.insert(0, first as u32);
            out.push(rest);
        }
    }
    out
}

fn holder_norm_poly(p: &TrigPoly, r: f64, grid: usize) -> Result<NormReport> {
    let (order, theta) = split_order(r)?;
    let dim = p.dim();
    let mut order_sups = Vec::with_capacity(order + 1);
    let mut analytic = theta == 0.0;
    let mut top_values: Vec<Vec<f64>> = Vec::new();

    if p.len() <= 1 && theta == 0.0 {
        // A single term: sup|D^α a·cos(⟨n,x⟩ + φ)| = |a|·Π|n_i|^α_i exactly.
        for s in 0..=order {
            let total: f64 = multi_indices(dim, s)
                .iter()
                .map(|alpha| {
                    let d = p.derivative(alpha);
                    d.terms().first().map_or(0.0, |t| t.cos.hypot(t.sin))
                })
                .sum();
            order_sups.push(total);
        }
    } else if dim == 1 {
        analytic = false;
        let spec = Spectrum::from_poly(p);
        for s in 0..=order {
            let vals = spec.sample(grid, s as u32);
            order_sups.push(vals.iter().map(|v| v.abs()).fold(0.0, f64::max));
            if s == order && theta > 0.0 {
                top_values.push(vals);
            }
        }
    } else {
        analytic = false;
        let total = grid.checked_pow(dim as u32).unwrap_or(usize::MAX);
        if total > 1 << 26 {
            return domain(format!("grid {grid}^{dim} is too large for direct evaluation"));
        }
        for s in 0..=order {
            let mut acc = 0.0;
            for alpha in multi_indices(dim, s) {
                let d = p.derivative(&alpha);
                let vals = eval_on_grid(&d, grid);
                acc += vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
                if s == order && theta > 0.0 {
                    top_values.push(vals);
                }
            }
            order_sups.push(acc);
        }
    }

    let seminorm = (theta > 0.0).then(|| {
        top_values
            .iter()
            .map(|vals| {
                if dim == 1 {
                    let h = 2.0 * PI / grid as f64;
                    let pts: Vec<f64> = (0..grid).map(|j| h * j as f64).collect();
                    pair_seminorm(&pts, vals, theta, h, true)
                } else {
                    displacement_seminorm(vals, dim, grid, theta)
                }
            })
            .fold(0.0, f64::max)
    });
    let value = order_sups.iter().sum::<f64>() + seminorm.unwrap_or(0.0);
    Ok(NormReport {
        r,
        value,
        grid_size: grid,
        method: if analytic { NormMethod::Analytic } else { NormMethod::Grid },
        sup_norm: order_sups[0],
        order_sups,
        seminorm,
    })
}

/// Values on the tensor grid (2π/grid)·Z^dim, row-major with the last index fastest.
pub fn eval_on_grid(p: &TrigPoly, grid: usize) -> Vec<f64> {
    let dim = p.dim();
    let total = grid.pow(dim as u32);
    let h = 2.0 * PI / grid as f64;
    exec::map_range(ExecMode::best(), total, |idx| {
        let mut x = vec![0.0; dim];
        let mut rem = idx;
        for xi in x.iter_mut().rev() {
            *xi = h * (rem % grid) as f64;
            rem /= grid;
        }
        p.eval(&x)
    })
}

/// Hölder seminorm in several variables, sampled over dyadic displacements
/// along the coordinate axes and diagonals.
fn displacement_seminorm(vals: &[f64], dim: usize, grid: usize, theta: f64) -> f64 {
    let h = 2.0 * PI / grid as f64;
    let mut dirs: Vec<Vec<i64>> = Vec::new();
    for code in 1..3usize.pow(dim as u32) {
        let mut e = vec![0i64; dim];
        let mut c = code;
        for ei in e.iter_mut() {
            *ei = (c % 3) as i64 - 1;
            c /= 3;
        }
        if e.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0) {
            dirs.push(e);
        }
    }
    let mut best = 0.0f64;
    for e in &dirs {
        let len = (e.iter().map(|x| x * x).sum::<i64>() as f64).sqrt();
        let mut step = 1usize;
        while step as f64 * h * len <= PI * (1.0 + 1e-12) {
            let dist = step as f64 * h * len;
            let m = exec::max_range(ExecMode::best(), vals.len(), |idx| {
                let mut rem = idx;
                let mut other = 0usize;
                let mut stride = 1usize;
                for k in (0..dim).rev() {
                    let coord = (rem % grid) as i64;
                    rem /= grid;
                    let shifted = (coord + e[k] * step as i64).rem_euclid(grid as i64) as usize;
                    other += shifted * stride;
                    stride *= grid;
                }
                (vals[idx] - vals[other]).abs() / dist.powf(theta)
            });
            best = best.max(m);
            step *= 2;
        }
    }
    best
}

/// Result of a Bernstein-inequality check sup|T^(s)| ≤ deg^s·sup|T|.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BernsteinReport {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
    pub grid: usize,
}

/// Checks Bernstein's inequality on a grid. In several variables the left side
/// is the largest s-th derivative along a coordinate axis.
pub fn bernstein_verify(t: &TrigPoly, s: u32) -> BernsteinReport {
    let deg = t.degree();
    let (lhs, sup, grid) = if t.dim() == 1 {
        let grid = (32 * (t.max_abs_freq() as usize + 1)).max(64).next_power_of_two();
        let spec = Spectrum::from_poly(t);
        let sup = spec.sample(grid, 0).iter().map(|v| v.abs()).fold(0.0, f64::max);
        let lhs = spec.sample(grid, s).iter().map(|v| v.abs()).fold(0.0, f64::max);
        (lhs, sup, grid)
    } else {
        let mut grid = (4 * (t.max_abs_freq() as usize + 1)).max(16);
        while grid.pow(t.dim() as u32) > 1 << 22 && grid > 8 {
            grid /= 2;
        }
        let sup = eval_on_grid(t, grid).iter().map(|v| v.abs()).fold(0.0, f64::max);
        let lhs = (0..t.dim())
            .map(|i| {
                let mut alpha = vec![0u32; t.dim()];
                alpha[i] = s;
                eval_on_grid(&t.derivative(&alpha), grid)
                    .iter()
                    .map(|v| v.abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        (lhs, sup, grid)
    };
    let rhs = deg.powi(s as i32) * sup;
    BernsteinReport {
        lhs,
        rhs,
        pass: lhs <= rhs * (1.0 + 1e-9),
        grid,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trigpoly::{bump, Term};

    #[test]
    fn cosine_norms() {
        let c = PeriodicFn::cos();
        assert!((holder_norm(&c, 0.0, 4096).unwrap().value - 1.0).abs() < 1e-12);
        assert!((holder_norm(&c, 1.0, 4096).unwrap().value - 2.0).abs() < 1e-6);
        let half = holder_norm(&c, 1.5, 4096).unwrap().value;
        assert!((half - 3.2039).abs() < 0.01 * 3.2039, "{half}");
    }

    #[test]
    fn polynomial_and_function_paths_agree() {
        let p = TrigPoly::new(
            1,
            vec![
                Term { freq: vec![1], cos: 1.0, sin: 0.0 },
                Term { freq: vec![3], cos: 0.2, sin: -0.4 },
            ],
        )
        .unwrap();
        let f = PeriodicFn::from_trig(p.clone()).unwrap();
        for r in [0.0, 1.0, 2.0, 1.5] {
            let a = holder_norm(&p, r, 1024).unwrap().value;
            let b = holder_norm(&f, r, 1024).unwrap().value;
            assert!((a - b).abs() < 1e-9 * a, "r={r}: {a} vs {b}");
        }
    }

    #[test]
    fn bump_norm_scales_like_inverse_square() {
        let a = holder_norm(&bump(0.25).unwrap(), 2.0, 4096).unwrap().value;
        let b = holder_norm(&bump(0.5).unwrap(), 2.0, 4096).unwrap().value;
        assert!((a / b - 4.0).abs() < 0.3 * 4.0, "{}", a / b);
    }

    #[test]
    fn bernstein_extremal_and_constant() {
        let c = TrigPoly::cosine(vec![7], 1.0);
        let r = bernstein_verify(&c, 1);
        assert!(r.pass);
        assert!((r.lhs - 7.0).abs() < 1e-12 && (r.rhs - 7.0).abs() < 1e-12);
        let k = TrigPoly::constant(1, 3.0);
        let r = bernstein_verify(&k, 1);
        assert!(r.pass && r.lhs == 0.0);
    }

    #[test]
    fn multi_index_counts() {
        assert_eq!(multi_indices(2, 2).len(), 3);
        assert_eq!(multi_indices(3, 2).len(), 6);
    }
}
