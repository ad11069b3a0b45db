use serde::{Deserialize, Serialize};

use super::model::LagrangianModel;
use crate::error::{domain, Error, Result};

/// A Hamiltonian H(x, y) on T^d × R^d.
pub trait Hamiltonian: Sync {
    fn dim(&self) -> usize;
    fn energy(&self, x: &[f64], y: &[f64]) -> f64;
    /// ∂H/∂x.
    fn grad_x(&self, x: &[f64], y: &[f64], out: &mut [f64]);
    /// ∂H/∂y.
    fn grad_y(&self, x: &[f64], y: &[f64], out: &mut [f64]);
    /// For H = ½Σ c_i y_i² + V(x), the coefficients c_i.
    fn kinetic_coefficients(&self) -> Option<Vec<f64>> {
        None
    }
}

/// ½|y|² + V(x) with V given by its gradient and value.
pub struct Mechanical<V, G>
where
    V: Fn(&[f64]) -> f64 + Sync,
    G: Fn(&[f64], &mut [f64]) + Sync,
{
    pub coefficients: Vec<f64>,
    pub potential: V,
    pub gradient: G,
}

impl<V, G> Hamiltonian for Mechanical<V, G>
where
    V: Fn(&[f64]) -> f64 + Sync,
    G: Fn(&[f64], &mut [f64]) + Sync,
{
    fn dim(&self) -> usize {
        self.coefficients.len()
    }

    fn energy(&self, x: &[f64], y: &[f64]) -> f64 {
        let kin: f64 = self.coefficients.iter().zip(y).map(|(c, v)| 0.5 * c * v * v).sum();
        kin + (self.potential)(x)
    }

    fn grad_x(&self, x: &[f64], _y: &[f64], out: &mut [f64]) {
        (self.gradient)(x, out)
    }

    fn grad_y(&self, _x: &[f64], y: &[f64], out: &mut [f64]) {
        for ((o, c), v) in out.iter_mut().zip(&self.coefficients).zip(y) {
            *o = c * v;
        }
    }

    fn kinetic_coefficients(&self) -> Option<Vec<f64>> {
        Some(self.coefficients.clone())
    }
}

/// Free motion H = ½|y|².
pub fn free_hamiltonian(d: usize) -> impl Hamiltonian {
    Mechanical {
        coefficients: vec![1.0; d],
        potential: |_x: &[f64]| 0.0,
        gradient: |_x: &[f64], out: &mut [f64]| out.iter_mut().for_each(|o| *o = 0.0),
    }
}

/// H = ½y² − g(1 − cos x), the Legendre dual of L = ½ẋ² + g(1 − cos x).
pub fn pendulum_hamiltonian(g: f64) -> impl Hamiltonian {
    Mechanical {
        coefficients: vec![1.0],
        potential: move |x: &[f64]| -g * (1.0 - x[0].cos()),
        gradient: move |x: &[f64], out: &mut [f64]| out[0] = -g * x[0].sin(),
    }
}

/// The Hamiltonian dual to a [`LagrangianModel`].
pub struct ModelHamiltonian<'a>(pub &'a LagrangianModel);

impl Hamiltonian for ModelHamiltonian<'_> {
    fn dim(&self) -> usize {
        self.0.d
    }

    fn energy(&self, x: &[f64], y: &[f64]) -> f64 {
        self.0.hamiltonian(x, y)
    }

    fn grad_x(&self, x: &[f64], _y: &[f64], out: &mut [f64]) {
        let d = self.0.d;
        let mut hess = vec![0.0; d * d];
        self.0.scaled_potential(x, out, &mut hess);
        out.iter_mut().for_each(|o| *o = -*o);
    }

    fn grad_y(&self, _x: &[f64], y: &[f64], out: &mut [f64]) {
        for ((o, m), p) in out.iter_mut().zip(self.0.masses()).zip(y) {
            *o = p / m;
        }
    }

    fn kinetic_coefficients(&self) -> Option<Vec<f64>> {
        Some(self.0.masses().iter().map(|m| 1.0 / m).collect())
    }
}

/// H = ½|y|² + Ψ(x)·⟨α, y⟩ with Ψ = (1/2d)·Σ(1 − cos x_i): the Hamiltonian of
/// the Lagrangian ½|ẋ − Ψ(x)α|². The zero section {y = 0} is invariant.
pub struct Mane {
    pub alpha: Vec<f64>,
}

impl Mane {
    fn psi(&self, x: &[f64]) -> f64 {
        x.iter().map(|xi| 1.0 - xi.cos()).sum::<f64>() / (2.0 * x.len() as f64)
    }
}

impl Hamiltonian for Mane {
    fn dim(&self) -> usize {
        self.alpha.len()
    }

    fn energy(&self, x: &[f64], y: &[f64]) -> f64 {
        let ay: f64 = self.alpha.iter().zip(y).map(|(a, b)| a * b).sum();
        0.5 * y.iter().map(|v| v * v).sum::<f64>() + self.psi(x) * ay
    }

    fn grad_x(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        let ay: f64 = self.alpha.iter().zip(y).map(|(a, b)| a * b).sum();
        let n = 2.0 * x.len() as f64;
        for (o, xi) in out.iter_mut().zip(x) {
            *o = xi.sin() / n * ay;
        }
    }

    fn grad_y(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        let p = self.psi(x);
        for ((o, a), v) in out.iter_mut().zip(&self.alpha).zip(y) {
            *o = v + p * a;
        }
    }
}

/// H = ½(r₁ − ψ(θ₂))² + ½r₂² on T² × R², whose torus {r₁ = ψ(θ₂), r₂ = 0}
/// is invariant but not a Lagrangian graph; every point of it is fixed.
pub struct TwistedTorus {
    pub amplitude: f64,
}

impl TwistedTorus {
    pub fn psi(&self, t: f64) -> (f64, f64) {
        (self.amplitude * t.sin(), self.amplitude * t.cos())
    }
}

impl Hamiltonian for TwistedTorus {
    fn dim(&self) -> usize {
        2
    }

    fn energy(&self, x: &[f64], y: &[f64]) -> f64 {
        let (p, _) = self.psi(x[1]);
        0.5 * (y[0] - p).powi(2) + 0.5 * y[1] * y[1]
    }

    fn grad_x(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        let (p, dp) = self.psi(x[1]);
        out[0] = 0.0;
        out[1] = -(y[0] - p) * dp;
    }

    fn grad_y(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        let (p, _) = self.psi(x[1]);
        out[0] = y[0] - p;
        out[1] = y[1];
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    StormerVerlet,
    ImplicitMidpoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// Lifted positions.
    pub x: Vec<Vec<f64>>,
    pub y: Vec<Vec<f64>>,
    pub scheme: Scheme,
    /// max |H − H(0)| / max(|H(0)|, 1e-300).
    pub energy_drift: f64,
    pub max_speed: f64,
}

/// Integrates Hamilton's equations: Störmer–Verlet when H is mechanical,
/// implicit midpoint (fixed-point iteration to 1e-13) otherwise. Every
/// `stride`-th step is stored.
pub fn integrate(h: &dyn Hamiltonian, x0: &[f64], y0: &[f64], t_end: f64, dt: f64, stride: usize) -> Result<Trajectory> {
    let d = h.dim();
    if x0.len() != d || y0.len() != d {
        return Err(Error::Dimension {
            expected: d,
            got: x0.len().min(y0.len()),
        });
    }
    if !(dt > 0.0) || !(t_end >= dt) {
        return domain("need dt > 0 and T >= dt");
    }
    let stride = stride.max(1);
    let steps = (t_end / dt).round() as usize;
    let dt = t_end / steps as f64;
    let (mut x, mut y) = (x0.to_vec(), y0.to_vec());
    let e0 = h.energy(&x, &y);
    let scheme = if h.kinetic_coefficients().is_some() {
        Scheme::StormerVerlet
    } else {
        Scheme::ImplicitMidpoint
    };
    let mut out = Trajectory {
        times: vec![0.0],
        x: vec![x.clone()],
        y: vec![y.clone()],
        scheme,
        energy_drift: 0.0,
        max_speed: 0.0,
    };
    let mut gx = vec![0.0; d];
    let mut gy = vec![0.0; d];
    let mut max_dev = 0.0f64;
    for n in 1..=steps {
        match scheme {
            Scheme::StormerVerlet => {
                h.grad_x(&x, &y, &mut gx);
                for i in 0..d {
                    y[i] -= 0.5 * dt * gx[i];
                }
                h.grad_y(&x, &y, &mut gy);
                for i in 0..d {
                    x[i] += dt * gy[i];
                }
                h.grad_x(&x, &y, &mut gx);
                for i in 0..d {
                    y[i] -= 0.5 * dt * gx[i];
                }
                h.grad_y(&x, &y, &mut gy);
            }
            Scheme::ImplicitMidpoint => {
                let (mut xn, mut yn) = (x.clone(), y.clone());
                let mut converged = false;
                for _ in 0..100 {
                    let xm: Vec<f64> = x.iter().zip(&xn).map(|(a, b)| 0.5 * (a + b)).collect();
                    let ym: Vec<f64> = y.iter().zip(&yn).map(|(a, b)| 0.5 * (a + b)).collect();
                    h.grad_x(&xm, &ym, &mut gx);
                    h.grad_y(&xm, &ym, &mut gy);
                    let mut change = 0.0f64;
                    for i in 0..d {
                        let nx = x[i] + dt * gy[i];
                        let ny = y[i] - dt * gx[i];
                        change = change.max((nx - xn[i]).abs()).max((ny - yn[i]).abs());
                        xn[i] = nx;
                        yn[i] = ny;
                    }
                    if change <= 1e-13 {
                        converged = true;
                        break;
                    }
                }
                if !converged {
                    return Err(Error::Integration {
                        time: n as f64 * dt,
                        message: "implicit midpoint iteration did not converge; reduce dt".into(),
                    });
                }
                x = xn;
                y = yn;
                h.grad_y(&x, &y, &mut gy);
            }
        }
        let speed = gy.iter().map(|v| v * v).sum::<f64>().sqrt();
        out.max_speed = out.max_speed.max(speed);
        max_dev = max_dev.max((h.energy(&x, &y) - e0).abs());
        if n % stride == 0 || n == steps {
            out.times.push(n as f64 * dt);
            out.x.push(x.clone());
            out.y.push(y.clone());
        }
    }
    out.energy_drift = max_dev / e0.abs().max(1e-300);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationEstimate {
    pub value: Vec<f64>,
    /// 2·max speed / T.
    pub error_bar: f64,
}

/// (x(T) − x(0))/T for a lifted trajectory.
pub fn rotation_vector(traj: &Trajectory) -> RotationEstimate {
    let n = traj.times.len() - 1;
    let span = traj.times[n] - traj.times[0];
    let value = traj.x[n].iter().zip(&traj.x[0]).map(|(b, a)| (b - a) / span).collect();
    RotationEstimate {
        value,
        error_bar: 2.0 * traj.max_speed / span,
    }
}
