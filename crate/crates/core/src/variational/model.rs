use std::f64::consts::PI;

use crate::frame::lattice;
use crate::perturbation::PerturbationSpec;
use crate::trigpoly::spectrum::Spectrum;
use crate::trigpoly::TrigPoly;

/// A periodic 1-D function tabulated with values and two derivatives and
/// evaluated by piecewise quintic Hermite interpolation, which is C² and
/// cheap regardless of the polynomial degree.
#[derive(Debug, Clone)]
pub struct HermiteTable {
    h: f64,
    f: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
}

impl HermiteTable {
    pub fn from_poly(p: &TrigPoly) -> Self {
        let deg = p.max_abs_freq().max(1) as usize;
        let n = (32 * deg).max(1024).next_power_of_two();
        let spec = Spectrum::from_poly(p);
        Self {
            h: 2.0 * PI / n as f64,
            f: spec.sample(n, 0),
            d1: spec.sample(n, 1),
            d2: spec.sample(n, 2),
        }
    }

    pub fn len(&self) -> usize {
        self.f.len()
    }

    /// Largest tabulated |f|.
    pub fn max_abs(&self) -> f64 {
        self.f.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    /// (f, f', f'') at x.
    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        let n = self.f.len();
        let y = x.rem_euclid(2.0 * PI) / self.h;
        let j = (y.floor() as usize).min(n - 1);
        let t = y - j as f64;
        let k = (j + 1) % n;
        let h = self.h;
        let (p0, p1) = (self.f[j], self.f[k]);
        let (d0, d1) = (self.d1[j] * h, self.d1[k] * h);
        let (s0, s1) = (self.d2[j] * h * h, self.d2[k] * h * h);
        let dp = p1 - p0;
        let c2 = 0.5 * s0;
        let c3 = 10.0 * dp - 6.0 * d0 - 4.0 * d1 - 1.5 * s0 + 0.5 * s1;
        let c4 = -15.0 * dp + 8.0 * d0 + 7.0 * d1 + 1.5 * s0 - s1;
        let c5 = 6.0 * dp - 3.0 * d0 - 3.0 * d1 - 0.5 * s0 + 0.5 * s1;
        let f = p0 + t * (d0 + t * (c2 + t * (c3 + t * (c4 + t * c5))));
        let df = d0 + t * (2.0 * c2 + t * (3.0 * c3 + t * (4.0 * c4 + t * 5.0 * c5)));
        let ddf = 2.0 * c2 + t * (6.0 * c3 + t * (12.0 * c4 + t * 20.0 * c5));
        (f, df / h, ddf / (h * h))
    }
}

/// The coupling S·u(q₁)·w(q₂) in tabulated form.
#[derive(Debug, Clone)]
pub struct CouplingField {
    pub scale: f64,
    pub u: HermiteTable,
    pub w: HermiteTable,
}

impl CouplingField {
    /// (v, ∂₁v, ∂₂v, ∂₁₁v, ∂₁₂v, ∂₂₂v).
    pub fn eval(&self, q1: f64, q2: f64) -> [f64; 6] {
        let (u, u1, u2) = self.u.eval(q1);
        let (w, w1, w2) = self.w.eval(q2);
        let s = self.scale;
        [s * u * w, s * u1 * w, s * u * w1, s * u2 * w, s * u1 * w1, s * u * w2]
    }
}

/// L(q, q̇) = s·(A + B) with A = ½q̇₁² + g(1 − cos q₁) and
/// B = ½Σ_{i≥2} w_i q̇_i² + v(q₁, q₂).
#[derive(Debug, Clone)]
pub struct LagrangianModel {
    pub d: usize,
    /// w_i; the first entry is 1.
    pub kinetic_weights: Vec<f64>,
    pub pendulum_strength: f64,
    pub coupling: Option<CouplingField>,
    pub overall_scale: f64,
}

impl LagrangianModel {
    /// Free motion with unit weights and no potential.
    pub fn free(d: usize) -> Self {
        Self {
            d,
            kinetic_weights: vec![1.0; d],
            pendulum_strength: 0.0,
            coupling: None,
            overall_scale: 1.0,
        }
    }

    /// A pure pendulum in q₁ (other coordinates free).
    pub fn pendulum(d: usize, g: f64) -> Self {
        Self {
            pendulum_strength: g,
            ..Self::free(d)
        }
    }

    /// Same model with the coupling multiplied by `factor`.
    pub fn with_coupling_factor(mut self, factor: f64) -> Self {
        if let Some(c) = self.coupling.as_mut() {
            c.scale *= factor;
        }
        self
    }

    /// Same model without the pendulum or coupling: the integrable case.
    pub fn integrable(&self) -> Self {
        Self {
            pendulum_strength: 0.0,
            coupling: None,
            ..self.clone()
        }
    }

    /// Masses s·w_i of the kinetic term.
    pub fn masses(&self) -> Vec<f64> {
        self.kinetic_weights.iter().map(|w| self.overall_scale * w).collect()
    }

    pub fn a_part(&self, q1: f64, v1: f64) -> f64 {
        0.5 * v1 * v1 + self.pendulum_strength * (1.0 - q1.cos())
    }

    pub fn b_part(&self, q: &[f64], v: &[f64]) -> f64 {
        let kin: f64 = self.kinetic_weights.iter().zip(v).skip(1).map(|(w, x)| 0.5 * w * x * x).sum();
        kin + self.coupling_value(q)
    }

    pub fn coupling_value(&self, q: &[f64]) -> f64 {
        match (&self.coupling, self.d >= 2) {
            (Some(c), true) => c.eval(q[0], q[1])[0],
            _ => 0.0,
        }
    }

    /// U(q) = g(1 − cos q₁) + v(q₁, q₂).
    pub fn potential(&self, q: &[f64]) -> f64 {
        self.pendulum_strength * (1.0 - q[0].cos()) + self.coupling_value(q)
    }

    /// s·U, its gradient and Hessian (row-major d×d) at q.
    pub fn scaled_potential(&self, q: &[f64], grad: &mut [f64], hess: &mut [f64]) -> f64 {
        let d = self.d;
        let s = self.overall_scale;
        grad.iter_mut().for_each(|x| *x = 0.0);
        hess.iter_mut().for_each(|x| *x = 0.0);
        let g = self.pendulum_strength;
        let (sn, cs) = q[0].sin_cos();
        let mut u = g * (1.0 - cs);
        grad[0] = g * sn;
        hess[0] = g * cs;
        if let (Some(c), true) = (&self.coupling, d >= 2) {
            let [v, v1, v2, v11, v12, v22] = c.eval(q[0], q[1]);
            u += v;
            grad[0] += v1;
            grad[1] += v2;
            hess[0] += v11;
            hess[1] += v12;
            hess[d] += v12;
            hess[d + 1] += v22;
        }
        grad.iter_mut().for_each(|x| *x *= s);
        hess.iter_mut().for_each(|x| *x *= s);
        s * u
    }

    pub fn lagrangian(&self, q: &[f64], v: &[f64]) -> f64 {
        self.overall_scale * (self.a_part(q[0], v[0]) + self.b_part(q, v))
    }

    /// p = ∂L/∂q̇.
    pub fn momentum(&self, v: &[f64]) -> Vec<f64> {
        self.masses().iter().zip(v).map(|(m, x)| m * x).collect()
    }

    /// H(q, p) = Σ p_i²/(2m_i) − s·U(q).
    pub fn hamiltonian(&self, q: &[f64], p: &[f64]) -> f64 {
        let kin: f64 = self.masses().iter().zip(p).map(|(m, x)| 0.5 * x * x / m).sum();
        kin - self.overall_scale * self.potential(q)
    }
}

/// The Lagrangian of the perturbed system in resonant coordinates.
///
/// Kinetic weights are |k|²/|row_i|² for the frame rows, the pendulum
/// strength is |k|^(−a) and the overall factor is |k|^(−2).
pub fn lagrangian_from(spec: &PerturbationSpec) -> LagrangianModel {
    let k_sq = spec.params.k_norm_sq as f64;
    let kinetic_weights = spec
        .frame
        .rows()
        .iter()
        .map(|r| k_sq / lattice::norm_sq(r) as f64)
        .collect();
    LagrangianModel {
        d: spec.dim(),
        kinetic_weights,
        pendulum_strength: spec.params.pendulum_strength(),
        coupling: Some(CouplingField {
            scale: spec.coupling.scale,
            u: HermiteTable::from_poly(&spec.coupling.u),
            w: HermiteTable::from_poly(&spec.coupling.w),
        }),
        overall_scale: 1.0 / k_sq,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trigpoly::Term;

    #[test]
    fn hermite_table_matches_polynomial() {
        let p = TrigPoly::new(
            1,
            vec![
                Term { freq: vec![1], cos: 0.7, sin: -0.2 },
                Term { freq: vec![9], cos: 0.1, sin: 0.3 },
            ],
        )
        .unwrap();
        let t = HermiteTable::from_poly(&p);
        for &x in &[0.0, 0.123, 2.5, -1.7, 6.2] {
            let (f, d1, d2) = t.eval(x);
            assert!((f - p.eval(&[x])).abs() < 1e-10);
            assert!((d1 - p.derivative(&[1]).eval(&[x])).abs() < 1e-7);
            assert!((d2 - p.derivative(&[2]).eval(&[x])).abs() < 1e-4);
        }
    }

    #[test]
    fn legendre_duality() {
        let m = LagrangianModel {
            d: 3,
            kinetic_weights: vec![1.0, 0.5, 2.0],
            pendulum_strength: 0.3,
            coupling: None,
            overall_scale: 0.1,
        };
        let q = [0.4, -1.0, 2.0];
        let v = [1.5, -0.3, 0.7];
        let p = m.momentum(&v);
        let pv: f64 = p.iter().zip(&v).map(|(a, b)| a * b).sum();
        assert!((m.hamiltonian(&q, &p) + m.lagrangian(&q, &v) - pv).abs() < 1e-14);
    }
}
