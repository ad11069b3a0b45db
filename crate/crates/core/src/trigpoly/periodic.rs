use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use super::poly::TrigPoly;
use super::spectrum::Spectrum;
use crate::error::{domain, Result};

/// How many derivatives a function has.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothness {
    Finite(u32),
    Infinite,
}

impl Smoothness {
    pub fn at_least(self, order: u32) -> bool {
        match self {
            Smoothness::Infinite => true,
            Smoothness::Finite(k) => k >= order,
        }
    }

    fn min(self, other: Smoothness) -> Smoothness {
        match (self, other) {
            (Smoothness::Finite(a), Smoothness::Finite(b)) => Smoothness::Finite(a.min(b)),
            (Smoothness::Finite(a), _) | (_, Smoothness::Finite(a)) => Smoothness::Finite(a),
            _ => Smoothness::Infinite,
        }
    }
}

/// User-supplied evaluator: `(x, order)` ↦ `[f(x), f'(x), …, f^(order)(x)]`.
pub type DerivativeFn = Arc<dyn Fn(f64, usize) -> Vec<f64> + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Bump { radius: f64, peak: f64 },
    Trig(TrigPoly),
    Combination(Vec<(f64, PeriodicFn)>),
    Shifted(Box<PeriodicFn>, f64),
    Custom(DerivativeFn),
}

/// A 2π-periodic real function with analytic derivatives.
#[derive(Clone)]
pub struct PeriodicFn {
    kind: Kind,
    smoothness: Smoothness,
    support: Option<(f64, f64)>,
}

impl fmt::Debug for PeriodicFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.kind {
            Kind::Bump { radius, .. } => format!("Bump(R={radius})"),
            Kind::Trig(p) => format!("Trig({} terms)", p.len()),
            Kind::Combination(v) => format!("Combination({} parts)", v.len()),
            Kind::Shifted(_, s) => format!("Shifted({s})"),
            Kind::Custom(_) => "Custom".to_string(),
        };
        f.debug_struct("PeriodicFn")
            .field("kind", &kind)
            .field("smoothness", &self.smoothness)
            .field("support", &self.support)
            .finish()
    }
}

/// Reduces x to [−π, π).
pub fn wrap(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y >= PI {
        -PI
    } else {
        y
    }
}

/// The smooth bump √2·exp(1 − 1/(1 − (x/R)²)) on (−R, R), zero elsewhere.
pub fn bump(radius: f64) -> Result<PeriodicFn> {
    if !(radius > 0.0 && radius <= PI) {
        return domain(format!("bump radius must lie in (0, pi], got {radius}"));
    }
    Ok(PeriodicFn {
        kind: Kind::Bump {
            radius,
            peak: std::f64::consts::SQRT_2,
        },
        smoothness: Smoothness::Infinite,
        support: Some((-radius, radius)),
    })
}

impl PeriodicFn {
    pub fn from_trig(p: TrigPoly) -> Result<Self> {
        if p.dim() != 1 {
            return domain("periodic functions are univariate");
        }
        Ok(Self {
            kind: Kind::Trig(p),
            smoothness: Smoothness::Infinite,
            support: None,
        })
    }

    pub fn constant(c: f64) -> Self {
        Self::from_trig(TrigPoly::constant(1, c)).expect("1-D")
    }

    pub fn cos() -> Self {
        Self::from_trig(TrigPoly::cosine(vec![1], 1.0)).expect("1-D")
    }

    /// A function given by its derivative evaluator.
    pub fn custom(smoothness: Smoothness, support: Option<(f64, f64)>, f: DerivativeFn) -> Self {
        Self {
            kind: Kind::Custom(f),
            smoothness,
            support,
        }
    }

    /// Σ c_i f_i.
    pub fn linear_combination(parts: Vec<(f64, PeriodicFn)>) -> Self {
        let smoothness = parts
            .iter()
            .map(|(_, f)| f.smoothness)
            .fold(Smoothness::Infinite, Smoothness::min);
        let support = parts.iter().try_fold(None::<(f64, f64)>, |acc, (_, f)| {
            let s = f.support?;
            Some(Some(match acc {
                None => s,
                Some((a, b)) => (a.min(s.0), b.max(s.1)),
            }))
        });
        Self {
            kind: Kind::Combination(parts),
            smoothness,
            support: support.flatten(),
        }
    }

    /// x ↦ f(x − shift).
    pub fn shifted(&self, shift: f64) -> Self {
        let support = self.support.and_then(|(a, b)| {
            let (a, b) = (a + shift, b + shift);
            (a >= -PI && b <= PI).then_some((a, b))
        });
        Self {
            kind: Kind::Shifted(Box::new(self.clone()), shift),
            smoothness: self.smoothness,
            support,
        }
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    /// Interval inside [−π, π] outside of which the function vanishes.
    pub fn support(&self) -> Option<(f64, f64)> {
        self.support
    }

    /// Radius of a bump, if this is one.
    pub fn bump_radius(&self) -> Option<f64> {
        match self.kind {
            Kind::Bump { radius, .. } => Some(radius),
            _ => None,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.derivatives(x, 0)[0]
    }

    /// `[f(x), f'(x), …, f^(order)(x)]`.
    pub fn derivatives(&self, x: f64, order: usize) -> Vec<f64> {
        match &self.kind {
            Kind::Bump { radius, peak } => bump_derivatives(wrap(x), *radius, *peak, order),
            Kind::Trig(p) => (0..=order)
                .map(|s| p.derivative(&[s as u32]).eval(&[x]))
                .collect(),
            Kind::Combination(parts) => {
                let mut out = vec![0.0; order + 1];
                for (c, f) in parts {
                    for (o, v) in out.iter_mut().zip(f.derivatives(x, order)) {
                        *o += c * v;
                    }
                }
                out
            }
            Kind::Shifted(f, s) => f.derivatives(x - s, order),
            Kind::Custom(f) => f(x, order),
        }
    }

    /// Values at x_j = 2πj/n (j = 0..n), the uniform grid used for sampling.
    pub fn sample_uniform(&self, n: usize) -> Vec<f64> {
        if let Kind::Trig(p) = &self.kind {
            return Spectrum::from_poly(p).sample(n, 0);
        }
        let step = 2.0 * PI / n as f64;
        match self.support {
            // Skip the (often vast) region where the function vanishes.
            Some((a, b)) => (0..n)
                .map(|j| {
                    let x = wrap(j as f64 * step);
                    if x > a && x < b {
                        self.eval(x)
                    } else {
                        0.0
                    }
                })
                .collect(),
            None => (0..n).map(|j| self.eval(j as f64 * step)).collect(),
        }
    }
}

/// Taylor-mode derivatives of √2·exp(1 − 1/(1 − u²)), u = x/R.
///
/// With s(u) = 1 − u², r = 1/s and e = exp(1 − r), the power series of
/// s, r and e around u₀ follow from the usual recurrences for reciprocals
/// and exponentials of truncated series.
fn bump_derivatives(x: f64, radius: f64, peak: f64, order: usize) -> Vec<f64> {
    let u0 = x / radius;
    let mut out = vec![0.0; order + 1];
    if u0.abs() >= 1.0 {
        return out;
    }
    let s0 = 1.0 - u0 * u0;
    let a0 = 1.0 - 1.0 / s0;
    if a0 < -700.0 {
        return out;
    }
    let s = [s0, -2.0 * u0, -1.0];
    let mut r = vec![0.0; order + 1];
    r[0] = 1.0 / s0;
    for k in 1..=order {
        let mut acc = 0.0;
        for j in 1..=k.min(2) {
            acc += s[j] * r[k - j];
        }
        r[k] = -acc / s0;
    }
    let mut e = vec![0.0; order + 1];
    e[0] = a0.exp();
    for k in 1..=order {
        let mut acc = 0.0;
        for j in 1..=k {
            acc += j as f64 * (-r[j]) * e[k - j];
        }
        e[k] = acc / k as f64;
    }
    let mut fact = 1.0;
    let mut scale = 1.0;
    for (k, o) in out.iter_mut().enumerate() {
        if k > 0 {
            fact *= k as f64;
            scale /= radius;
        }
        *o = peak * e[k] * fact * scale;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_peak_and_support() {
        let b = bump(0.5).unwrap();
        assert!((b.eval(0.0) - 2f64.sqrt()).abs() < 1e-12);
        for x in [0.5, -0.5, 1.0, -1.0] {
            assert_eq!(b.eval(x), 0.0);
        }
        assert!(bump(0.0).is_err());
        assert!(bump(4.0).is_err());
    }

    #[test]
    fn bump_derivatives_match_finite_differences() {
        let b = bump(0.8).unwrap();
        let h = 1e-3;
        for &x in &[-0.6, -0.2, 0.0, 0.3, 0.7] {
            let d = b.derivatives(x, 4);
            for k in 0..4 {
                let g = |y: f64| b.derivatives(y, k)[k];
                // fourth-order central difference
                let fd = (g(x - 2.0 * h) - 8.0 * g(x - h) + 8.0 * g(x + h) - g(x + 2.0 * h)) / (12.0 * h);
                let tol = 1e-6 * d[k + 1].abs().max(1.0);
                assert!((fd - d[k + 1]).abs() < tol, "x={x} k={k}: {fd} vs {}", d[k + 1]);
            }
        }
    }

    #[test]
    fn periodicity_is_exact() {
        let b = bump(1.0).unwrap();
        for &x in &[-0.3, 0.9, 2.5] {
            // equal up to the rounding of x + 2π itself
            assert!((b.eval(x) - b.eval(x + 2.0 * PI)).abs() < 1e-14);
        }
    }

    #[test]
    fn combination_and_shift() {
        let f = PeriodicFn::linear_combination(vec![(2.0, bump(0.5).unwrap()), (-1.0, PeriodicFn::cos())]);
        assert!((f.eval(0.1) - (2.0 * bump(0.5).unwrap().eval(0.1) - 0.1f64.cos())).abs() < 1e-15);
        let g = bump(0.5).unwrap().shifted(1.0);
        assert_eq!(g.support(), Some((0.5, 1.5)));
        assert!((g.eval(1.0) - 2f64.sqrt()).abs() < 1e-12);
    }
}
