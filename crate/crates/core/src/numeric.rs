//! Small numerical utilities shared by several modules.

/// Neumaier compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut acc = CompensatedSum::new();
    for x in it {
        acc.add(x);
    }
    acc.value()
}

/// Ordinary least-squares fit `y = intercept + slope * x`; returns `(slope, intercept)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Composite Simpson rule for uniformly spaced samples (odd count, at least 3).
/// Falls back to the trapezoid rule on the final interval for even counts.
pub fn simpson(samples: &[f64], h: f64) -> f64 {
    let n = samples.len();
    assert!(n >= 2);
    if n == 2 {
        return 0.5 * h * (samples[0] + samples[1]);
    }
    let (body, tail) = if n % 2 == 1 {
        (n, 0.0)
    } else {
        (n - 1, 0.5 * h * (samples[n - 2] + samples[n - 1]))
    };
    let mut acc = CompensatedSum::new();
    acc.add(samples[0]);
    acc.add(samples[body - 1]);
    for (i, &s) in samples.iter().enumerate().take(body - 1).skip(1) {
        acc.add(if i % 2 == 1 { 4.0 * s } else { 2.0 * s });
    }
    acc.value() * h / 3.0 + tail
}

/// Brent's minimizer (golden-section steps safeguarding parabolic
/// interpolation) for a unimodal function on `[a, b]`. Stops when the
/// bracket around the best point is within `tol`, or after `max_evals`
/// evaluations. Returns `(argmin, min)`.
pub fn brent_minimize<F, E>(mut f: F, a: f64, b: f64, tol: f64, max_evals: usize) -> Result<(f64, f64), E>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    const CGOLD: f64 = 0.381_966_011_250_105_1;
    let (mut a, mut b) = (a.min(b), a.max(b));
    let mut x = a + CGOLD * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x)?;
    let (mut fw, mut fv) = (fx, fx);
    let (mut d, mut e) = (0.0f64, 0.0f64);
    let tol1 = tol.max(4.0 * f64::EPSILON * a.abs().max(b.abs()));
    let tol2 = 2.0 * tol1;
    for _ in 1..max_evals {
        let xm = 0.5 * (a + b);
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let q0 = (x - v) * (fx - fw);
            let mut p = (x - v) * q0 - (x - w) * r;
            let mut q = 2.0 * (q0 - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            if p.abs() < (0.5 * q * e).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = f(u)?;
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            (v, fv) = (w, fw);
            (w, fw) = (x, fx);
            (x, fx) = (u, fu);
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                (v, fv) = (w, fw);
                (w, fw) = (u, fu);
            } else if fu <= fv || v == x || v == w {
                (v, fv) = (u, fu);
            }
        }
    }
    Ok((x, fx))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_cancelled_terms() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(v), 2.0);
    }

    #[test]
    fn simpson_is_exact_for_cubics() {
        let h = 0.1;
        let s: Vec<f64> = (0..=10).map(|i| (i as f64 * h).powi(3)).collect();
        assert!((simpson(&s, h) - 0.25).abs() < 1e-14);
    }

    #[test]
    fn linear_fit_recovers_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 - 2.0 * v).collect();
        let (m, c) = linear_fit(&x, &y);
        assert!((m + 2.0).abs() < 1e-12 && (c - 3.0).abs() < 1e-12);
    }

    #[test]
    fn brent_finds_minimum_quickly() {
        let mut calls = 0;
        let (x, _) = brent_minimize::<_, ()>(
            |x| {
                calls += 1;
                Ok((x - 0.3) * (x - 0.3) + 0.01 * (x - 0.3).powi(4))
            },
            -1.0,
            2.0,
            1e-10,
            100,
        )
        .unwrap();
        assert!((x - 0.3).abs() < 1e-8, "{x}");
        assert!(calls < 30, "{calls}");
        let (y, _) = brent_minimize::<_, ()>(|x| Ok(x.cos()), 2.0, 4.0, 1e-9, 100).unwrap();
        assert!((y - std::f64::consts::PI).abs() < 1e-7);
        assert!((x - 0.3).abs() < 1e-8);
    }
}
