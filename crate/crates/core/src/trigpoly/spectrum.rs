//! Dense complex coefficient arrays for 1-D trigonometric polynomials.

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::poly::{Term, TrigPoly};

/// Coefficients c_n of Σ c_n e^{inx}, stored at index n + deg.
#[derive(Debug, Clone)]
pub(crate) struct Spectrum {
    pub deg: usize,
    pub c: Vec<Complex64>,
}

/// Below this many multiply-adds a direct convolution is used.
const DIRECT_LIMIT: usize = 4_000_000;

impl Spectrum {
    pub fn from_poly(p: &TrigPoly) -> Self {
        assert_eq!(p.dim(), 1);
        let deg = p.max_abs_freq() as usize;
        let mut c = vec![Complex64::new(0.0, 0.0); 2 * deg + 1];
        for t in p.terms() {
            let n = t.freq[0] as usize;
            if n > deg {
                continue;
            }
            let (pos, neg) = TrigPoly::complex_coeffs(t);
            c[deg + n] += pos;
            if n > 0 {
                c[deg - n] += neg;
            }
        }
        Self { deg, c }
    }

    pub fn at(&self, n: i64) -> Complex64 {
        if n.unsigned_abs() as usize > self.deg {
            Complex64::new(0.0, 0.0)
        } else {
            self.c[(n + self.deg as i64) as usize]
        }
    }

    /// Back to a real polynomial, dropping terms of amplitude ≤ `tol`.
    pub fn to_poly(&self, tol: f64) -> TrigPoly {
        let mut terms = Vec::with_capacity(self.deg + 1);
        for n in 0..=self.deg as i64 {
            let (p, m) = (self.at(n), self.at(-n));
            let (cos, sin) = if n == 0 {
                (p.re, 0.0)
            } else {
                (p.re + m.re, m.im - p.im)
            };
            if cos.hypot(sin) > tol {
                terms.push(Term {
                    freq: vec![n],
                    cos,
                    sin,
                });
            }
        }
        TrigPoly::new(1, terms).expect("1-D terms")
    }

    pub fn convolve(&self, other: &Spectrum) -> Spectrum {
        let deg = self.deg + other.deg;
        let (la, lb) = (self.c.len(), other.c.len());
        if la * lb <= DIRECT_LIMIT {
            let mut c = vec![Complex64::new(0.0, 0.0); 2 * deg + 1];
            for (i, a) in self.c.iter().enumerate() {
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for (j, b) in other.c.iter().enumerate() {
                    c[i + j] += a * b;
                }
            }
            return Spectrum { deg, c };
        }
        let n = (la + lb - 1).next_power_of_two();
        let mut planner = FftPlanner::<f64>::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let mut a = self.c.clone();
        a.resize(n, Complex64::new(0.0, 0.0));
        let mut b = other.c.clone();
        b.resize(n, Complex64::new(0.0, 0.0));
        fwd.process(&mut a);
        fwd.process(&mut b);
        for (x, y) in a.iter_mut().zip(&b) {
            *x *= y;
        }
        inv.process(&mut a);
        let scale = 1.0 / n as f64;
        let c = a[..2 * deg + 1].iter().map(|z| z * scale).collect();
        Spectrum { deg, c }
    }

    /// Values of the `order`-th derivative at x_j = 2πj/grid, j = 0..grid.
    pub fn sample(&self, grid: usize, order: u32) -> Vec<f64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); grid];
        let i_pow = Complex64::new(0.0, 1.0).powu(order);
        for (idx, c) in self.c.iter().enumerate() {
            let n = idx as i64 - self.deg as i64;
            let factor = if order == 0 { Complex64::new(1.0, 0.0) } else { i_pow * (n as f64).powi(order as i32) };
            buf[n.rem_euclid(grid as i64) as usize] += c * factor;
        }
        let mut planner = FftPlanner::<f64>::new();
        planner.plan_fft_inverse(grid).process(&mut buf);
        buf.into_iter().map(|z| z.re).collect()
    }
}

/// Forward DFT coefficients f̂_n ≈ (1/L) Σ f(x_j) e^{−inx_j} of samples at x_j = 2πj/L.
pub(crate) fn dft_coefficients(samples: &[f64]) -> Vec<Complex64> {
    let l = samples.len();
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    FftPlanner::<f64>::new().plan_fft_forward(l).process(&mut buf);
    let scale = 1.0 / l as f64;
    buf.iter_mut().for_each(|z| *z *= scale);
    buf
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fft_and_direct_convolution_agree() {
        let terms: Vec<Term> = (0..1500)
            .map(|n| Term {
                freq: vec![n],
                cos: 1.0 / (1.0 + n as f64),
                sin: 0.5 / (2.0 + n as f64),
            })
            .collect();
        let p = TrigPoly::new(1, terms).unwrap();
        let s = Spectrum::from_poly(&p);
        let big = s.convolve(&s);
        assert!(s.c.len() * s.c.len() > DIRECT_LIMIT, "exercise the FFT path");
        let q = TrigPoly::new(1, p.terms()[..200].to_vec()).unwrap();
        let direct = Spectrum::from_poly(&q).convolve(&Spectrum::from_poly(&q));
        let y = 1.1;
        let qv = q.eval(&[y]);
        assert!((direct.to_poly(0.0).eval(&[y]) - qv * qv).abs() < 1e-12 * qv.abs().max(1.0));
        let x = 0.37;
        let pv = p.eval(&[x]);
        let v = big.to_poly(0.0).eval(&[x]);
        assert!((v - pv * pv).abs() < 1e-9 * pv.abs().max(1.0));
    }

    #[test]
    fn sampling_matches_direct_evaluation() {
        let p = TrigPoly::new(
            1,
            vec![
                Term { freq: vec![0], cos: 0.5, sin: 0.0 },
                Term { freq: vec![3], cos: 1.0, sin: -0.25 },
                Term { freq: vec![7], cos: 0.1, sin: 0.3 },
            ],
        )
        .unwrap();
        let s = Spectrum::from_poly(&p);
        let vals = s.sample(16, 1);
        let d = p.derivative(&[1]);
        for (j, v) in vals.iter().enumerate() {
            let x = 2.0 * std::f64::consts::PI * j as f64 / 16.0;
            assert!((v - d.eval(&[x])).abs() < 1e-12);
        }
    }
}
