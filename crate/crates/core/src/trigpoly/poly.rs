use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::spectrum::Spectrum;
use crate::error::{domain, Error, Result};

/// One term `cos·cos⟨n,x⟩ + sin·sin⟨n,x⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub freq: Vec<i64>,
    pub cos: f64,
    pub sin: f64,
}

/// A real trigonometric polynomial in `dim` variables.
///
/// Terms are kept in canonical form: each frequency is the representative of
/// ±n whose first nonzero entry is positive (or the zero vector), frequencies
/// are unique and sorted, and the zero frequency carries no sine part.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    dim: usize,
    terms: Vec<Term>,
}

fn is_canonical(freq: &[i64]) -> bool {
    freq.iter().find(|&&x| x != 0).map_or(true, |&x| x > 0)
}

impl TrigPoly {
    /// Builds a polynomial, merging ±n pairs and repeated frequencies.
    pub fn new(dim: usize, terms: Vec<Term>) -> Result<Self> {
        if dim == 0 {
            return domain("trigonometric polynomials need at least one variable");
        }
        let mut map: BTreeMap<Vec<i64>, (f64, f64)> = BTreeMap::new();
        for t in terms {
            if t.freq.len() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    got: t.freq.len(),
                });
            }
            if !t.cos.is_finite() || !t.sin.is_finite() {
                return domain("non-finite coefficient");
            }
            let (freq, s) = if is_canonical(&t.freq) {
                (t.freq, t.sin)
            } else {
                (t.freq.iter().map(|x| -x).collect(), -t.sin)
            };
            let e = map.entry(freq).or_insert((0.0, 0.0));
            e.0 += t.cos;
            e.1 += s;
        }
        let terms = map
            .into_iter()
            .map(|(freq, (c, s))| {
                let s = if freq.iter().all(|&x| x == 0) { 0.0 } else { s };
                Term { freq, cos: c, sin: s }
            })
            .collect();
        Ok(Self { dim, terms })
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim, terms: Vec::new() }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Self::new(
            dim,
            vec![Term {
                freq: vec![0; dim],
                cos: c,
                sin: 0.0,
            }],
        )
        .expect("valid constant")
    }

    /// amplitude·cos⟨n,x⟩.
    pub fn cosine(freq: Vec<i64>, amplitude: f64) -> Self {
        let dim = freq.len();
        Self::new(
            dim,
            vec![Term {
                freq,
                cos: amplitude,
                sin: 0.0,
            }],
        )
        .expect("valid cosine")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn active(&self) -> impl Iterator<Item = &Term> {
        self.terms.iter().filter(|t| t.cos != 0.0 || t.sin != 0.0)
    }

    /// Exact square of the degree: max |n|² over terms with a nonzero coefficient.
    pub fn degree_sq(&self) -> i128 {
        self.active()
            .map(|t| t.freq.iter().map(|&x| x as i128 * x as i128).sum())
            .max()
            .unwrap_or(0)
    }

    /// Max Euclidean norm of the frequencies present.
    pub fn degree(&self) -> f64 {
        (self.degree_sq() as f64).sqrt()
    }

    /// Largest |n_i| over active terms (the degree of a 1-D polynomial).
    pub fn max_abs_freq(&self) -> i64 {
        self.active()
            .flat_map(|t| t.freq.iter().map(|x| x.abs()))
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        self.terms
            .iter()
            .map(|t| {
                let th: f64 = t.freq.iter().zip(x).map(|(&n, &xi)| n as f64 * xi).sum();
                let (s, c) = th.sin_cos();
                t.cos * c + t.sin * s
            })
            .sum()
    }

    /// Exact partial derivative ∂^α.
    pub fn derivative(&self, alpha: &[u32]) -> TrigPoly {
        assert_eq!(alpha.len(), self.dim);
        let order: u32 = alpha.iter().sum();
        let terms = self
            .terms
            .iter()
            .filter_map(|t| {
                let factor: f64 = t
                    .freq
                    .iter()
                    .zip(alpha)
                    .map(|(&n, &a)| (n as f64).powi(a as i32))
                    .product();
                if factor == 0.0 {
                    return None;
                }
                let (c, s) = rotate_quarter(t.cos, t.sin, order);
                Some(Term {
                    freq: t.freq.clone(),
                    cos: c * factor,
                    sin: s * factor,
                })
            })
            .collect();
        TrigPoly {
            dim: self.dim,
            terms,
        }
    }

    pub fn scale(&self, a: f64) -> TrigPoly {
        TrigPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    freq: t.freq.clone(),
                    cos: a * t.cos,
                    sin: a * t.sin,
                })
                .collect(),
        }
    }

    pub fn add(&self, other: &TrigPoly) -> Result<TrigPoly> {
        if other.dim != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: other.dim,
            });
        }
        TrigPoly::new(self.dim, self.terms.iter().chain(&other.terms).cloned().collect())
    }

    /// a·self + b·other.
    pub fn combine(&self, a: f64, other: &TrigPoly, b: f64) -> Result<TrigPoly> {
        self.scale(a).add(&other.scale(b))
    }

    /// Termwise product, expanded exactly (up to rounding of the coefficients).
    pub fn mul(&self, other: &TrigPoly) -> Result<TrigPoly> {
        if other.dim != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: other.dim,
            });
        }
        if self.dim == 1 {
            let a = Spectrum::from_poly(self);
            let b = Spectrum::from_poly(other);
            return Ok(a.convolve(&b).to_poly(0.0));
        }
        let mut out = Vec::with_capacity(2 * self.len() * other.len());
        for p in &self.terms {
            for q in &other.terms {
                let plus: Vec<i64> = p.freq.iter().zip(&q.freq).map(|(a, b)| a + b).collect();
                let minus: Vec<i64> = p.freq.iter().zip(&q.freq).map(|(a, b)| a - b).collect();
                // (a cos P + b sin P)(c cos Q + d sin Q)
                let (a, b, c, d) = (p.cos, p.sin, q.cos, q.sin);
                out.push(Term {
                    freq: plus,
                    cos: 0.5 * (a * c - b * d),
                    sin: 0.5 * (a * d + b * c),
                });
                out.push(Term {
                    freq: minus,
                    cos: 0.5 * (a * c + b * d),
                    sin: 0.5 * (b * c - a * d),
                });
            }
        }
        TrigPoly::new(self.dim, out)
    }

    /// Substitutes q_j = ⟨rows_j, x⟩: the frequency n becomes Σ n_j·rows_j.
    /// Terms landing on the same frequency are summed.
    pub fn compose_linear(&self, rows: &[Vec<i64>]) -> Result<TrigPoly> {
        if rows.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: rows.len(),
            });
        }
        let out_dim = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != out_dim) {
            return domain("substitution rows must have equal length");
        }
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut freq = vec![0i64; out_dim];
                for (&n, row) in t.freq.iter().zip(rows) {
                    for (f, &r) in freq.iter_mut().zip(row) {
                        *f += n * r;
                    }
                }
                Term {
                    freq,
                    cos: t.cos,
                    sin: t.sin,
                }
            })
            .collect();
        TrigPoly::new(out_dim, terms)
    }

    /// 1-D polynomial x ↦ p(x − shift).
    pub fn shifted(&self, shift: f64) -> TrigPoly {
        assert_eq!(self.dim, 1);
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let (s, c) = (t.freq[0] as f64 * shift).sin_cos();
                // cos(n(x−h)) = cos nx cos nh + sin nx sin nh
                // sin(n(x−h)) = sin nx cos nh − cos nx sin nh
                Term {
                    freq: t.freq.clone(),
                    cos: t.cos * c - t.sin * s,
                    sin: t.cos * s + t.sin * c,
                }
            })
            .collect();
        TrigPoly { dim: 1, terms }
    }

    /// 1-D polynomial x ↦ p(x − π), exact: coefficients pick up (−1)^n.
    pub fn shifted_by_pi(&self) -> TrigPoly {
        assert_eq!(self.dim, 1);
        self.map_terms(|t| {
            let sign = if t.freq[0] % 2 == 0 { 1.0 } else { -1.0 };
            (sign * t.cos, sign * t.sin)
        })
    }

    fn map_terms(&self, f: impl Fn(&Term) -> (f64, f64)) -> TrigPoly {
        TrigPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|t| {
                    let (c, s) = f(t);
                    Term {
                        freq: t.freq.clone(),
                        cos: c,
                        sin: s,
                    }
                })
                .collect(),
        }
    }

    /// Drops terms whose amplitude is at most `tol`.
    pub fn pruned(&self, tol: f64) -> TrigPoly {
        TrigPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|t| t.cos.hypot(t.sin) > tol)
                .cloned()
                .collect(),
        }
    }

    /// Complex coefficient c_n of e^{i n x} for a canonical term.
    pub(crate) fn complex_coeffs(t: &Term) -> (Complex64, Complex64) {
        if t.freq.iter().all(|&x| x == 0) {
            (Complex64::new(t.cos, 0.0), Complex64::new(0.0, 0.0))
        } else {
            (
                Complex64::new(0.5 * t.cos, -0.5 * t.sin),
                Complex64::new(0.5 * t.cos, 0.5 * t.sin),
            )
        }
    }
}

/// Coefficients of the `order`-th θ-derivative of c·cosθ + s·sinθ.
pub(crate) fn rotate_quarter(c: f64, s: f64, order: u32) -> (f64, f64) {
    match order % 4 {
        0 => (c, s),
        1 => (s, -c),
        2 => (-c, -s),
        _ => (-s, c),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(freq: Vec<i64>, cos: f64, sin: f64) -> Term {
        Term { freq, cos, sin }
    }

    #[test]
    fn canonical_merging() {
        let p = TrigPoly::new(1, vec![t(vec![-2], 1.0, 1.0), t(vec![2], 1.0, 1.0), t(vec![0], 1.0, 5.0)]).unwrap();
        assert_eq!(p.terms(), &[t(vec![0], 1.0, 0.0), t(vec![2], 2.0, 0.0)]);
        assert_eq!(p.degree(), 2.0);
    }

    #[test]
    fn derivative_of_cosine() {
        let p = TrigPoly::cosine(vec![3], 2.0);
        let d = p.derivative(&[1]);
        for &x in &[0.1, 0.7, 2.0] {
            assert!((d.eval(&[x]) + 6.0 * (3.0 * x).sin()).abs() < 1e-13);
        }
    }

    #[test]
    fn products_match_pointwise() {
        let a = TrigPoly::new(2, vec![t(vec![1, 2], 0.5, -1.0), t(vec![0, 1], 1.0, 0.25)]).unwrap();
        let b = TrigPoly::new(2, vec![t(vec![2, -1], 0.3, 0.2), t(vec![0, 0], 1.5, 0.0)]).unwrap();
        let p = a.mul(&b).unwrap();
        for x in [[0.3, -1.2], [2.0, 0.5], [-0.7, 3.0]] {
            assert!((p.eval(&x) - a.eval(&x) * b.eval(&x)).abs() < 1e-13);
        }
        let a1 = TrigPoly::new(1, vec![t(vec![1], 0.5, -1.0), t(vec![3], 1.0, 0.25)]).unwrap();
        let b1 = TrigPoly::new(1, vec![t(vec![2], 0.3, 0.2), t(vec![0], 1.5, 0.0)]).unwrap();
        let p1 = a1.mul(&b1).unwrap();
        for x in [0.3, 2.0, -0.7] {
            assert!((p1.eval(&[x]) - a1.eval(&[x]) * b1.eval(&[x])).abs() < 1e-13);
        }
    }

    #[test]
    fn shifts_agree() {
        let p = TrigPoly::new(1, vec![t(vec![1], 0.5, -1.0), t(vec![4], 1.0, 0.25)]).unwrap();
        let a = p.shifted_by_pi();
        let b = p.shifted(std::f64::consts::PI);
        for x in [0.1, 1.3, -2.2] {
            assert!((a.eval(&[x]) - p.eval(&[x - std::f64::consts::PI])).abs() < 1e-13);
            assert!((a.eval(&[x]) - b.eval(&[x])).abs() < 1e-13);
        }
    }

    #[test]
    fn linear_substitution() {
        let p = TrigPoly::new(2, vec![t(vec![1, 2], 0.5, -1.0), t(vec![2, -1], 0.3, 0.2)]).unwrap();
        let rows = vec![vec![-3, 5], vec![5, 3]];
        let q = p.compose_linear(&rows).unwrap();
        for x in [[0.3, -1.2], [2.0, 0.5]] {
            let q1 = -3.0 * x[0] + 5.0 * x[1];
            let q2 = 5.0 * x[0] + 3.0 * x[1];
            assert!((q.eval(&x) - p.eval(&[q1, q2])).abs() < 1e-12);
        }
    }
}
