//! Integer orthogonal frames built from a resonance vector, their exact
//! symplectic lifts, and the pushed-forward frequency.

pub mod lattice;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::diophantine::{ExactReal, FrequencyVector};
use crate::error::{domain, Error, Result};
use crate::exec::{self, ExecMode};
use lattice::RationalMatrix;

/// Rows (k, k', l_3, …, l_d) of an integer matrix with pairwise-orthogonal rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResonanceFrame {
    rows: Vec<Vec<i64>>,
}

impl ResonanceFrame {
    /// Wraps rows after checking orthogonality, primitivity of fill rows and det ≠ 0.
    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self> {
        let d = rows.len();
        if d < 2 || rows.iter().any(|r| r.len() != d) {
            return domain("a frame needs d >= 2 rows of length d");
        }
        for i in 0..d {
            for j in i + 1..d {
                if lattice::dot(&rows[i], &rows[j]) != 0 {
                    return domain(format!("rows {i} and {j} are not orthogonal"));
                }
            }
        }
        for (i, r) in rows.iter().enumerate().skip(2) {
            if lattice::gcd_all(r) != 1 {
                return domain(format!("fill row {i} is not primitive"));
            }
        }
        let frame = Self { rows };
        if frame.det().is_zero() {
            return domain("frame matrix is singular");
        }
        Ok(frame)
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn k(&self) -> &[i64] {
        &self.rows[0]
    }

    pub fn k_prime(&self) -> &[i64] {
        &self.rows[1]
    }

    pub fn fill_rows(&self) -> &[Vec<i64>] {
        &self.rows[2..]
    }

    pub fn det(&self) -> BigInt {
        lattice::determinant(&self.rows)
    }

    /// Squared Euclidean norms of the rows.
    pub fn row_norms_sq(&self) -> Vec<i128> {
        self.rows.iter().map(|r| lattice::norm_sq(r)).collect()
    }

    /// Exact check of the defining property.
    pub fn is_orthogonal(&self) -> bool {
        let d = self.dim();
        (0..d).all(|i| (i + 1..d).all(|j| lattice::dot(&self.rows[i], &self.rows[j]) == 0))
    }
}

/// Chooses k' ⟂ k with |k'| ≤ radius·|k| and large |⟨k',ω⟩|/|k'|.
///
/// For d = 2 this is the rotation (−k₂, k₁) with its first nonzero entry made
/// positive. For d ≥ 3 the candidates with |k'|_∞ ≤ ⌈radius·|k|⌉ are scanned;
/// among those whose ratio is within 5% of the best, the shortest vector wins,
/// ties broken lexicographically. Picking the shortest near-optimal vector keeps
/// |k'| comparable to |k| instead of drifting to the search boundary.
pub fn orthogonal_partner(k: &[i64], omega: &FrequencyVector, search_radius: f64) -> Result<Vec<i64>> {
    let d = k.len();
    omega.check_dim(d)?;
    if k.iter().all(|&x| x == 0) {
        return domain("resonance vector must be nonzero");
    }
    if !(search_radius > 0.0) {
        return domain("search radius must be positive");
    }
    let k_norm = (lattice::norm_sq(k) as f64).sqrt();
    let threshold = k_norm / 8.0;

    let best = if d == 2 {
        let mut p = vec![-k[1], k[0]];
        lattice::sign_normalize(&mut p);
        p
    } else {
        search_partner(k, omega, search_radius, k_norm)?
    };
    let value = omega.dot(&best)?.abs();
    if value < threshold {
        return Err(Error::PartnerQuality {
            best,
            value,
            threshold,
        });
    }
    Ok(best)
}

fn search_partner(k: &[i64], omega: &FrequencyVector, radius: f64, k_norm: f64) -> Result<Vec<i64>> {
    let d = k.len();
    let limit = (radius * k_norm).ceil() as i64;
    let max_norm_sq = (radius * k_norm) * (radius * k_norm) * (1.0 + 1e-12);
    let side = 2 * limit + 1;
    let tail = (side as u64).pow(d as u32 - 1);
    // (ratio, |k'|², k')
    let candidates: Vec<(f64, i128, Vec<i64>)> = exec::map_range(ExecMode::best(), (limit + 1) as usize, |i| {
        let mut out = Vec::new();
        let mut v = vec![0i64; d];
        v[0] = i as i64;
        for idx in 0..tail {
            let mut rem = idx;
            for slot in v.iter_mut().skip(1) {
                *slot = (rem % side as u64) as i64 - limit;
                rem /= side as u64;
            }
            if !v.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0) {
                continue;
            }
            if lattice::dot(&v, k) != 0 {
                continue;
            }
            let n2 = lattice::norm_sq(&v);
            if n2 as f64 > max_norm_sq {
                continue;
            }
            let ratio = omega.dot(&v).expect("dimension checked").abs() / (n2 as f64).sqrt();
            out.push((ratio, n2, v.clone()));
        }
        out
    })
    .into_iter()
    .flatten()
    .collect();
    let top = candidates.iter().map(|c| c.0).fold(f64::NEG_INFINITY, f64::max);
    candidates
        .into_iter()
        .filter(|c| c.0 >= 0.95 * top)
        .min_by(|a, b| a.1.cmp(&b.1).then_with(|| a.2.cmp(&b.2)))
        .map(|c| c.2)
        .ok_or_else(|| Error::Domain("no orthogonal candidates in search box".into()))
}

/// Completes (k, k') to a full orthogonal integer frame. For d = 3 the fill
/// row is the reduced cross product; otherwise see [`complete_frame_general`].
pub fn complete_frame(k: &[i64], k_prime: &[i64]) -> Result<ResonanceFrame> {
    check_pair(k, k_prime)?;
    if k.len() == 3 {
        let mut c = lattice::cross(k, k_prime);
        let g = lattice::gcd_all(&c);
        c.iter_mut().for_each(|x| *x /= g);
        lattice::sign_normalize(&mut c);
        return ResonanceFrame::from_rows(vec![k.to_vec(), k_prime.to_vec(), c]);
    }
    complete_frame_general(k, k_prime)
}

/// Fill rows from an integer kernel basis, exact Gram–Schmidt, and
/// reduction to primitive vectors. Works for every d ≥ 2.
pub fn complete_frame_general(k: &[i64], k_prime: &[i64]) -> Result<ResonanceFrame> {
    check_pair(k, k_prime)?;
    let d = k.len();
    let mut rows = vec![k.to_vec(), k_prime.to_vec()];
    if d > 2 {
        let kernel = lattice::integer_kernel(&rows, d);
        if kernel.len() != d - 2 {
            return domain("resonance vectors are linearly dependent");
        }
        for v in lattice::orthogonalize_primitive(&kernel) {
            rows.push(
                lattice::to_i64_vec(&v)
                    .ok_or_else(|| Error::Domain("fill row does not fit in 64 bits".into()))?,
            );
        }
    }
    ResonanceFrame::from_rows(rows)
}

fn check_pair(k: &[i64], k_prime: &[i64]) -> Result<()> {
    if k.len() != k_prime.len() {
        return Err(Error::Dimension {
            expected: k.len(),
            got: k_prime.len(),
        });
    }
    if k.len() < 2 {
        return domain("frames need d >= 2");
    }
    if k.iter().all(|&x| x == 0) || k_prime.iter().all(|&x| x == 0) {
        return domain("frame rows must be nonzero");
    }
    if lattice::dot(k, k_prime) != 0 {
        return domain("k and k' are not orthogonal");
    }
    Ok(())
}

/// The block map (x, y) ↦ (Kx, K^{-T}y) with exact rational entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticLift {
    pub k: RationalMatrix,
    pub k_inv_t: RationalMatrix,
}

impl SymplecticLift {
    pub fn dim(&self) -> usize {
        self.k.len()
    }

    /// The 2d × 2d matrix Φ = blockdiag(K, K^{-T}).
    pub fn phi(&self) -> RationalMatrix {
        let d = self.dim();
        let mut m = vec![vec![BigRational::zero(); 2 * d]; 2 * d];
        for i in 0..d {
            for j in 0..d {
                m[i][j] = self.k[i][j].clone();
                m[d + i][d + j] = self.k_inv_t[i][j].clone();
            }
        }
        m
    }

    /// Exact check of Φ^T J Φ = J.
    pub fn is_symplectic(&self) -> bool {
        let d = self.dim();
        let j = standard_symplectic(d);
        let phi = self.phi();
        lattice::matmul(&lattice::matmul(&lattice::transpose(&phi), &j), &phi) == j
    }

    /// Image of a phase point under Φ, in doubles.
    pub fn apply(&self, x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mul = |m: &RationalMatrix, v: &[f64]| -> Vec<f64> {
            m.iter()
                .map(|row| row.iter().zip(v).map(|(a, b)| a.to_f64().unwrap_or(f64::NAN) * b).sum())
                .collect()
        };
        (mul(&self.k, x), mul(&self.k_inv_t, y))
    }
}

/// J = [[0, I], [−I, 0]].
pub fn standard_symplectic(d: usize) -> RationalMatrix {
    let mut j = vec![vec![BigRational::zero(); 2 * d]; 2 * d];
    for i in 0..d {
        j[i][d + i] = BigRational::from_integer(1.into());
        j[d + i][i] = BigRational::from_integer((-1).into());
    }
    j
}

/// Builds the lift and verifies it exactly before returning.
pub fn symplectic_lift(frame: &ResonanceFrame) -> Result<SymplecticLift> {
    let k = lattice::to_rational_matrix(frame.rows());
    let inv = lattice::inverse(&k).ok_or_else(|| Error::Domain("singular frame".into()))?;
    let lift = SymplecticLift {
        k_inv_t: lattice::transpose(&inv),
        k,
    };
    if !lift.is_symplectic() {
        return domain("symplectic identity failed");
    }
    Ok(lift)
}

/// Limits for calling a pushed-forward frequency "in regime".
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeThresholds {
    pub bound1_max: f64,
    pub ratio2_min: f64,
    pub ratio2_max: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        Self {
            bound1_max: 10.0,
            ratio2_min: 0.1,
            ratio2_max: 10.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PushforwardReport {
    pub omega_new: FrequencyVector,
    /// |ω'₁|·|k|^(d+τ−1)
    pub bound1: f64,
    /// |ω'₂|/|k|
    pub ratio2: f64,
    pub in_regime: bool,
}

pub fn pushforward(frame: &ResonanceFrame, omega: &FrequencyVector, tau: f64) -> Result<PushforwardReport> {
    pushforward_with(frame, omega, tau, RegimeThresholds::default())
}

pub fn pushforward_with(
    frame: &ResonanceFrame,
    omega: &FrequencyVector,
    tau: f64,
    limits: RegimeThresholds,
) -> Result<PushforwardReport> {
    let d = frame.dim();
    omega.check_dim(d)?;
    let entries: Vec<ExactReal> = frame
        .rows()
        .iter()
        .map(|row| {
            row.iter()
                .zip(omega.entries())
                .filter(|(&c, _)| c != 0)
                .map(|(&c, w)| ExactReal::Int(c) * w.clone())
                .reduce(|a, b| a + b)
                .unwrap_or(ExactReal::Int(0))
        })
        .collect();
    let omega_new = FrequencyVector::new(entries, omega.precision())?;
    let k_norm = (lattice::norm_sq(frame.k()) as f64).sqrt();
    let w = omega_new.approx();
    let bound1 = w[0].abs() * k_norm.powf(d as f64 + tau - 1.0);
    let ratio2 = w[1].abs() / k_norm;
    let in_regime = bound1 <= limits.bound1_max && ratio2 >= limits.ratio2_min && ratio2 <= limits.ratio2_max;
    Ok(PushforwardReport {
        omega_new,
        bound1,
        ratio2,
        in_regime,
    })
}

/// Plain serializable record of a frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    pub dim: usize,
    pub rows: Vec<Vec<i64>>,
    pub det: String,
    /// Entries of K^{-T} as (numerator, denominator) pairs.
    pub k_inv_t: Vec<Vec<(String, String)>>,
}

impl FrameRecord {
    pub fn new(frame: &ResonanceFrame, lift: &SymplecticLift) -> Self {
        Self {
            dim: frame.dim(),
            rows: frame.rows().to_vec(),
            det: frame.det().to_string(),
            k_inv_t: lift
                .k_inv_t
                .iter()
                .map(|r| r.iter().map(|q| (q.numer().to_string(), q.denom().to_string())).collect())
                .collect(),
        }
    }

    pub fn to_frame(&self) -> Result<ResonanceFrame> {
        ResonanceFrame::from_rows(self.rows.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gamma() -> f64 {
        (5f64.sqrt() - 1.0) / 2.0
    }

    #[test]
    fn planar_partner_is_rotation() {
        let w = FrequencyVector::golden();
        assert_eq!(orthogonal_partner(&[3, -5], &w, 2.0).unwrap(), vec![5, 3]);
        assert_eq!(orthogonal_partner(&[-3, 5], &w, 2.0).unwrap(), vec![5, 3]);
        let p = orthogonal_partner(&[1, 0], &w, 2.0).unwrap();
        assert_eq!(p, vec![0, 1]);
        assert!((w.dot(&p).unwrap() - gamma()).abs() < 1e-15);
    }

    #[test]
    fn spatial_partner_prefers_short_near_optimal_vector() {
        let g = ExactReal::GoldenConjugate;
        let w = FrequencyVector::new(vec![ExactReal::Int(1), g.clone(), g.clone() * g], 128).unwrap();
        let p = orthogonal_partner(&[1, 1, -2], &w, 2.0).unwrap();
        assert_eq!(p, vec![1, 1, 1]);
        assert!((w.dot(&p).unwrap() - 2.0).abs() < 1e-30);
    }

    #[test]
    fn partner_quality_failure_reports_best() {
        // ω almost parallel to k leaves nothing useful in the orthogonal complement.
        let w = FrequencyVector::from_f64s(&[1.0, 1e-3]).unwrap();
        match orthogonal_partner(&[1, 0], &w, 2.0) {
            Err(Error::PartnerQuality { best, .. }) => assert_eq!(best, vec![0, 1]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn frame_completion_examples() {
        let f = complete_frame(&[-3, 5], &[5, 3]).unwrap();
        assert_eq!(f.rows(), &[vec![-3, 5], vec![5, 3]]);
        assert_eq!(f.det(), BigInt::from(-34));
        let f = complete_frame(&[1, 1, -2], &[1, 1, 1]).unwrap();
        assert_eq!(f.fill_rows(), &[vec![1, -1, 0]]);
        assert!(complete_frame(&[1, 2], &[1, 1]).is_err());
    }

    #[test]
    fn general_route_agrees_with_cross_product() {
        let a = complete_frame(&[2, -1, 3], &[1, 2, 0]).unwrap();
        let b = complete_frame_general(&[2, -1, 3], &[1, 2, 0]).unwrap();
        let (x, y) = (&a.fill_rows()[0], &b.fill_rows()[0]);
        assert!(x == y || x.iter().zip(y).all(|(p, q)| *p == -*q));
    }

    #[test]
    fn lift_examples() {
        let id = ResonanceFrame::from_rows(vec![vec![1, 0], vec![0, 1]]).unwrap();
        let l = symplectic_lift(&id).unwrap();
        assert_eq!(l.phi(), lattice::identity(4));

        let f = ResonanceFrame::from_rows(vec![vec![1, 1], vec![1, -1]]).unwrap();
        let l = symplectic_lift(&f).unwrap();
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(l.k_inv_t, vec![vec![half.clone(), half.clone()], vec![half.clone(), -half]]);

        let f = ResonanceFrame::from_rows(vec![vec![-3, 5], vec![5, 3]]).unwrap();
        assert!(symplectic_lift(&f).unwrap().is_symplectic());
    }

    #[test]
    fn pushforward_golden_frame() {
        let f = complete_frame(&[-3, 5], &[5, 3]).unwrap();
        let r = pushforward(&f, &FrequencyVector::golden(), 0.0).unwrap();
        let w = r.omega_new.approx();
        assert!((w[0] - 0.0901699437494742).abs() < 1e-15);
        assert!((w[1] - 6.854101966249685).abs() < 1e-14);
        assert!((r.ratio2 - 1.1755).abs() < 1e-4);
        assert!(r.in_regime);
    }

    #[test]
    fn frame_record_roundtrip() {
        let f = complete_frame(&[1, 1, -2], &[1, 1, 1]).unwrap();
        let rec = FrameRecord::new(&f, &symplectic_lift(&f).unwrap());
        let text = serde_json::to_string(&rec).unwrap();
        let back: FrameRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_frame().unwrap(), f);
        assert_eq!(back.det, "6");
    }
}
