use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::real::{fixed_to_f64, ExactReal};
use crate::error::{domain, Error, Result};

/// Default working precision in fractional bits.
pub const DEFAULT_PRECISION: u32 = 128;

/// A frequency vector stored as exact expressions together with fixed-point
/// values at a declared precision.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyVector {
    entries: Vec<ExactReal>,
    precision: u32,
    fixed: Vec<BigInt>,
    approx: Vec<f64>,
}

impl FrequencyVector {
    pub fn new(entries: Vec<ExactReal>, precision: u32) -> Result<Self> {
        if entries.len() < 2 {
            return domain(format!("frequency vectors need d >= 2, got {}", entries.len()));
        }
        if precision < 53 {
            return domain("working precision must be at least 53 bits");
        }
        for e in &entries {
            if let ExactReal::Float(x) = e {
                if !x.is_finite() {
                    return domain("frequency entries must be finite");
                }
            }
        }
        let fixed: Vec<BigInt> = entries.iter().map(|e| e.fixed(precision)).collect();
        let approx: Vec<f64> = fixed.iter().map(|x| fixed_to_f64(x, precision)).collect();
        if approx.iter().all(|&x| x == 0.0) && fixed.iter().all(|x| x.bits() == 0) {
            return domain("frequency vector is identically zero");
        }
        Ok(Self {
            entries,
            precision,
            fixed,
            approx,
        })
    }

    pub fn from_f64s(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| ExactReal::Float(x)).collect(), DEFAULT_PRECISION)
    }

    /// (1, (√5 − 1)/2).
    pub fn golden() -> Self {
        Self::new(vec![ExactReal::Int(1), ExactReal::GoldenConjugate], DEFAULT_PRECISION)
            .expect("golden preset is valid")
    }

    /// (1, 2^(1/d), …, 2^((d−1)/d)).
    pub fn spread(d: usize) -> Result<Self> {
        if d < 2 {
            return domain("spread preset needs d >= 2");
        }
        let entries = (0..d as u32)
            .map(|j| ExactReal::PowerOfTwo { num: j, den: d as u32 })
            .collect();
        Self::new(entries, DEFAULT_PRECISION)
    }

    /// (1, Σ_{j=1}^{terms} 10^(−j!)).
    pub fn liouville_demo(terms: u32) -> Self {
        Self::new(
            vec![ExactReal::Int(1), ExactReal::LiouvilleSum { terms }],
            DEFAULT_PRECISION,
        )
        .expect("liouville preset is valid")
    }

    /// Named presets: `golden`, `spread-<d>`, `liouville-demo`.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "golden" => Ok(Self::golden()),
            "liouville-demo" => Ok(Self::liouville_demo(4)),
            _ => match name.strip_prefix("spread-").map(str::parse::<usize>) {
                Some(Ok(d)) => Self::spread(d),
                _ => domain(format!("unknown frequency preset {name:?}")),
            },
        }
    }

    /// Parses a preset name or a comma-separated list of decimal literals.
    pub fn parse(spec: &str) -> Result<Self> {
        if spec.contains(',') {
            let entries = spec
                .split(',')
                .map(ExactReal::parse_decimal)
                .collect::<Result<Vec<_>>>()?;
            Self::new(entries, DEFAULT_PRECISION)
        } else {
            Self::preset(spec)
        }
    }

    /// Same expressions, regenerated at a different precision.
    pub fn with_precision(&self, precision: u32) -> Self {
        Self::new(self.entries.clone(), precision).expect("entries already validated")
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn entries(&self) -> &[ExactReal] {
        &self.entries
    }

    pub fn fixed(&self) -> &[BigInt] {
        &self.fixed
    }

    /// Entries rounded to doubles.
    pub fn approx(&self) -> &[f64] {
        &self.approx
    }

    pub(crate) fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: len,
            });
        }
        Ok(())
    }

    /// Exact integer combination Σ k_i ω_i in fixed point.
    pub fn dot_fixed(&self, k: &[i64]) -> Result<BigInt> {
        self.check_dim(k.len())?;
        Ok(self
            .fixed
            .iter()
            .zip(k)
            .map(|(x, &ki)| x * BigInt::from(ki))
            .sum())
    }

    /// Σ k_i ω_i at working precision, rounded to a double.
    ///
    /// A combination indistinguishable from zero at the working precision is
    /// reported as exactly 0; for rational entries this is decided exactly.
    pub fn dot(&self, k: &[i64]) -> Result<f64> {
        let s = self.dot_fixed(k)?;
        // Each fixed-point entry is within 2 units of the truth.
        let slack: i64 = 2 * k.iter().map(|x| x.abs()).sum::<i64>() + 1;
        if s.abs() <= BigInt::from(slack) {
            if let Some(exact) = self.exact_dot(k) {
                if !exact.is_zero() {
                    return Ok(exact.to_f64().unwrap_or(0.0));
                }
            }
            return Ok(0.0);
        }
        Ok(fixed_to_f64(&s, self.precision))
    }

    fn exact_dot(&self, k: &[i64]) -> Option<BigRational> {
        let mut acc = BigRational::zero();
        for (e, &ki) in self.entries.iter().zip(k) {
            if ki != 0 {
                acc += e.to_rational()? * BigRational::from_integer(ki.into());
            }
        }
        Some(acc)
    }

    /// Plain-text description of every entry.
    pub fn describe(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.to_string()).collect()
    }
}

/// Serializable snapshot of a frequency vector.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FrequencySummary {
    pub entries: Vec<String>,
    pub values: Vec<f64>,
    pub precision: u32,
}

impl From<&FrequencyVector> for FrequencySummary {
    fn from(w: &FrequencyVector) -> Self {
        Self {
            entries: w.describe(),
            values: w.approx().to_vec(),
            precision: w.precision(),
        }
    }
}

/// ⟨ω, k⟩ at the frequency vector's declared precision.
pub fn small_denominator(omega: &FrequencyVector, k: &[i64]) -> Result<f64> {
    omega.dot(k)
}
