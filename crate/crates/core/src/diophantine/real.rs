//! Exact real numbers given by closed-form expressions, evaluated to any
//! requested number of fractional bits.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

use crate::error::{domain, Result};

/// Guard bits carried through intermediate evaluation.
const GUARD: u32 = 64;

/// A real number described exactly. Evaluation to fixed point is exact up to
/// a couple of units in the last requested bit.
#[derive(Debug, Clone, PartialEq)]
pub enum ExactReal {
    Int(i64),
    Rational(BigRational),
    /// The exact binary value of a double.
    Float(f64),
    /// (√5 − 1)/2.
    GoldenConjugate,
    /// 2^(num/den).
    PowerOfTwo { num: u32, den: u32 },
    /// Σ_{j=1}^{terms} 10^(−j!).
    LiouvilleSum { terms: u32 },
    Add(Box<ExactReal>, Box<ExactReal>),
    Mul(Box<ExactReal>, Box<ExactReal>),
    Neg(Box<ExactReal>),
}

impl ExactReal {
    pub fn rational(num: i64, den: i64) -> Self {
        ExactReal::Rational(BigRational::new(num.into(), den.into()))
    }

    /// Parses a decimal literal such as `-0.125` or `3e-4` into an exact rational.
    pub fn parse_decimal(s: &str) -> Result<Self> {
        let s = s.trim();
        let (mantissa, exp) = match s.find(['e', 'E']) {
            Some(i) => (
                &s[..i],
                s[i + 1..]
                    .parse::<i32>()
                    .map_err(|_| crate::Error::Domain(format!("bad exponent in {s:?}")))?,
            ),
            None => (s, 0),
        };
        let (neg, digits) = match mantissa.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int_part, frac_part) = match digits.find('.') {
            Some(i) => (&digits[..i], &digits[i + 1..]),
            None => (digits, ""),
        };
        if int_part.is_empty() && frac_part.is_empty()
            || !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit())
        {
            return domain(format!("not a decimal number: {s:?}"));
        }
        let all: String = format!("{int_part}{frac_part}");
        let mut num: BigInt = all.parse().unwrap_or_else(|_| BigInt::zero());
        if neg {
            num = -num;
        }
        let scale = exp - frac_part.len() as i32;
        let ten = BigInt::from(10);
        let value = if scale >= 0 {
            BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
        } else {
            BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
        };
        Ok(ExactReal::Rational(value))
    }

    /// True when the value is a known rational (so continued fractions terminate).
    pub fn is_rational(&self) -> bool {
        match self {
            ExactReal::Int(_) | ExactReal::Rational(_) | ExactReal::Float(_) => true,
            ExactReal::LiouvilleSum { .. } => true,
            ExactReal::PowerOfTwo { num, den } => num % den == 0,
            ExactReal::GoldenConjugate => false,
            ExactReal::Add(a, b) | ExactReal::Mul(a, b) => a.is_rational() && b.is_rational(),
            ExactReal::Neg(a) => a.is_rational(),
        }
    }

    /// Exact rational value, when the expression is rational.
    pub fn to_rational(&self) -> Option<BigRational> {
        Some(match self {
            ExactReal::Int(n) => BigRational::from_integer((*n).into()),
            ExactReal::Rational(q) => q.clone(),
            ExactReal::Float(x) => BigRational::from_float(*x)?,
            ExactReal::LiouvilleSum { terms } => {
                let mut acc = BigRational::zero();
                let mut fact = 1usize;
                for j in 1..=*terms as usize {
                    fact *= j;
                    acc += BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(10), fact));
                }
                acc
            }
            ExactReal::PowerOfTwo { num, den } if num % den == 0 => {
                BigRational::from_integer(BigInt::one() << (num / den))
            }
            ExactReal::Add(a, b) => a.to_rational()? + b.to_rational()?,
            ExactReal::Mul(a, b) => a.to_rational()? * b.to_rational()?,
            ExactReal::Neg(a) => -a.to_rational()?,
            _ => return None,
        })
    }

    /// floor(x · 2^bits), accurate to within a few units.
    pub fn fixed(&self, bits: u32) -> BigInt {
        self.fixed_raw(bits + GUARD) >> GUARD
    }

    fn fixed_raw(&self, p: u32) -> BigInt {
        match self {
            ExactReal::Int(n) => BigInt::from(*n) << p,
            ExactReal::Rational(q) => (q.numer() << p).div_floor(q.denom()),
            ExactReal::Float(x) => {
                let q = BigRational::from_float(*x).unwrap_or_else(BigRational::zero);
                (q.numer() << p).div_floor(q.denom())
            }
            ExactReal::GoldenConjugate => {
                let five = BigInt::from(5) << (2 * p);
                (five.sqrt() - (BigInt::one() << p)) >> 1
            }
            ExactReal::PowerOfTwo { num, den } => {
                let radicand = BigInt::one() << (*num + den * p);
                radicand.nth_root(*den)
            }
            ExactReal::LiouvilleSum { .. } => {
                let q = self.to_rational().expect("liouville sums are rational");
                (q.numer() << p).div_floor(q.denom())
            }
            ExactReal::Add(a, b) => a.fixed_raw(p) + b.fixed_raw(p),
            ExactReal::Mul(a, b) => (a.fixed_raw(p) * b.fixed_raw(p)) >> p,
            ExactReal::Neg(a) => -a.fixed_raw(p),
        }
    }

    /// Nearest double (to within an ulp).
    pub fn to_f64(&self) -> f64 {
        match self {
            ExactReal::Int(n) => *n as f64,
            ExactReal::Float(x) => *x,
            _ => fixed_to_f64(&self.fixed(128), 128),
        }
    }
}

impl fmt::Display for ExactReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactReal::Int(n) => write!(f, "{n}"),
            ExactReal::Rational(q) => write!(f, "{q}"),
            ExactReal::Float(x) => write!(f, "{x:?}"),
            ExactReal::GoldenConjugate => write!(f, "(sqrt(5)-1)/2"),
            ExactReal::PowerOfTwo { num, den } => write!(f, "2^({num}/{den})"),
            ExactReal::LiouvilleSum { terms } => write!(f, "sum_{{j=1..{terms}}} 10^(-j!)"),
            ExactReal::Add(a, b) => write!(f, "({a} + {b})"),
            ExactReal::Mul(a, b) => write!(f, "({a} * {b})"),
            ExactReal::Neg(a) => write!(f, "-({a})"),
        }
    }
}

impl std::ops::Add for ExactReal {
    type Output = ExactReal;
    fn add(self, rhs: Self) -> Self {
        ExactReal::Add(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Mul for ExactReal {
    type Output = ExactReal;
    fn mul(self, rhs: Self) -> Self {
        ExactReal::Mul(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Neg for ExactReal {
    type Output = ExactReal;
    fn neg(self) -> Self {
        ExactReal::Neg(Box::new(self))
    }
}

/// Converts a fixed-point integer with `bits` fractional bits to the nearest double.
pub fn fixed_to_f64(x: &BigInt, bits: u32) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    // Keep 64 significant bits before converting so huge integers do not overflow.
    let len = x.bits() as i64;
    let shift = (len - 64).max(0);
    let head = (x.abs() >> shift as usize).to_f64().unwrap_or(f64::INFINITY);
    let value = head * 2f64.powi((shift - bits as i64) as i32);
    if x.sign() == Sign::Minus {
        -value
    } else {
        value
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_conjugate_matches_double() {
        let g = ExactReal::GoldenConjugate.to_f64();
        assert!((g - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-16);
    }

    #[test]
    fn power_of_two_roots() {
        let r = ExactReal::PowerOfTwo { num: 1, den: 2 }.to_f64();
        assert!((r - 2f64.sqrt()).abs() < 1e-16);
        let c = ExactReal::PowerOfTwo { num: 2, den: 3 }.to_f64();
        assert!((c - 2f64.powf(2.0 / 3.0)).abs() < 4e-16);
    }

    #[test]
    fn decimal_parsing_is_exact() {
        let x = ExactReal::parse_decimal("0.3").unwrap();
        assert_eq!(x.to_rational().unwrap(), BigRational::new(3.into(), 10.into()));
        let y = ExactReal::parse_decimal("-1.5e2").unwrap();
        assert_eq!(y.to_rational().unwrap(), BigRational::from_integer((-150).into()));
        assert!(ExactReal::parse_decimal("abc").is_err());
    }

    #[test]
    fn golden_identity_holds_in_fixed_point() {
        // g^2 + g - 1 = 0
        let g = ExactReal::GoldenConjugate;
        let e = g.clone() * g.clone() + g + ExactReal::Int(-1);
        assert!(e.fixed(200).abs() < BigInt::from(16));
    }
}
