//! Continued-fraction expansion.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::real::ExactReal;
use crate::error::{domain, Result};

/// Partial quotients of `x`. Rational inputs terminate exactly; irrational
/// ones are expanded from a fixed-point enclosure at `precision` bits and
/// stop once the enclosure no longer determines the next quotient.
pub fn cf_expand_exact(x: &ExactReal, n_terms: usize, precision: u32) -> Result<Vec<i64>> {
    if n_terms == 0 {
        return domain("n_terms must be positive");
    }
    if let Some(q) = x.to_rational() {
        return Ok(rational_cf(q.numer().clone(), q.denom().clone(), n_terms));
    }
    // x lies in [lo, lo + 4) / 2^precision.
    let lo = x.fixed(precision) - BigInt::from(2);
    let hi = &lo + BigInt::from(4);
    let den = BigInt::one() << precision;
    let a = rational_cf(lo, den.clone(), n_terms + 1);
    let b = rational_cf(hi, den, n_terms + 1);
    let mut out = Vec::new();
    for (p, q) in a.iter().zip(&b) {
        if p != q || out.len() == n_terms {
            break;
        }
        out.push(*p);
    }
    // The final agreed quotient of a truncated expansion may still be unreliable
    // when one side terminated; the enclosure check above keeps only shared terms.
    Ok(out)
}

/// Partial quotients of a double. The shortest decimal string that round-trips
/// to `x` is read as an exact rational, so 0.3 expands like 3/10.
pub fn cf_expand(x: f64, n_terms: usize) -> Result<Vec<i64>> {
    if !x.is_finite() {
        return domain("continued fraction of a non-finite number");
    }
    let exact = ExactReal::parse_decimal(&format!("{x:e}"))?;
    cf_expand_exact(&exact, n_terms, 128)
}

fn rational_cf(mut num: BigInt, mut den: BigInt, n_terms: usize) -> Vec<i64> {
    let mut out = Vec::with_capacity(n_terms);
    while out.len() < n_terms && !den.is_zero() {
        let (q, r) = num.div_mod_floor(&den);
        out.push(i64::try_from(q).unwrap_or(i64::MAX));
        num = den;
        den = r;
    }
    out
}

/// Convergent p/q of a list of partial quotients.
pub fn convergent(quotients: &[i64]) -> BigRational {
    let (mut p0, mut p1) = (BigInt::one(), BigInt::zero());
    let (mut q0, mut q1) = (BigInt::zero(), BigInt::one());
    for &a in quotients {
        let a = BigInt::from(a);
        let p = &a * &p0 + &p1;
        let q = &a * &q0 + &q1;
        p1 = std::mem::replace(&mut p0, p);
        q1 = std::mem::replace(&mut q0, q);
    }
    BigRational::new(p0, q0)
}
