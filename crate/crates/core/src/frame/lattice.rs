//! Exact integer and rational linear algebra on small matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub fn dot(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum()
}

pub fn norm_sq(a: &[i64]) -> i128 {
    dot(a, a)
}

pub fn gcd_all(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

/// Flips the sign so the first nonzero entry is positive.
pub fn sign_normalize(v: &mut [i64]) {
    if v.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

pub fn cross(a: &[i64], b: &[i64]) -> Vec<i64> {
    vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Basis of the integer kernel {x ∈ Z^d : A x = 0} of an integer matrix.
///
/// Column operations with unimodular transformations bring A to a lower
/// echelon form A·U = [H | 0]; the columns of U beyond the rank of A then
/// span the kernel lattice.
pub fn integer_kernel(rows: &[Vec<i64>], d: usize) -> Vec<Vec<BigInt>> {
    let mut a: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut u: Vec<Vec<BigInt>> = (0..d)
        .map(|i| (0..d).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let mut pivot_col = 0;
    for r in 0..a.len() {
        if pivot_col >= d {
            break;
        }
        // Euclid on columns pivot_col.. of row r until only column pivot_col is nonzero.
        loop {
            let nz: Vec<usize> = (pivot_col..d).filter(|&c| !a[r][c].is_zero()).collect();
            if nz.len() <= 1 {
                if let Some(&c) = nz.first() {
                    swap_cols(&mut a, &mut u, c, pivot_col);
                }
                break;
            }
            let smallest = *nz
                .iter()
                .min_by(|&&x, &&y| a[r][x].abs().cmp(&a[r][y].abs()))
                .unwrap();
            swap_cols(&mut a, &mut u, smallest, pivot_col);
            for c in pivot_col + 1..d {
                if a[r][c].is_zero() {
                    continue;
                }
                let q = a[r][c].div_floor(&a[r][pivot_col]);
                sub_col(&mut a, &mut u, c, pivot_col, &q);
            }
        }
        if !a[r][pivot_col].is_zero() {
            pivot_col += 1;
        }
    }
    (pivot_col..d)
        .map(|c| (0..d).map(|i| u[i][c].clone()).collect())
        .collect()
}

fn swap_cols(a: &mut [Vec<BigInt>], u: &mut [Vec<BigInt>], i: usize, j: usize) {
    if i == j {
        return;
    }
    for row in a.iter_mut().chain(u.iter_mut()) {
        row.swap(i, j);
    }
}

/// column[c] -= q * column[p]
fn sub_col(a: &mut [Vec<BigInt>], u: &mut [Vec<BigInt>], c: usize, p: usize, q: &BigInt) {
    for row in a.iter_mut().chain(u.iter_mut()) {
        let t = &row[p] * q;
        row[c] -= t;
    }
}

/// Exact rational Gram–Schmidt, then each vector scaled to a primitive integer vector.
pub fn orthogonalize_primitive(basis: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut ortho: Vec<Vec<BigRational>> = Vec::new();
    for b in basis {
        let mut v: Vec<BigRational> = b.iter().map(|x| BigRational::from_integer(x.clone())).collect();
        for o in &ortho {
            let num = rdot(&v, o);
            let den = rdot(o, o);
            let f = num / den;
            for (vi, oi) in v.iter_mut().zip(o) {
                *vi -= &f * oi;
            }
        }
        ortho.push(v);
    }
    ortho.iter().map(|v| clear_denominators(v)).collect()
}

fn rdot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
}

fn clear_denominators(v: &[BigRational]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return ints;
    }
    let mut out: Vec<BigInt> = ints.into_iter().map(|x| x / &g).collect();
    if out.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        out.iter_mut().for_each(|x| *x = -x.clone());
    }
    out
}

pub fn to_i64_vec(v: &[BigInt]) -> Option<Vec<i64>> {
    v.iter().map(|x| x.to_i64()).collect()
}

/// Determinant of an integer matrix by Bareiss elimination.
pub fn determinant(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    let mut a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| x.into()).collect()).collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = t / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

pub type RationalMatrix = Vec<Vec<BigRational>>;

pub fn to_rational_matrix(m: &[Vec<i64>]) -> RationalMatrix {
    m.iter()
        .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
        .collect()
}

/// Exact inverse by Gauss–Jordan; `None` when singular.
pub fn inverse(m: &RationalMatrix) -> Option<RationalMatrix> {
    let n = m.len();
    let mut a = m.clone();
    let mut inv: RationalMatrix = identity(n);
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(p, c);
        inv.swap(p, c);
        let piv = a[c][c].clone();
        for j in 0..n {
            a[c][j] = &a[c][j] / &piv;
            inv[c][j] = &inv[c][j] / &piv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for j in 0..n {
                    let t = &f * &a[c][j];
                    a[r][j] -= t;
                    let t = &f * &inv[c][j];
                    inv[r][j] -= t;
                }
            }
        }
    }
    Some(inv)
}

pub fn identity(n: usize) -> RationalMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigRational::one() } else { BigRational::zero() })
                .collect()
        })
        .collect()
}

pub fn transpose(m: &RationalMatrix) -> RationalMatrix {
    let (r, c) = (m.len(), m[0].len());
    (0..c).map(|j| (0..r).map(|i| m[i][j].clone()).collect()).collect()
}

pub fn matmul(a: &RationalMatrix, b: &RationalMatrix) -> RationalMatrix {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).fold(BigRational::zero(), |acc, l| acc + &a[i][l] * &b[l][j]))
                .collect()
        })
        .collect()
}
