//! Exact rational and integer linear algebra at desk scale.
//!
//! Dense Gaussian elimination over `BigRational`, primitive integer vectors,
//! and an integer kernel via column reduction. No pivoting heuristics are
//! needed: everything is exact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type RatVec = Vec<BigRational>;
pub type RatMat = Vec<Vec<BigRational>>;
pub type IntVec = Vec<BigInt>;
pub type IntMat = Vec<Vec<BigInt>>;

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn int_to_rat(v: &[BigInt]) -> RatVec {
    v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

pub fn dot_int(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_rat(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_int_rat(a: &[BigInt], b: &[BigRational]) -> BigRational {
    a.iter()
        .zip(b)
        .map(|(x, y)| BigRational::from_integer(x.clone()) * y)
        .sum()
}

/// Row-echelon form in place; returns pivot column indices.
fn echelon(m: &mut RatMat) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return vec![];
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for j in c..cols {
            let t = &m[r][j] * &inv;
            m[r][j] = t;
        }
        let pivot_row = m[r].clone();
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let factor = m[i][c].clone();
                for j in c..cols {
                    let t = &m[i][j] - &factor * &pivot_row[j];
                    m[i][j] = t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &RatMat) -> usize {
    let mut work = m.clone();
    echelon(&mut work).len()
}

pub fn rank_int(m: &[IntVec]) -> usize {
    rank(&m.iter().map(|row| int_to_rat(row)).collect())
}

/// Basis of the right null space `{x : M x = 0}`.
pub fn nullspace(m: &RatMat) -> Vec<RatVec> {
    if m.is_empty() {
        return vec![];
    }
    let cols = m[0].len();
    let mut work = m.clone();
    let pivots = echelon(&mut work);
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    let free: Vec<usize> = (0..cols).filter(|c| !pivot_set.contains(c)).collect();
    let mut basis = Vec::new();
    for &fc in &free {
        let mut v = vec![BigRational::zero(); cols];
        v[fc] = BigRational::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -work[r][fc].clone();
        }
        basis.push(v);
    }
    basis
}

/// Solves the square system `A x = b`; `None` if `A` is singular.
pub fn solve_square(a: &RatMat, b: &RatVec) -> Option<RatVec> {
    let n = a.len();
    assert!(a.iter().all(|r| r.len() == n) && b.len() == n);
    let mut aug: RatMat = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = echelon(&mut aug);
    if pivots.len() != n || pivots.iter().any(|&c| c >= n) {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n].clone()).collect())
}

/// Solves a general (possibly rectangular) system `A x = b` exactly.
/// Returns `None` when inconsistent; otherwise one particular solution.
pub fn solve_general(a: &RatMat, b: &RatVec) -> Option<RatVec> {
    if a.is_empty() {
        return if b.iter().all(|x| x.is_zero()) { Some(vec![]) } else { None };
    }
    let cols = a[0].len();
    let mut aug: RatMat = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = echelon(&mut aug);
    if pivots.iter().any(|&c| c == cols) {
        return None; // pivot in the augmented column
    }
    let mut x = vec![BigRational::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][cols].clone();
    }
    Some(x)
}

pub fn det(a: &RatMat) -> BigRational {
    let n = a.len();
    assert!(a.iter().all(|r| r.len() == n));
    let mut m = a.clone();
    let mut result = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            m.swap(c, p);
            result = -result;
        }
        result *= m[c][c].clone();
        let inv = m[c][c].recip();
        let pivot_row = m[c].clone();
        for i in (c + 1)..n {
            if m[i][c].is_zero() {
                continue;
            }
            let factor = &m[i][c] * &inv;
            for j in c..n {
                let t = &m[i][j] - &factor * &pivot_row[j];
                m[i][j] = t;
            }
        }
    }
    result
}

pub fn det_int(a: &[IntVec]) -> BigInt {
    let d = det(&a.iter().map(|r| int_to_rat(r)).collect());
    debug_assert!(d.is_integer());
    d.to_integer()
}

pub fn inverse(a: &RatMat) -> Option<RatMat> {
    let n = a.len();
    let mut aug: RatMat = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            for j in 0..n {
                r.push(if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                });
            }
            r
        })
        .collect();
    let pivots = echelon(&mut aug);
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &c)| i != c) {
        return None;
    }
    Some(
        aug.into_iter()
            .map(|row| row[n..].to_vec())
            .collect(),
    )
}

/// gcd of the absolute values of the entries (0 for the zero vector).
pub fn gcd_vec(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x))
}

/// Scales an integer vector to a primitive one (gcd 1), preserving direction.
pub fn primitivize_int(v: &[BigInt]) -> IntVec {
    let g = gcd_vec(v);
    if g.is_zero() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

/// Primitive integer vector with the same direction as a rational vector.
pub fn primitivize_rat(v: &[BigRational]) -> IntVec {
    let mut lcm = BigInt::one();
    for x in v {
        lcm = lcm.lcm(x.denom());
    }
    let ints: IntVec = v.iter().map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    primitivize_int(&ints)
}

/// Canonical sign: first nonzero entry positive. Zero vector unchanged.
pub fn canonical_sign(v: &[BigInt]) -> IntVec {
    match v.iter().find(|x| !x.is_zero()) {
        Some(first) if first.is_negative() => v.iter().map(|x| -x).collect(),
        _ => v.to_vec(),
    }
}

/// Basis of the integer kernel `{x in Z^m : A x = 0}` via unimodular
/// column reduction: tracks `U` with `A U = [reduced | 0]`.
pub fn integer_kernel(a: &[IntVec]) -> Vec<IntVec> {
    if a.is_empty() {
        return vec![];
    }
    let rows = a.len();
    let cols = a[0].len();
    let mut m: IntMat = a.to_vec();
    let mut u: IntMat = (0..cols)
        .map(|j| {
            (0..cols)
                .map(|i| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect(); // columns of the identity, stored column-major: u[j] is column j

    let col_op_sub = |m: &mut IntMat, u: &mut IntMat, src: usize, dst: usize, q: &BigInt| {
        for r in 0..rows {
            let sub = q * &m[r][src];
            m[r][dst] -= sub;
        }
        for r in 0..cols {
            let sub = q * &u[src][r];
            u[dst][r] -= sub;
        }
    };
    let col_swap = |m: &mut IntMat, u: &mut IntMat, i: usize, j: usize| {
        for r in 0..rows {
            m[r].swap(i, j);
        }
        u.swap(i, j);
    };

    let mut lead = 0usize;
    for r in 0..rows {
        if lead == cols {
            break;
        }
        // reduce row r over columns lead..cols to a single nonzero entry
        loop {
            let mut nonzero: Vec<usize> = (lead..cols).filter(|&c| !m[r][c].is_zero()).collect();
            if nonzero.is_empty() {
                break;
            }
            if nonzero.len() == 1 {
                let c = nonzero[0];
                if c != lead {
                    col_swap(&mut m, &mut u, lead, c);
                }
                lead += 1;
                break;
            }
            // pick the column with the smallest nonzero |entry| and reduce others
            nonzero.sort_by_key(|&c| m[r][c].abs());
            let c0 = nonzero[0];
            for &c in &nonzero[1..] {
                let q = m[r][c].div_floor(&m[r][c0]);
                if !q.is_zero() {
                    col_op_sub(&mut m, &mut u, c0, c, &q);
                }
            }
        }
    }
    // columns lead.. of m are zero; the matching columns of u span the kernel
    let mut kernel: Vec<IntVec> = (lead..cols)
        .filter(|&c| (0..rows).all(|r| m[r][c].is_zero()))
        .map(|c| u[c].clone())
        .collect();
    for v in &mut kernel {
        *v = canonical_sign(&primitivize_int(v));
    }
    kernel.sort();
    kernel
}
