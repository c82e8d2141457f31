//! Exact rational linear-programming feasibility.
//!
//! Phase-1 simplex with Bland's rule over `BigRational`: decides whether
//! `A t = b` has a solution with `t >= 0` and returns one if so. Used for
//! cone membership, pointedness and extreme-ray tests, and as the vertex
//! oracle in tests. Problem sizes here are tiny, so no effort is spent on
//! sparsity or revised-simplex bookkeeping.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::linalg::RatVec;

/// Returns some `t >= 0` with `A t = b`, or `None` if infeasible.
pub fn nonneg_solution(a: &[RatVec], b: &[BigRational]) -> Option<RatVec> {
    let m = a.len();
    assert_eq!(b.len(), m);
    let n = if m > 0 { a[0].len() } else { 0 };
    if m == 0 {
        return Some(vec![]);
    }

    // tableau: n structural columns, m artificial columns, rhs
    let cols = n + m + 1;
    let mut tab: Vec<RatVec> = Vec::with_capacity(m);
    for i in 0..m {
        let flip = b[i].is_negative();
        let mut row: RatVec = Vec::with_capacity(cols);
        for j in 0..n {
            row.push(if flip { -a[i][j].clone() } else { a[i][j].clone() });
        }
        for j in 0..m {
            row.push(if i == j {
                BigRational::one()
            } else {
                BigRational::zero()
            });
        }
        row.push(if flip { -b[i].clone() } else { b[i].clone() });
        tab.push(row);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // objective: minimize the sum of artificials; reduced costs of the
    // artificial basis are the negated column sums of the structural part
    let mut obj: RatVec = vec![BigRational::zero(); cols];
    for j in 0..cols {
        let mut s = BigRational::zero();
        for row in tab.iter() {
            s += row[j].clone();
        }
        obj[j] = -s;
    }
    for j in n..n + m {
        obj[j] = BigRational::zero();
    }

    loop {
        // Bland: entering variable = least index with negative reduced cost
        let Some(enter) = (0..n + m).find(|&j| obj[j].is_negative()) else {
            break;
        };
        // ratio test, least basis index on ties
        let mut leave: Option<usize> = None;
        let mut best: Option<BigRational> = None;
        for i in 0..m {
            if tab[i][enter].is_positive() {
                let ratio = &tab[i][cols - 1] / &tab[i][enter];
                let better = match &best {
                    None => true,
                    Some(bst) => {
                        ratio < *bst
                            || (ratio == *bst
                                && basis[i] < basis[leave.unwrap()])
                    }
                };
                if better {
                    best = Some(ratio);
                    leave = Some(i);
                }
            }
        }
        let Some(pivot_row) = leave else {
            // unbounded phase-1 objective cannot happen (bounded below by 0)
            return None;
        };
        pivot(&mut tab, &mut obj, pivot_row, enter, cols);
        basis[pivot_row] = enter;
    }

    // feasible iff the phase-1 optimum is 0
    let objective_value = -obj[cols - 1].clone();
    if !objective_value.is_zero() {
        return None;
    }
    let mut t = vec![BigRational::zero(); n];
    for i in 0..m {
        if basis[i] < n {
            t[basis[i]] = tab[i][cols - 1].clone();
        }
    }
    debug_assert!(t.iter().all(|x| !x.is_negative()));
    Some(t)
}

fn pivot(tab: &mut [RatVec], obj: &mut RatVec, pr: usize, pc: usize, cols: usize) {
    let inv = tab[pr][pc].recip();
    for j in 0..cols {
        let t = &tab[pr][j] * &inv;
        tab[pr][j] = t;
    }
    let pivot_row: RatVec = tab[pr].clone();
    for i in 0..tab.len() {
        if i != pr && !tab[i][pc].is_zero() {
            let f = tab[i][pc].clone();
            for j in 0..cols {
                let t = &tab[i][j] - &f * &pivot_row[j];
                tab[i][j] = t;
            }
        }
    }
    if !obj[pc].is_zero() {
        let f = obj[pc].clone();
        for j in 0..cols {
            let t = &obj[j] - &f * &pivot_row[j];
            obj[j] = t;
        }
    }
}

/// Is `v` a nonnegative combination of the columns-as-vectors in `gens`?
pub fn in_cone_hull(gens: &[Vec<BigRational>], v: &[BigRational]) -> bool {
    if gens.is_empty() {
        return v.iter().all(|x| x.is_zero());
    }
    let n = v.len();
    let a: Vec<RatVec> = (0..n)
        .map(|i| gens.iter().map(|g| g[i].clone()).collect())
        .collect();
    nonneg_solution(&a, &v.to_vec()).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    fn rv(v: &[i64]) -> RatVec {
        v.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn feasible_system() {
        // t1 + t2 = 3, t1 - t2 = 1 has (2, 1) >= 0
        let a = vec![rv(&[1, 1]), rv(&[1, -1])];
        let t = nonneg_solution(&a, &rv(&[3, 1])).unwrap();
        assert_eq!(t, rv(&[2, 1]));
    }

    #[test]
    fn infeasible_system() {
        // t1 + t2 = -1 with t >= 0
        let a = vec![rv(&[1, 1])];
        assert!(nonneg_solution(&a, &rv(&[-1])).is_none());
    }

    #[test]
    fn cone_hull_membership() {
        let gens = vec![rv(&[1, 0]), rv(&[1, 1])];
        assert!(in_cone_hull(&gens, &rv(&[3, 1])));
        assert!(!in_cone_hull(&gens, &rv(&[0, 1])));
        assert!(in_cone_hull(&gens, &rv(&[0, 0])));
        assert!(!in_cone_hull(&[], &rv(&[1])));
    }

    #[test]
    fn degenerate_requires_bland() {
        // highly degenerate square system
        let a = vec![rv(&[1, 1, 1]), rv(&[1, 1, 1])];
        let t = nonneg_solution(&a, &rv(&[0, 0])).unwrap();
        assert!(t.iter().all(|x| x.is_zero()));
    }
}
