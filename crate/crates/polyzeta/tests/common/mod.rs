//! Shared helpers for the integration suites: random polynomial
//! generators, independent oracles, and small conversions.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use polyzeta::gauss::GaussianRational;
use polyzeta::linalg::{IntMat, IntVec};
use polyzeta::nondeg::{check_all, NondegConfig, Overall};
use polyzeta::newton::newton_polyhedron;
use polyzeta::poly::{ExponentVector, LaurentPolynomial};

pub fn iv(v: &[i64]) -> IntVec {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

/// Random polynomial with `f(0) = 0`, exact non-degenerate on every
/// compact face. Resamples until the (exact, n = 2) verdict holds.
pub fn random_nondegenerate_poly(rng: &mut ChaCha8Rng) -> LaurentPolynomial {
    let cfg = NondegConfig::default();
    loop {
        let n_terms = rng.gen_range(2..=4);
        let f = LaurentPolynomial::from_terms(
            2,
            (0..n_terms).map(|_| {
                let e = loop {
                    let e = vec![rng.gen_range(0..=5i64), rng.gen_range(0..=5i64)];
                    if e != vec![0, 0] {
                        break e;
                    }
                };
                let c = loop {
                    let c = rng.gen_range(-4..=4i64);
                    if c != 0 {
                        break c;
                    }
                };
                (ExponentVector(e), GaussianRational::from_int(c))
            }),
        );
        if f.is_zero() {
            continue;
        }
        let np = newton_polyhedron(&f).unwrap();
        let report = check_all(&f, &np, true, &cfg);
        if report.overall == Overall::NonDegenerate {
            return f;
        }
    }
}

/// Independent symbolic oracle for the Jacobian determinant of `psi_A`:
/// formal partial derivatives of the coordinate monomials, then Laplace
/// expansion over exact polynomials.
pub fn symbolic_jacobian_det(a: &IntMat) -> LaurentPolynomial {
    use num_traits::ToPrimitive;
    let n = a.len();
    let outputs: Vec<LaurentPolynomial> = (0..n)
        .map(|k| {
            let exp = ExponentVector((0..n).map(|j| a[j][k].to_i64().unwrap()).collect());
            LaurentPolynomial::monomial(exp, GaussianRational::from_int(1))
        })
        .collect();
    // row k: derivatives of output k
    let jac: Vec<Vec<LaurentPolynomial>> = (0..n)
        .map(|k| (1..=n).map(|j| outputs[k].partial(j)).collect())
        .collect();
    poly_det(&jac, n)
}

pub fn poly_det(m: &[Vec<LaurentPolynomial>], n: usize) -> LaurentPolynomial {
    if m.is_empty() {
        return LaurentPolynomial::constant(n, GaussianRational::from_int(1));
    }
    if m.len() == 1 {
        return m[0][0].clone();
    }
    let mut acc = LaurentPolynomial::zero(n);
    for (j, entry) in m[0].iter().enumerate() {
        if entry.is_zero() {
            continue;
        }
        let minor: Vec<Vec<LaurentPolynomial>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(k, _)| *k != j)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        let term = entry.mul(&poly_det(&minor, n));
        acc = if j % 2 == 0 {
            acc.add(&term)
        } else {
            acc.sub(&term)
        };
    }
    acc
}
