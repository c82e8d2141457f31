//! Monomial maps `psi_M`, their composition algebra and Jacobian exponents,
//! pullbacks of polynomials, and the vertex factorization
//! `f o psi_{N^t} = x^{b} h` over max cones of a subordinated fan.
//!
//! Convention: column `k` of the matrix is the exponent vector of the
//! `k`-th output coordinate, so `psi_M(z)_k = prod_j z_j^{M[j][k]}` and
//! `psi_M o psi_N = psi_{NM}`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::fan::RationalCone;
use crate::linalg::{det_int, dot_int, IntMat, IntVec};
use crate::newton::{self, NewtonPolyhedron};
use crate::poly::{ExponentVector, LaurentPolynomial, Region};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MonomialError {
    #[error("matrix is singular")]
    Singular,
    #[error("matrix must have nonnegative entries")]
    NegativeEntries,
    #[error("zero coordinate raised to a negative exponent")]
    ZeroCoordinate,
    #[error("cone is not full-dimensional simplicial")]
    BadCone,
    #[error("cone is not subordinated to the polynomial (dual vertex not unique)")]
    NotSubordinated,
    #[error("ray index {0} out of range")]
    BadRayIndex(usize),
}

/// The monomial morphism `psi_M` for a nonsingular integer matrix `M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialMap {
    matrix: IntMat,
    det: BigInt,
}

impl MonomialMap {
    pub fn new(matrix: IntMat) -> Result<Self, MonomialError> {
        let n = matrix.len();
        if matrix.iter().any(|row| row.len() != n) {
            return Err(MonomialError::Singular);
        }
        let det = det_int(&matrix);
        if det.is_zero() {
            return Err(MonomialError::Singular);
        }
        Ok(Self { matrix, det })
    }

    pub fn identity(n: usize) -> Self {
        let matrix: IntMat = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { BigInt::from(1) } else { BigInt::zero() })
                    .collect()
            })
            .collect();
        Self::new(matrix).expect("identity is nonsingular")
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self, MonomialError> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    /// `N^t` for a cone given by its rays: row `i` is the `i`-th ray.
    pub fn transpose_of_rays(rays: &[IntVec]) -> Result<Self, MonomialError> {
        Self::new(rays.to_vec())
    }

    pub fn dimension(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &IntMat {
        &self.matrix
    }

    pub fn det(&self) -> &BigInt {
        &self.det
    }

    /// `|det M|`: the covering degree of `psi_M` on the torus.
    pub fn covering_degree(&self) -> BigInt {
        self.det.abs()
    }

    /// Exponent vector of the `k`-th output coordinate (column `k`).
    pub fn output_exponent(&self, k: usize) -> IntVec {
        self.matrix.iter().map(|row| row[k].clone()).collect()
    }

    /// `zeta_k = prod_j z_j^{M[j][k]}`.
    pub fn apply(&self, point: &[Complex64]) -> Result<Vec<Complex64>, MonomialError> {
        let n = self.dimension();
        assert_eq!(point.len(), n);
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let mut v = Complex64::new(1.0, 0.0);
            for (j, z) in point.iter().enumerate() {
                let e = self.matrix[j][k].to_i32().expect("desk-scale exponent");
                if e == 0 {
                    continue;
                }
                if z.norm_sqr() == 0.0 {
                    if e < 0 {
                        return Err(MonomialError::ZeroCoordinate);
                    }
                    v = Complex64::new(0.0, 0.0);
                    break;
                }
                v *= z.powi(e);
            }
            out.push(v);
        }
        Ok(out)
    }

    /// `psi_self o psi_other = psi_{other . self}`.
    pub fn compose(&self, other: &Self) -> Self {
        let product = mat_mul(&other.matrix, &self.matrix);
        Self::new(product).expect("product of nonsingular matrices")
    }

    /// `L_M(mu) = M mu`.
    pub fn apply_exponent(&self, mu: &ExponentVector) -> ExponentVector {
        let mu_b = mu.to_bigint();
        ExponentVector(
            self.matrix
                .iter()
                .map(|row| dot_int(row, &mu_b).to_i64().expect("desk-scale exponent"))
                .collect(),
        )
    }
}

fn mat_mul(a: &IntMat, b: &IntMat) -> IntMat {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| &a[i][k] * &b[k][j]).sum())
                .collect()
        })
        .collect()
}

/// Jacobian data of `psi_A` where the rows of `A` are `u^(1..n) >= 0`:
/// `det D(psi_A)_x = det A * prod_i x_i^{||u^(i)|| - 1}`. Returns
/// `(det A, (||u^(1)||-1, ..., ||u^(n)||-1))`.
pub fn jacobian_exponents(a: &IntMat) -> Result<(BigInt, Vec<i64>), MonomialError> {
    if a.iter().any(|row| row.iter().any(|x| x.is_negative())) {
        return Err(MonomialError::NegativeEntries);
    }
    let det = det_int(a);
    let exps = a
        .iter()
        .map(|row| {
            let s: BigInt = row.iter().sum();
            s.to_i64().expect("desk-scale exponent") - 1
        })
        .collect();
    Ok((det, exps))
}

/// Pullback `f o psi_M`: every exponent `mu` becomes `M mu`, coefficients
/// unchanged (no collisions: `L_M` is injective for nonsingular `M`).
pub fn transform(f: &LaurentPolynomial, map: &MonomialMap) -> LaurentPolynomial {
    assert_eq!(f.dimension(), map.dimension());
    LaurentPolynomial::from_terms(
        f.dimension(),
        f.terms()
            .map(|(e, c)| (map.apply_exponent(e), c.clone())),
    )
}

/// The vertex factorization `f o psi_{N^t} = x^{b_image} h` with `h(0) != 0`.
#[derive(Clone, Debug)]
pub struct VertexFactorization {
    /// The dual vertex `b` of `NP(f)`.
    pub vertex: ExponentVector,
    /// `L_{N^t}(b) = (nu_{u^(1)}(f), ..., nu_{u^(n)}(f))`.
    pub b_image: ExponentVector,
    /// The unit factor: `h(0) != 0`.
    pub h: LaurentPolynomial,
    /// `psi_{N^t}` itself.
    pub map: MonomialMap,
}

/// Factors `f o psi_{N^t}` over a full-dimensional cone `sigma` of a fan
/// subordinated to `f`.
pub fn factor_vertex(
    f: &LaurentPolynomial,
    np: &NewtonPolyhedron,
    sigma: &RationalCone,
) -> Result<VertexFactorization, MonomialError> {
    let n = np.n;
    if !sigma.is_simplicial() || sigma.dim() != n {
        return Err(MonomialError::BadCone);
    }
    // interior sample: the dual face must be a single vertex
    let omega: Vec<BigInt> = (0..n)
        .map(|i| sigma.rays().iter().map(|r| r[i].clone()).sum())
        .collect();
    let omega_rat: Vec<_> = omega
        .iter()
        .map(|x| num_rational::BigRational::from_integer(x.clone()))
        .collect();
    let face = np
        .first_meet_locus(&omega_rat)
        .map_err(|_| MonomialError::NotSubordinated)?;
    if face.dim != 0 {
        return Err(MonomialError::NotSubordinated);
    }
    let vertex = face.support_points[0].clone();
    let vertex_b = vertex.to_bigint();

    // subordination: each ray attains its omega-order at the dual vertex
    let mut b_image = Vec::with_capacity(n);
    for ray in sigma.rays() {
        let nu = np
            .support
            .iter()
            .map(|m| dot_int(ray, &m.to_bigint()))
            .min()
            .expect("nonempty support");
        if nu != dot_int(ray, &vertex_b) {
            return Err(MonomialError::NotSubordinated);
        }
        b_image.push(nu.to_i64().expect("desk-scale exponent"));
    }
    let b_image = ExponentVector(b_image);

    let map = MonomialMap::transpose_of_rays(sigma.rays())?;
    debug_assert_eq!(map.apply_exponent(&vertex), b_image);
    let pulled = transform(f, &map);
    let neg = ExponentVector(b_image.0.iter().map(|&x| -x).collect());
    let h = pulled.shift(&neg);
    if !h.support().iter().all(|e| e.is_nonnegative()) || h.constant_term().is_zero() {
        return Err(MonomialError::NotSubordinated);
    }
    Ok(VertexFactorization {
        vertex,
        b_image,
        h,
        map,
    })
}

/// Verifies `(f o psi_{N^t})|_{b_image + <e_i : i not in J>} = f|_{F_tau} o psi_{N^t}`
/// for the face `tau` of `sigma` spanned by the rays indexed by `J`, and
/// returns `h_tau` with `f|_{F_tau} o psi_{N^t} = x^{b_image} h_tau`.
pub fn face_transform_check(
    f: &LaurentPolynomial,
    np: &NewtonPolyhedron,
    sigma: &RationalCone,
    ray_indices: &[usize],
) -> Result<LaurentPolynomial, MonomialError> {
    let n = np.n;
    let fac = factor_vertex(f, np, sigma)?;
    for &j in ray_indices {
        if j >= sigma.rays().len() {
            return Err(MonomialError::BadRayIndex(j));
        }
    }
    let in_j = |i: usize| ray_indices.contains(&i);

    // F_tau: first meet locus of an interior point of tau
    let omega: Vec<_> = (0..n)
        .map(|i| {
            let s: BigInt = ray_indices.iter().map(|&j| sigma.rays()[j][i].clone()).sum();
            num_rational::BigRational::from_integer(s)
        })
        .collect();
    let face = np
        .first_meet_locus(&omega)
        .map_err(|_| MonomialError::NotSubordinated)?;
    let f_tau = newton::face_function(np, f, face.id).expect("face id from this polyhedron");

    // left side: restriction of the pullback to b_image + <e_i : i not in J>
    let pulled = transform(f, &fac.map);
    let mut region = Region::new(n);
    for i in 0..n {
        let mut a = vec![0i64; n];
        a[i] = 1;
        if in_j(i) {
            region = region.with_hyperplane_int(&a, fac.b_image.0[i]);
        } else {
            region = region.with_halfspace_int(&a, fac.b_image.0[i]);
        }
    }
    let lhs = pulled.restrict(&region).expect("region has matching dimension");
    let rhs = transform(&f_tau, &fac.map);
    // equality is a theorem for subordinated fans; a failure is a bug
    assert_eq!(lhs, rhs, "face transform identity must hold");

    let neg = ExponentVector(fac.b_image.0.iter().map(|&x| -x).collect());
    let h_tau = rhs.shift(&neg);
    debug_assert!(h_tau
        .support()
        .iter()
        .all(|e| e.is_nonnegative() && (0..n).all(|i| !in_j(i) || e.0[i] == 0)));
    debug_assert!(!h_tau.constant_term().is_zero());
    Ok(h_tau)
}

/// Evaluates the coordinates of a stacked exponent matrix (columns are
/// exponent vectors) at a torus point; used for chart identities.
pub fn evaluate_exponent_columns(
    cols: &IntMat,
    point: &[Complex64],
) -> Result<Vec<Complex64>, MonomialError> {
    if cols.is_empty() {
        return Ok(vec![]);
    }
    let m = cols[0].len();
    let mut out = Vec::with_capacity(m);
    for k in 0..m {
        let mut v = Complex64::new(1.0, 0.0);
        for (j, z) in point.iter().enumerate() {
            let e = cols[j][k].to_i32().expect("desk-scale exponent");
            if e == 0 {
                continue;
            }
            if z.norm_sqr() == 0.0 {
                if e < 0 {
                    return Err(MonomialError::ZeroCoordinate);
                }
                v = Complex64::new(0.0, 0.0);
                break;
            }
            v *= z.powi(e);
        }
        out.push(v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::{dual_fan, simplicialize};
    use crate::gauss::GaussianRational;
    use crate::newton::newton_polyhedron;
    use crate::parse::parse;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Independent symbolic oracle: the determinant of the Jacobian matrix
    /// of `psi_A`, computed by formal differentiation and Laplace expansion.
    fn symbolic_jacobian_det(a: &IntMat) -> LaurentPolynomial {
        let n = a.len();
        let outputs: Vec<LaurentPolynomial> = (0..n)
            .map(|k| {
                let exp = ExponentVector(
                    (0..n)
                        .map(|j| a[j][k].to_i64().unwrap())
                        .collect(),
                );
                LaurentPolynomial::monomial(exp, GaussianRational::from_int(1))
            })
            .collect();
        let jac: Vec<Vec<LaurentPolynomial>> = (0..n)
            .map(|k| (1..=n).map(|j| outputs[k].partial(j)).collect())
            .collect();
        poly_det(&jac, n)
    }

    fn poly_det(m: &[Vec<LaurentPolynomial>], n: usize) -> LaurentPolynomial {
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

    #[test]
    fn apply_identity_and_basic_map() {
        let id = MonomialMap::identity(2);
        let p = vec![c(2.0, 0.0), c(3.0, 0.0)];
        assert_eq!(id.apply(&p).unwrap(), p);

        // columns (1,0) and (1,1): (z1, z1 z2)
        let m = MonomialMap::from_i64(&[&[1, 1], &[0, 1]]).unwrap();
        let out = m.apply(&p).unwrap();
        assert_eq!(out, vec![c(2.0, 0.0), c(6.0, 0.0)]);
        assert_eq!(m.covering_degree(), BigInt::from(1));
    }

    #[test]
    fn compose_matches_pointwise_composition() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let m = MonomialMap::from_i64(&[&[1, 2], &[1, 1]]).unwrap();
        let n = MonomialMap::from_i64(&[&[2, 1], &[0, 3]]).unwrap();
        let comp = m.compose(&n);
        assert_eq!(comp.matrix(), &mat_mul(n.matrix(), m.matrix()));
        for _ in 0..100 {
            let p: Vec<Complex64> = (0..2)
                .map(|_| {
                    Complex64::from_polar(
                        rng.gen_range(0.5..1.5),
                        rng.gen_range(0.0..std::f64::consts::TAU),
                    )
                })
                .collect();
            let lhs = comp.apply(&p).unwrap();
            let rhs = m.apply(&n.apply(&p).unwrap()).unwrap();
            for (a, b) in lhs.iter().zip(&rhs) {
                assert!((a - b).norm() <= 1e-12 * b.norm().max(1.0));
            }
        }
    }

    #[test]
    fn apply_rejects_zero_to_negative() {
        let m = MonomialMap::from_i64(&[&[-1, 0], &[0, 1]]).unwrap();
        let p = vec![c(0.0, 0.0), c(1.0, 0.0)];
        assert!(matches!(m.apply(&p), Err(MonomialError::ZeroCoordinate)));
    }

    #[test]
    fn jacobian_examples() {
        // psi(x1,x2) = (x1, x1 x2)
        let a: IntMat = vec![
            vec![BigInt::from(1), BigInt::from(1)],
            vec![BigInt::from(0), BigInt::from(1)],
        ];
        let (d, e) = jacobian_exponents(&a).unwrap();
        assert_eq!(d, BigInt::from(1));
        assert_eq!(e, vec![1, 0]);

        let id: IntMat = vec![
            vec![BigInt::from(1), BigInt::from(0)],
            vec![BigInt::from(0), BigInt::from(1)],
        ];
        let (d, e) = jacobian_exponents(&id).unwrap();
        assert_eq!(d, BigInt::from(1));
        assert_eq!(e, vec![0, 0]);

        let diag: IntMat = vec![
            vec![BigInt::from(3), BigInt::from(0)],
            vec![BigInt::from(0), BigInt::from(4)],
        ];
        let (d, e) = jacobian_exponents(&diag).unwrap();
        assert_eq!(d, BigInt::from(12));
        assert_eq!(e, vec![2, 3]);

        let neg: IntMat = vec![
            vec![BigInt::from(-1), BigInt::from(0)],
            vec![BigInt::from(0), BigInt::from(1)],
        ];
        assert!(matches!(
            jacobian_exponents(&neg),
            Err(MonomialError::NegativeEntries)
        ));
    }

    #[test]
    fn jacobian_lemma_against_symbolic_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let mut done = 0;
        while done < 20 {
            let n = rng.gen_range(1..=3);
            let a: IntMat = (0..n)
                .map(|_| (0..n).map(|_| BigInt::from(rng.gen_range(0..=4i64))).collect())
                .collect();
            if det_int(&a).is_zero() {
                continue;
            }
            done += 1;
            let (d, e) = jacobian_exponents(&a).unwrap();
            let expected = LaurentPolynomial::monomial(
                ExponentVector(e.clone()),
                GaussianRational::from_rational(num_rational::BigRational::from_integer(
                    d.clone(),
                )),
            );
            assert_eq!(symbolic_jacobian_det(&a), expected);
        }
    }

    #[test]
    fn transform_examples() {
        let f = parse("x1^2 + x2^3", 2).unwrap();
        // N^t with rows (1,0), (3,2)
        let nt = MonomialMap::from_i64(&[&[1, 0], &[3, 2]]).unwrap();
        let g = transform(&f, &nt);
        assert_eq!(g, parse("x1^2*x2^6 + x2^6", 2).unwrap());

        let xy = parse("x1*x2", 2).unwrap();
        assert_eq!(transform(&xy, &MonomialMap::identity(2)), xy);
    }

    #[test]
    fn transform_support_identity() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..50 {
            let f = LaurentPolynomial::from_terms(
                2,
                (0..rng.gen_range(1..5)).map(|_| {
                    (
                        ExponentVector(vec![rng.gen_range(0..5), rng.gen_range(0..5)]),
                        GaussianRational::from_int(rng.gen_range(1..9)),
                    )
                }),
            );
            let m = loop {
                let rows: Vec<Vec<i64>> = (0..2)
                    .map(|_| (0..2).map(|_| rng.gen_range(-3..=3)).collect())
                    .collect();
                if let Ok(m) =
                    MonomialMap::from_i64(&[&rows[0], &rows[1]])
                {
                    break m;
                }
            };
            let g = transform(&f, &m);
            let expected: std::collections::BTreeSet<ExponentVector> =
                f.support().iter().map(|e| m.apply_exponent(e)).collect();
            let actual: std::collections::BTreeSet<ExponentVector> =
                g.support().into_iter().collect();
            assert_eq!(expected, actual);
        }
    }

    #[test]
    fn factor_vertex_cusp() {
        let f = parse("x1^2 + x2^3", 2).unwrap();
        let np = newton_polyhedron(&f).unwrap();
        let fan = simplicialize(&dual_fan(&np));

        let sigma = RationalCone::new(
            2,
            vec![
                vec![BigInt::from(1), BigInt::from(0)],
                vec![BigInt::from(3), BigInt::from(2)],
            ],
        )
        .unwrap();
        assert!(fan.find_cone(sigma.rays()).is_some());
        let fac = factor_vertex(&f, &np, &sigma).unwrap();
        assert_eq!(fac.b_image, ExponentVector(vec![0, 6]));
        assert_eq!(fac.h, parse("x1^2 + 1", 2).unwrap());

        let sigma = RationalCone::new(
            2,
            vec![
                vec![BigInt::from(0), BigInt::from(1)],
                vec![BigInt::from(3), BigInt::from(2)],
            ],
        )
        .unwrap();
        let fac = factor_vertex(&f, &np, &sigma).unwrap();
        assert_eq!(fac.b_image, ExponentVector(vec![0, 6]));
        assert_eq!(fac.h, parse("1 + x1^3", 2).unwrap());
        // NP of the pullback has the single vertex b_image
        let g = transform(&f, &fac.map);
        let np_g = newton_polyhedron(&g).unwrap();
        assert_eq!(np_g.vertices, vec![fac.b_image.clone()]);
    }

    #[test]
    fn factor_vertex_monomial() {
        let f = parse("x1*x2", 2).unwrap();
        let np = newton_polyhedron(&f).unwrap();
        let orthant = RationalCone::new(
            2,
            vec![
                vec![BigInt::from(1), BigInt::from(0)],
                vec![BigInt::from(0), BigInt::from(1)],
            ],
        )
        .unwrap();
        let fac = factor_vertex(&f, &np, &orthant).unwrap();
        assert_eq!(fac.b_image, ExponentVector(vec![1, 1]));
        assert_eq!(fac.h, parse("1", 2).unwrap());
    }

    #[test]
    fn factor_vertex_rejects_unsubordinated() {
        // the orthant is not subordinated to the cusp fan: its interior
        // meets two dual cones
        let f = parse("x1^2 + x2^3", 2).unwrap();
        let np = newton_polyhedron(&f).unwrap();
        let orthant = RationalCone::new(
            2,
            vec![
                vec![BigInt::from(1), BigInt::from(0)],
                vec![BigInt::from(0), BigInt::from(1)],
            ],
        )
        .unwrap();
        assert!(matches!(
            factor_vertex(&f, &np, &orthant),
            Err(MonomialError::NotSubordinated)
        ));
    }

    #[test]
    fn face_transform_examples() {
        let f = parse("x1^2 + x2^3", 2).unwrap();
        let np = newton_polyhedron(&f).unwrap();
        let sigma = RationalCone::new(
            2,
            vec![
                vec![BigInt::from(1), BigInt::from(0)],
                vec![BigInt::from(3), BigInt::from(2)],
            ],
        )
        .unwrap();
        // rays are sorted: index 0 = (1,0), index 1 = (3,2)
        let h_tau = face_transform_check(&f, &np, &sigma, &[1]).unwrap();
        assert_eq!(h_tau, parse("x1^2 + 1", 2).unwrap());
        let h_tau = face_transform_check(&f, &np, &sigma, &[0]).unwrap();
        assert_eq!(h_tau, parse("1", 2).unwrap());
        let h_tau = face_transform_check(&f, &np, &sigma, &[]).unwrap();
        assert_eq!(h_tau, parse("x1^2 + 1", 2).unwrap());
    }
}
