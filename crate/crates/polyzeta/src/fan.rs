//! Dual fans and their refinements: face/cone duality, vertex-preserving
//! simplicial subdivision, dual cones with diagonal pairing, Hilbert bases,
//! regularization by stellar subdivision, and toric chart data.
//!
//! All cones live in the first orthant and are strongly convex. Cones are
//! represented by their extreme rays (primitive integer vectors) together
//! with an exact H-representation computed at construction.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::json;
use thiserror::Error;

use crate::linalg::{
    self, det_int, dot_int, dot_int_rat, int_to_rat, primitivize_rat, rank, IntMat, IntVec,
    RatVec,
};
use crate::lp;
use crate::newton::{FaceId, NewtonPolyhedron};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FanError {
    #[error("cone is not pointed (contains a line)")]
    NotPointed,
    #[error("operation requires a simplicial cone or fan")]
    NotSimplicial,
    #[error("operation requires a full-dimensional cone")]
    NotFullDimensional,
    #[error("cone must lie in the first orthant")]
    NotInFirstOrthant,
    #[error("cone determinant {0} exceeds the Hilbert-basis enumeration limit")]
    DeterminantTooLarge(BigInt),
    #[error("cone {0} does not belong to this fan")]
    ForeignCone(usize),
    #[error("fan carries no face duality data")]
    NoDualityData,
}

/// A strongly convex rational polyhedral cone given by its extreme rays.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalCone {
    n: usize,
    rays: Vec<IntVec>,
    dim: usize,
    facet_normals: Vec<IntVec>,
    span_equations: Vec<IntVec>,
}

impl RationalCone {
    /// Canonicalizes arbitrary generators: primitivizes, deduplicates and
    /// drops non-extreme rays. Errors when the cone contains a line.
    pub fn new(n: usize, generators: Vec<IntVec>) -> Result<Self, FanError> {
        let mut rays: Vec<IntVec> = generators
            .iter()
            .filter(|r| r.iter().any(|x| !x.is_zero()))
            .map(|r| linalg::primitivize_int(r))
            .collect();
        rays.sort();
        rays.dedup();

        if !is_pointed(&rays) {
            return Err(FanError::NotPointed);
        }
        // extreme rays: not in the hull of the others
        let extreme: Vec<IntVec> = rays
            .iter()
            .enumerate()
            .filter(|(i, r)| {
                let others: Vec<RatVec> = rays
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| j != i)
                    .map(|(_, s)| int_to_rat(s))
                    .collect();
                !lp::in_cone_hull(&others, &int_to_rat(r))
            })
            .map(|(_, r)| r.clone())
            .collect();
        Ok(Self::from_extreme_rays(n, extreme))
    }

    /// Fast path when the rays are already primitive, distinct and extreme.
    pub(crate) fn from_extreme_rays(n: usize, mut rays: Vec<IntVec>) -> Self {
        rays.sort();
        let dim = if rays.is_empty() { 0 } else { linalg::rank_int(&rays) };
        let span_equations = span_equations(n, &rays);
        let facet_normals = facet_normals(n, dim, &rays);
        Self {
            n,
            rays,
            dim,
            facet_normals,
            span_equations,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[IntVec] {
        &self.rays
    }

    pub fn facet_normals(&self) -> &[IntVec] {
        &self.facet_normals
    }

    pub fn is_simplicial(&self) -> bool {
        self.rays.len() == self.dim
    }

    /// Index of the lattice generated by the rays inside its saturation;
    /// `Some(1)` means regular. `None` when not simplicial.
    pub fn lattice_index(&self) -> Option<BigInt> {
        if !self.is_simplicial() {
            return None;
        }
        if self.dim == 0 {
            return Some(BigInt::one());
        }
        let mut g = BigInt::zero();
        let cols: Vec<usize> = (0..self.n).collect();
        for_each_combination(cols.len(), self.dim, &mut |subset| {
            let minor: IntMat = self
                .rays
                .iter()
                .map(|r| subset.iter().map(|&c| r[c].clone()).collect())
                .collect();
            g = num_integer::Integer::gcd(&g, &det_int(&minor));
        });
        Some(g)
    }

    pub fn is_regular(&self) -> bool {
        self.lattice_index().map_or(false, |g| g.is_one())
    }

    pub fn in_first_orthant(&self) -> bool {
        self.rays
            .iter()
            .all(|r| r.iter().all(|x| !x.is_negative()))
    }

    pub fn contains(&self, v: &[BigRational]) -> bool {
        self.span_equations
            .iter()
            .all(|eq| dot_int_rat(eq, v).is_zero())
            && self
                .facet_normals
                .iter()
                .all(|u| !dot_int_rat(u, v).is_negative())
    }

    pub fn contains_int(&self, v: &[BigInt]) -> bool {
        self.contains(&int_to_rat(v))
    }

    pub fn in_relative_interior(&self, v: &[BigRational]) -> bool {
        self.span_equations
            .iter()
            .all(|eq| dot_int_rat(eq, v).is_zero())
            && self
                .facet_normals
                .iter()
                .all(|u| dot_int_rat(u, v).is_positive())
            && (self.dim > 0 || v.iter().all(|x| x.is_zero()))
    }

    /// Tight ray sets of the codimension-1 faces.
    pub fn facet_ray_sets(&self) -> Vec<Vec<IntVec>> {
        self.facet_normals
            .iter()
            .map(|u| {
                self.rays
                    .iter()
                    .filter(|r| dot_int(u, r).is_zero())
                    .cloned()
                    .collect()
            })
            .collect()
    }
}

fn is_pointed(rays: &[IntVec]) -> bool {
    if rays.is_empty() {
        return true;
    }
    let n = rays[0].len();
    // a line exists iff some nonzero c >= 0 has  sum c_i r_i = 0;
    // normalize with sum c_i = 1
    let mut a: Vec<RatVec> = (0..n)
        .map(|coord| rays.iter().map(|r| BigRational::from_integer(r[coord].clone())).collect())
        .collect();
    a.push(vec![BigRational::one(); rays.len()]);
    let mut b = vec![BigRational::zero(); n];
    b.push(BigRational::one());
    lp::nonneg_solution(&a, &b).is_none()
}

fn span_equations(n: usize, rays: &[IntVec]) -> Vec<IntVec> {
    if rays.is_empty() {
        // span is {0}: every coordinate vanishes
        return (0..n)
            .map(|i| {
                let mut e = vec![BigInt::zero(); n];
                e[i] = BigInt::one();
                e
            })
            .collect();
    }
    let mat: Vec<RatVec> = rays.iter().map(|r| int_to_rat(r)).collect();
    linalg::nullspace(&mat)
        .iter()
        .map(|v| linalg::canonical_sign(&primitivize_rat(v)))
        .collect()
}

fn facet_normals(n: usize, dim: usize, rays: &[IntVec]) -> Vec<IntVec> {
    if dim == 0 {
        return vec![];
    }
    // basis of the span: dim linearly independent rays
    let mut basis: Vec<IntVec> = Vec::new();
    for r in rays {
        let mut trial: Vec<RatVec> = basis.iter().map(|b| int_to_rat(b)).collect();
        trial.push(int_to_rat(r));
        if rank(&trial) == basis.len() + 1 {
            basis.push(r.clone());
        }
    }
    debug_assert_eq!(basis.len(), dim);

    let mut normals: BTreeSet<IntVec> = BTreeSet::new();
    for_each_combination(rays.len(), dim - 1, &mut |subset| {
        // u = sum c_j basis_j  with  u . r_s = 0 for s in subset
        let constraints: Vec<RatVec> = subset
            .iter()
            .map(|&s| {
                basis
                    .iter()
                    .map(|b| BigRational::from_integer(dot_int(b, &rays[s])))
                    .collect()
            })
            .collect();
        if !constraints.is_empty() && rank(&constraints) != dim - 1 {
            return;
        }
        let c_space = if constraints.is_empty() {
            vec![{
                let mut c = vec![BigRational::zero(); dim];
                c[0] = BigRational::one();
                c
            }]
        } else {
            linalg::nullspace(&constraints)
        };
        if c_space.len() != 1 {
            return;
        }
        let u_rat: RatVec = (0..n)
            .map(|i| {
                basis
                    .iter()
                    .zip(&c_space[0])
                    .map(|(b, c)| BigRational::from_integer(b[i].clone()) * c)
                    .sum()
            })
            .collect();
        let u = primitivize_rat(&u_rat);
        if u.iter().all(|x| x.is_zero()) {
            return;
        }
        let dots: Vec<BigInt> = rays.iter().map(|r| dot_int(&u, r)).collect();
        let any_pos = dots.iter().any(|d| d.is_positive());
        let any_neg = dots.iter().any(|d| d.is_negative());
        let u = match (any_pos, any_neg) {
            (true, false) => u,
            (false, true) => u.iter().map(|x| -x).collect(),
            _ => return,
        };
        // the tight rays must span a hyperplane of the cone
        let tight: Vec<IntVec> = rays
            .iter()
            .filter(|r| dot_int(&u, r).is_zero())
            .cloned()
            .collect();
        let tight_rank = if tight.is_empty() { 0 } else { linalg::rank_int(&tight) };
        if tight_rank == dim - 1 {
            normals.insert(u);
        }
    });
    normals.into_iter().collect()
}

/// A cone of a fan, as indices into the fan's ray table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FanCone {
    pub ray_ids: Vec<usize>,
    pub dim: usize,
}

/// A polyhedral fan supported on the first orthant.
#[derive(Clone, Debug)]
pub struct Fan {
    n: usize,
    rays: Vec<IntVec>,
    cones: Vec<FanCone>,
    /// For dual fans: the face of `NP(f)` each cone is dual to.
    dual_faces: Option<Vec<FaceId>>,
}

impl Fan {
    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    /// The vertex set `Vert(Sigma)`: all rays of the fan.
    pub fn rays(&self) -> &[IntVec] {
        &self.rays
    }

    pub fn cones(&self) -> &[FanCone] {
        &self.cones
    }

    pub fn cone_rays(&self, idx: usize) -> Vec<IntVec> {
        self.cones[idx]
            .ray_ids
            .iter()
            .map(|&i| self.rays[i].clone())
            .collect()
    }

    pub fn rational_cone(&self, idx: usize) -> RationalCone {
        RationalCone::from_extreme_rays(self.n, self.cone_rays(idx))
    }

    pub fn max_cone_ids(&self) -> Vec<usize> {
        (0..self.cones.len())
            .filter(|&i| self.cones[i].dim == self.n)
            .collect()
    }

    /// Looks a cone up by its (unordered) ray vectors.
    pub fn find_cone(&self, rays: &[IntVec]) -> Option<usize> {
        let mut ids: Vec<usize> = rays
            .iter()
            .map(|r| self.rays.binary_search(&linalg::primitivize_int(r)).ok())
            .collect::<Option<_>>()?;
        ids.sort();
        ids.dedup();
        self.cones.iter().position(|c| c.ray_ids == ids)
    }

    /// The face of `NP(f)` dual to a cone of the dual fan.
    pub fn face_of_cone(&self, cone_idx: usize) -> Result<FaceId, FanError> {
        let duals = self.dual_faces.as_ref().ok_or(FanError::NoDualityData)?;
        duals
            .get(cone_idx)
            .copied()
            .ok_or(FanError::ForeignCone(cone_idx))
    }

    /// The cone of the dual fan dual to a face of `NP(f)`.
    pub fn cone_of_face(&self, face: FaceId) -> Result<usize, FanError> {
        let duals = self.dual_faces.as_ref().ok_or(FanError::NoDualityData)?;
        duals
            .iter()
            .position(|&f| f == face)
            .ok_or(FanError::ForeignCone(face))
    }

    /// The unique cone whose relative interior contains `omega`, if any.
    pub fn cone_with_in_relative_interior(&self, omega: &[BigRational]) -> Option<usize> {
        (0..self.cones.len()).find(|&i| self.rational_cone(i).in_relative_interior(omega))
    }

    /// Max cones whose relative interior contains `omega`.
    pub fn max_cones_with_in_relative_interior(&self, omega: &[BigRational]) -> Vec<usize> {
        self.max_cone_ids()
            .into_iter()
            .filter(|&i| self.rational_cone(i).in_relative_interior(omega))
            .collect()
    }

    pub fn is_simplicial(&self) -> bool {
        self.max_cone_ids()
            .iter()
            .all(|&i| self.rational_cone(i).is_simplicial())
    }

    pub fn is_regular(&self) -> bool {
        self.max_cone_ids()
            .iter()
            .all(|&i| self.rational_cone(i).is_regular())
    }

    /// Builds a fan from full-dimensional cones by closing under faces.
    pub fn from_max_cones(n: usize, max_cones: Vec<Vec<IntVec>>) -> Result<Self, FanError> {
        let mut cone_sets: BTreeSet<Vec<IntVec>> = BTreeSet::new();
        for gens in max_cones {
            let cone = RationalCone::new(n, gens)?;
            collect_faces(n, cone, &mut cone_sets);
        }
        Ok(Self::from_cone_sets(n, cone_sets, None))
    }

    fn from_cone_sets(
        n: usize,
        cone_sets: BTreeSet<Vec<IntVec>>,
        dual: Option<BTreeMap<Vec<IntVec>, FaceId>>,
    ) -> Self {
        let mut rays: BTreeSet<IntVec> = BTreeSet::new();
        for c in &cone_sets {
            rays.extend(c.iter().cloned());
        }
        let rays: Vec<IntVec> = rays.into_iter().collect();
        let mut cones: Vec<(FanCone, Vec<IntVec>)> = cone_sets
            .into_iter()
            .map(|set| {
                let ray_ids: Vec<usize> = set
                    .iter()
                    .map(|r| rays.binary_search(r).expect("ray registered"))
                    .collect();
                let dim = if set.is_empty() { 0 } else { linalg::rank_int(&set) };
                (FanCone { ray_ids, dim }, set)
            })
            .collect();
        cones.sort_by(|a, b| (a.0.dim, &a.0.ray_ids).cmp(&(b.0.dim, &b.0.ray_ids)));
        let dual_faces = dual.map(|map| {
            cones
                .iter()
                .map(|(_, set)| *map.get(set).expect("every cone is dual to a face"))
                .collect()
        });
        Fan {
            n,
            rays,
            cones: cones.into_iter().map(|(c, _)| c).collect(),
            dual_faces,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let ray_json = |r: &IntVec| -> serde_json::Value {
            json!(r.iter().map(|x| x.to_string().parse::<i64>().map(serde_json::Value::from).unwrap_or_else(|_| json!(x.to_string()))).collect::<Vec<_>>())
        };
        json!({
            "rays": self.rays.iter().map(ray_json).collect::<Vec<_>>(),
            "cones": (0..self.cones.len()).map(|i| {
                let rc = self.rational_cone(i);
                json!({
                    "ray_ids": self.cones[i].ray_ids,
                    "det": rc.lattice_index().map(|d| json!(d.to_string().parse::<i64>().unwrap_or_default())),
                    "regular": rc.is_regular(),
                })
            }).collect::<Vec<_>>(),
            "vertices": self.rays.iter().map(ray_json).collect::<Vec<_>>(),
        })
    }
}

fn collect_faces(n: usize, cone: RationalCone, out: &mut BTreeSet<Vec<IntVec>>) {
    if out.contains(cone.rays()) {
        return;
    }
    out.insert(cone.rays().to_vec());
    if cone.dim() == 0 {
        return;
    }
    out.insert(vec![]); // the zero cone is a face of every cone
    for tight in cone.facet_ray_sets() {
        collect_faces(n, RationalCone::from_extreme_rays(n, tight), out);
    }
}

/// The dual fan `Sigma(f)`: for every face `F` of `NP(f)`, the cone
/// generated by the inward normals of the facets containing `F`.
pub fn dual_fan(np: &NewtonPolyhedron) -> Fan {
    let mut cone_sets: BTreeSet<Vec<IntVec>> = BTreeSet::new();
    let mut dual: BTreeMap<Vec<IntVec>, FaceId> = BTreeMap::new();
    for face in &np.faces {
        let mut rays: Vec<IntVec> = face
            .tight_facets
            .iter()
            .map(|&t| np.facets[t].normal.clone())
            .collect();
        rays.sort();
        dual.insert(rays.clone(), face.id);
        cone_sets.insert(rays);
    }
    let fan = Fan::from_cone_sets(np.n, cone_sets, Some(dual));
    debug_assert_eq!(fan.rays().len(), np.facets.len());
    for (idx, cone) in fan.cones().iter().enumerate() {
        let face = fan.face_of_cone(idx).expect("dual data");
        debug_assert_eq!(cone.dim, np.n - np.faces[face].dim);
    }
    fan
}

/// Simplicial refinement with the same vertex set, by pulling
/// triangulation at the lexicographically least ray of each cone.
pub fn simplicialize(fan: &Fan) -> Fan {
    let n = fan.ambient_dim();
    let mut cone_sets: BTreeSet<Vec<IntVec>> = BTreeSet::new();
    cone_sets.insert(vec![]);
    for idx in fan.max_cone_ids() {
        for simplex in triangulate(n, &fan.cone_rays(idx)) {
            for subset_rays in all_subsets(&simplex) {
                cone_sets.insert(subset_rays);
            }
        }
    }
    Fan::from_cone_sets(n, cone_sets, None)
}

fn triangulate(n: usize, rays: &[IntVec]) -> Vec<Vec<IntVec>> {
    let cone = RationalCone::from_extreme_rays(n, rays.to_vec());
    if cone.is_simplicial() {
        return vec![cone.rays().to_vec()];
    }
    let pull = cone.rays()[0].clone(); // rays are sorted: lex least
    let mut out = Vec::new();
    for tight in cone.facet_ray_sets() {
        if tight.contains(&pull) {
            continue;
        }
        for mut simplex in triangulate(n, &tight) {
            simplex.push(pull.clone());
            simplex.sort();
            out.push(simplex);
        }
    }
    out
}

fn all_subsets(rays: &[IntVec]) -> Vec<Vec<IntVec>> {
    let mut out = Vec::with_capacity(1 << rays.len());
    for mask in 0u32..(1 << rays.len()) {
        let mut s: Vec<IntVec> = rays
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, r)| r.clone())
            .collect();
        s.sort();
        out.push(s);
    }
    out
}

/// The dual of a full-dimensional simplicial cone, with the diagonal
/// pairing `N^t M = Lambda` (positive integer diagonal).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualConePair {
    /// Rays of the primal cone as columns.
    pub n_matrix: IntMat,
    /// Primitive rays of the dual cone as columns.
    pub m_matrix: IntMat,
    /// Diagonal of `N^t M`.
    pub lambda: IntVec,
}

impl DualConePair {
    pub fn primal_rays(&self) -> Vec<IntVec> {
        columns(&self.n_matrix)
    }

    pub fn dual_rays(&self) -> Vec<IntVec> {
        columns(&self.m_matrix)
    }
}

fn columns(m: &IntMat) -> Vec<IntVec> {
    if m.is_empty() {
        return vec![];
    }
    (0..m[0].len())
        .map(|j| m.iter().map(|row| row[j].clone()).collect())
        .collect()
}

fn matrix_from_columns(cols: &[IntVec]) -> IntMat {
    if cols.is_empty() {
        return vec![];
    }
    (0..cols[0].len())
        .map(|i| cols.iter().map(|c| c[i].clone()).collect())
        .collect()
}

pub fn dual_cone(sigma: &RationalCone) -> Result<DualConePair, FanError> {
    let n = sigma.ambient_dim();
    if !sigma.is_simplicial() {
        return Err(FanError::NotSimplicial);
    }
    if sigma.dim() != n {
        return Err(FanError::NotFullDimensional);
    }
    let n_matrix = matrix_from_columns(sigma.rays());
    let n_rat: Vec<RatVec> = n_matrix.iter().map(|r| int_to_rat(r)).collect();
    let inv = linalg::inverse(&n_rat).expect("full-dimensional simplicial cone");
    // column j of M: primitive positive multiple of row j of N^{-1}
    let m_cols: Vec<IntVec> = inv.iter().map(|row| primitivize_rat(row)).collect();
    let lambda: IntVec = sigma
        .rays()
        .iter()
        .zip(&m_cols)
        .map(|(u, v)| dot_int(u, v))
        .collect();
    debug_assert!(lambda.iter().all(|l| l.is_positive()));
    // N^t M diagonal: v_j . u_i = 0 for i != j
    debug_assert!(sigma.rays().iter().enumerate().all(|(i, u)| {
        m_cols
            .iter()
            .enumerate()
            .all(|(j, v)| i == j || dot_int(u, v).is_zero())
    }));
    Ok(DualConePair {
        n_matrix,
        m_matrix: matrix_from_columns(&m_cols),
        lambda,
    })
}

const HILBERT_DET_LIMIT: i64 = 1_000_000;

/// Minimal generating set of the semigroup `C  cap  Z^n` of a pointed
/// full-dimensional cone, by fundamental-parallelepiped enumeration.
pub fn hilbert_basis(cone: &RationalCone) -> Result<Vec<IntVec>, FanError> {
    let n = cone.ambient_dim();
    if cone.dim() != n {
        return Err(FanError::NotFullDimensional);
    }
    let pieces = triangulate(n, cone.rays());
    let mut candidates: BTreeSet<IntVec> = cone.rays().iter().cloned().collect();
    for piece in &pieces {
        let d = det_int(&matrix_from_columns(piece)).abs();
        if d > BigInt::from(HILBERT_DET_LIMIT) {
            return Err(FanError::DeterminantTooLarge(d));
        }
        for p in parallelepiped_points(piece) {
            if p.iter().any(|x| !x.is_zero()) {
                candidates.insert(p);
            }
        }
    }
    let candidates: Vec<IntVec> = candidates.into_iter().collect();
    let mut basis: Vec<IntVec> = Vec::new();
    'outer: for x in &candidates {
        for y in &candidates {
            if y == x {
                continue;
            }
            let diff: IntVec = x.iter().zip(y).map(|(a, b)| a - b).collect();
            if diff.iter().all(|v| v.is_zero()) {
                continue;
            }
            if cone.contains_int(&diff) {
                continue 'outer; // x = y + (x - y) is reducible
            }
        }
        basis.push(x.clone());
    }
    Ok(basis)
}

/// Lattice points of `{ R t : 0 <= t_i < 1 }` for a simplicial ray set.
fn parallelepiped_points(rays: &[IntVec]) -> Vec<IntVec> {
    let n = rays[0].len();
    let r_mat = matrix_from_columns(rays);
    let r_rat: Vec<RatVec> = r_mat.iter().map(|r| int_to_rat(r)).collect();
    let inv = linalg::inverse(&r_rat).expect("simplicial full-dimensional");

    let mut lo = vec![BigInt::zero(); n];
    let mut hi = vec![BigInt::zero(); n];
    for i in 0..n {
        for ray in rays {
            if ray[i].is_negative() {
                lo[i] += &ray[i];
            } else {
                hi[i] += &ray[i];
            }
        }
    }
    let mut out = Vec::new();
    let mut x = lo.clone();
    'scan: loop {
        let xr = int_to_rat(&x);
        let t: RatVec = inv.iter().map(|row| linalg::dot_rat(row, &xr)).collect();
        if t
            .iter()
            .all(|ti| !ti.is_negative() && *ti < BigRational::one())
        {
            out.push(x.clone());
        }
        // advance odometer
        for i in 0..n {
            x[i] += 1;
            if x[i] <= hi[i] {
                continue 'scan;
            }
            x[i] = lo[i].clone();
        }
        break;
    }
    out
}

/// Regular refinement by repeated stellar subdivision at Hilbert-basis
/// elements of non-regular cones. Deterministic: the lexicographically
/// least non-regular max cone is subdivided at the element minimizing the
/// resulting multiplicity sum.
pub fn regularize(fan: &Fan) -> Result<Fan, FanError> {
    let n = fan.ambient_dim();
    if !fan.is_simplicial() {
        return Err(FanError::NotSimplicial);
    }
    let mut max_cones: Vec<Vec<IntVec>> = fan
        .max_cone_ids()
        .iter()
        .map(|&i| fan.cone_rays(i))
        .collect();
    max_cones.sort();

    loop {
        let multiplicities = multiset_of_dets(&max_cones);
        let Some(target) = max_cones
            .iter()
            .find(|c| det_int(&matrix_from_columns(c)).abs() > BigInt::one())
            .cloned()
        else {
            break;
        };
        let cone = RationalCone::from_extreme_rays(n, target.clone());
        let hb = hilbert_basis(&cone)?;
        let candidates: Vec<IntVec> = hb
            .into_iter()
            .filter(|w| !cone.rays().contains(w))
            .collect();
        debug_assert!(!candidates.is_empty());
        let mut best: Option<(BigInt, IntVec, Vec<Vec<IntVec>>)> = None;
        for w in candidates {
            let subdivided = stellar_subdivision(n, &max_cones, &w);
            let sum: BigInt = subdivided
                .iter()
                .map(|c| det_int(&matrix_from_columns(c)).abs())
                .sum();
            let better = match &best {
                None => true,
                Some((s, bw, _)) => sum < *s || (sum == *s && w < *bw),
            };
            if better {
                best = Some((sum, w, subdivided));
            }
        }
        let (_, _, subdivided) = best.expect("candidate exists");
        max_cones = subdivided;
        max_cones.sort();
        let new_multiplicities = multiset_of_dets(&max_cones);
        assert!(
            new_multiplicities < multiplicities,
            "multiplicity measure must strictly decrease"
        );
    }

    let mut cone_sets: BTreeSet<Vec<IntVec>> = BTreeSet::new();
    cone_sets.insert(vec![]);
    for c in &max_cones {
        for s in all_subsets(c) {
            cone_sets.insert(s);
        }
    }
    Ok(Fan::from_cone_sets(n, cone_sets, None))
}

/// Sorted-descending determinant sequence; lexicographic comparison gives
/// the termination measure for stellar subdivision.
fn multiset_of_dets(max_cones: &[Vec<IntVec>]) -> Vec<BigInt> {
    let mut dets: Vec<BigInt> = max_cones
        .iter()
        .map(|c| det_int(&matrix_from_columns(c)).abs())
        .collect();
    dets.sort();
    dets.reverse();
    dets
}

fn stellar_subdivision(_n: usize, max_cones: &[Vec<IntVec>], w: &IntVec) -> Vec<Vec<IntVec>> {
    let mut out = Vec::new();
    for cone in max_cones {
        let r_rat: Vec<RatVec> = matrix_from_columns(cone)
            .iter()
            .map(|r| int_to_rat(r))
            .collect();
        let coeffs = linalg::solve_square(&r_rat, &int_to_rat(w)).expect("simplicial");
        if coeffs.iter().any(|c| c.is_negative()) {
            out.push(cone.clone());
            continue;
        }
        // w lies in this cone: replace ray i by w for every i in the support
        for (i, c) in coeffs.iter().enumerate() {
            if c.is_positive() {
                let mut piece = cone.clone();
                piece[i] = w.clone();
                piece.sort();
                out.push(piece);
            }
        }
    }
    out
}

/// Chart data of a full-dimensional simplicial cone in the first orthant:
/// semigroup generators of `sigma^dual cap Z^n` in the order
/// `(v^(1..n), e^(1..n), w^(1..l))`, the binomial relation lattice, and the
/// stacked exponent matrix of `Phi_sigma = (Lambda | N^t | N^t W)`.
#[derive(Clone, Debug)]
pub struct ChartData {
    pub sigma: RationalCone,
    pub pair: DualConePair,
    pub generators: Vec<IntVec>,
    pub relations: Vec<IntVec>,
    pub phi_matrix: IntMat,
}

pub fn chart_data(sigma: &RationalCone) -> Result<ChartData, FanError> {
    let n = sigma.ambient_dim();
    if !sigma.in_first_orthant() {
        return Err(FanError::NotInFirstOrthant);
    }
    let pair = dual_cone(sigma)?;
    let v_cols = pair.dual_rays();
    let dual = RationalCone::from_extreme_rays(n, v_cols.clone());
    let hb = hilbert_basis(&dual)?;

    let mut generators: Vec<IntVec> = v_cols.clone();
    let mut e_cols: Vec<IntVec> = Vec::new();
    for i in 0..n {
        let mut e = vec![BigInt::zero(); n];
        e[i] = BigInt::one();
        e_cols.push(e);
    }
    generators.extend(e_cols.iter().cloned());
    let known: BTreeSet<IntVec> = generators.iter().cloned().collect();
    let w_cols: Vec<IntVec> = hb.into_iter().filter(|h| !known.contains(h)).collect();
    generators.extend(w_cols.iter().cloned());

    let gen_matrix = matrix_from_columns(&generators);
    let relations = linalg::integer_kernel(&gen_matrix);

    // Phi exponent block: Lambda | N^t | N^t W
    let nt: IntMat = transpose(&pair.n_matrix);
    let mut phi_cols: Vec<IntVec> = Vec::new();
    for (j, l) in pair.lambda.iter().enumerate() {
        let mut col = vec![BigInt::zero(); n];
        col[j] = l.clone();
        phi_cols.push(col);
    }
    phi_cols.extend(columns(&nt));
    for w in &w_cols {
        phi_cols.push(nt.iter().map(|row| dot_int(row, w)).collect());
    }
    let phi_matrix = matrix_from_columns(&phi_cols);

    Ok(ChartData {
        sigma: sigma.clone(),
        pair,
        generators,
        relations,
        phi_matrix,
    })
}

fn transpose(m: &IntMat) -> IntMat {
    if m.is_empty() {
        return vec![];
    }
    (0..m[0].len())
        .map(|j| m.iter().map(|row| row[j].clone()).collect())
        .collect()
}

/// Calls `body` with every `k`-subset of `0..n`.
fn for_each_combination(n: usize, k: usize, body: &mut dyn FnMut(&[usize])) {
    if k == 0 {
        body(&[]);
        return;
    }
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        body(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in (i + 1)..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
