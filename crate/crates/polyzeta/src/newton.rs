//! Newton polyhedra: exact H-representation, vertices, face lattice,
//! omega-orders, first meet loci, face functions and remoteness.
//!
//! `NP(f) = conv(eps(f)) + R^n_{>=0}`. Facet normals are primitive inward
//! integer vectors with nonnegative entries; the facet inequality is
//! `u . x >= nu_u` with `nu_u = min_{mu in eps(f)} u . mu`.
//!
//! Facet enumeration is an exact dual description: candidate normals come
//! from null spaces of (n-1)-tuples drawn from support differences and
//! coordinate directions, then are validated against the whole support.
//! Desk-scale dimensions keep this combinatorial approach cheap.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde_json::json;
use thiserror::Error;

use crate::linalg::{
    self, dot_int, dot_int_rat, int_to_rat, primitivize_rat, rank, IntVec, RatVec,
};
use crate::poly::{ExponentVector, LaurentPolynomial, Region};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NewtonError {
    #[error("the zero polynomial has no Newton polyhedron")]
    ZeroPolynomial,
    #[error("omega must be componentwise nonnegative")]
    NegativeOmega,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("face id {0} does not belong to this polyhedron")]
    ForeignFace(usize),
    #[error("remoteness undefined: every facet has nu_u = 0")]
    NoPositiveFacet,
}

/// A facet `u . x >= nu` of `NP(f)`, `u` primitive inward.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Facet {
    pub normal: IntVec,
    pub offset: BigInt,
}

impl Facet {
    /// `||u||`: the coordinate sum of the normal.
    pub fn normal_sum(&self) -> BigInt {
        self.normal.iter().sum()
    }

    pub fn has_positive_offset(&self) -> bool {
        self.offset.is_positive()
    }
}

pub type FaceId = usize;

/// A face of the polyhedron: `conv(vertices) + cone{e_i : i in recession}`.
#[derive(Clone, Debug)]
pub struct Face {
    pub id: FaceId,
    pub dim: usize,
    /// All facets containing this face (canonical tight set).
    pub tight_facets: Vec<usize>,
    /// Exponents of `f` lying on the face.
    pub support_points: Vec<ExponentVector>,
    /// Indices into `NewtonPolyhedron::vertices`.
    pub vertex_ids: Vec<usize>,
    /// Coordinate directions (0-based) contained in the face.
    pub recession: Vec<usize>,
    pub compact: bool,
}

impl Face {
    pub fn codim(&self, n: usize) -> usize {
        n - self.dim
    }
}

#[derive(Clone, Debug)]
pub struct NewtonPolyhedron {
    pub n: usize,
    pub support: Vec<ExponentVector>,
    pub vertices: Vec<ExponentVector>,
    pub facets: Vec<Facet>,
    /// Full face lattice, sorted by (dim, vertex ids, recession).
    pub faces: Vec<Face>,
    /// The improper face: the whole polyhedron.
    pub improper_face: FaceId,
}

/// Builds `NP(f)` for a nonzero polynomial.
pub fn newton_polyhedron(f: &LaurentPolynomial) -> Result<NewtonPolyhedron, NewtonError> {
    if f.is_zero() {
        return Err(NewtonError::ZeroPolynomial);
    }
    let n = f.dimension();
    let support = f.support();
    debug_assert!(
        support.iter().all(|e| e.is_nonnegative()),
        "Newton polyhedra are defined for polynomial supports"
    );

    let facets = enumerate_facets(n, &support);
    let vertices = find_vertices(n, &support, &facets);
    let faces = build_face_lattice(n, &support, &vertices, &facets);
    let improper_face = faces
        .iter()
        .position(|fc| fc.tight_facets.is_empty())
        .expect("improper face present");

    Ok(NewtonPolyhedron {
        n,
        support,
        vertices,
        facets,
        faces,
        improper_face,
    })
}

fn enumerate_facets(n: usize, support: &[ExponentVector]) -> Vec<Facet> {
    let mut directions: BTreeSet<IntVec> = BTreeSet::new();
    for i in 0..support.len() {
        for j in (i + 1)..support.len() {
            let d = support[i].sub(&support[j]).to_bigint();
            let d = linalg::canonical_sign(&linalg::primitivize_int(&d));
            if d.iter().any(|x| !x.is_zero()) {
                directions.insert(d);
            }
        }
    }
    for i in 0..n {
        let mut e = vec![BigInt::zero(); n];
        e[i] = BigInt::from(1);
        directions.insert(e);
    }
    let dirs: Vec<IntVec> = directions.into_iter().collect();

    let mut facets: BTreeMap<IntVec, BigInt> = BTreeMap::new();
    for_each_combination(dirs.len(), n.saturating_sub(1), &mut |subset| {
        let candidate = if n == 1 {
            Some(vec![BigInt::from(1)])
        } else {
            normal_of(n, subset.iter().map(|&i| &dirs[i]))
        };
        let Some(u) = candidate else { return };
        let u = orient_nonnegative(u);
        let Some(u) = u else { return };
        if let Some(offset) = validate_facet(n, support, &u) {
            facets.entry(u).or_insert(offset);
        }
    });

    facets
        .into_iter()
        .map(|(normal, offset)| Facet { normal, offset })
        .collect()
}

/// Primitive integer normal of the hyperplane spanned by `n-1` vectors,
/// or `None` when they do not span a hyperplane.
fn normal_of<'a, I>(n: usize, vecs: I) -> Option<IntVec>
where
    I: Iterator<Item = &'a IntVec>,
{
    let mat: Vec<RatVec> = vecs.map(|v| int_to_rat(v)).collect();
    if rank(&mat) != n - 1 {
        return None;
    }
    let ns = linalg::nullspace(&mat);
    debug_assert_eq!(ns.len(), 1);
    Some(primitivize_rat(&ns[0]))
}

fn orient_nonnegative(u: IntVec) -> Option<IntVec> {
    let any_pos = u.iter().any(|x| x.is_positive());
    let any_neg = u.iter().any(|x| x.is_negative());
    match (any_pos, any_neg) {
        (true, false) => Some(u),
        (false, true) => Some(u.iter().map(|x| -x).collect()),
        _ => None,
    }
}

/// Checks that the first meet locus of `u` has dimension `n - 1`.
fn validate_facet(n: usize, support: &[ExponentVector], u: &IntVec) -> Option<BigInt> {
    let values: Vec<BigInt> = support.iter().map(|m| dot_int(u, &m.to_bigint())).collect();
    let offset = values.iter().min()?.clone();
    let attaining: Vec<&ExponentVector> = support
        .iter()
        .zip(&values)
        .filter(|(_, v)| **v == offset)
        .map(|(m, _)| m)
        .collect();
    let mut span: Vec<RatVec> = Vec::new();
    let base = attaining[0].to_rational();
    for m in &attaining[1..] {
        let row: RatVec = m
            .to_rational()
            .iter()
            .zip(&base)
            .map(|(a, b)| a - b)
            .collect();
        span.push(row);
    }
    for (i, ui) in u.iter().enumerate() {
        if ui.is_zero() {
            let mut e = vec![BigRational::zero(); n];
            e[i] = BigRational::from_integer(1.into());
            span.push(e);
        }
    }
    if rank(&span) == n - 1 {
        Some(offset)
    } else {
        None
    }
}

fn find_vertices(n: usize, support: &[ExponentVector], facets: &[Facet]) -> Vec<ExponentVector> {
    let mut vertices: Vec<ExponentVector> = support
        .iter()
        .filter(|m| {
            let mb = m.to_bigint();
            let tight: Vec<RatVec> = facets
                .iter()
                .filter(|fa| dot_int(&fa.normal, &mb) == fa.offset)
                .map(|fa| int_to_rat(&fa.normal))
                .collect();
            rank(&tight) == n
        })
        .cloned()
        .collect();
    vertices.sort();
    vertices
}

fn build_face_lattice(
    n: usize,
    support: &[ExponentVector],
    vertices: &[ExponentVector],
    facets: &[Facet],
) -> Vec<Face> {
    // tightness tables
    let vertex_tight: Vec<BTreeSet<usize>> = vertices
        .iter()
        .map(|v| {
            let vb = v.to_bigint();
            facets
                .iter()
                .enumerate()
                .filter(|(_, fa)| dot_int(&fa.normal, &vb) == fa.offset)
                .map(|(i, _)| i)
                .collect()
        })
        .collect();

    // face key: (sorted vertex ids, recession set); value: canonical tight set
    let face_of_tightset = |tight: &BTreeSet<usize>| -> Option<(Vec<usize>, Vec<usize>)> {
        let vids: Vec<usize> = (0..vertices.len())
            .filter(|&v| tight.iter().all(|t| vertex_tight[v].contains(t)))
            .collect();
        if vids.is_empty() {
            return None;
        }
        let recession: Vec<usize> = (0..n)
            .filter(|&i| tight.iter().all(|&t| facets[t].normal[i].is_zero()))
            .collect();
        Some((vids, recession))
    };

    let canonical_tight = |vids: &[usize], recession: &[usize]| -> BTreeSet<usize> {
        (0..facets.len())
            .filter(|&t| {
                vids.iter().all(|&v| vertex_tight[v].contains(&t))
                    && recession.iter().all(|&i| facets[t].normal[i].is_zero())
            })
            .collect()
    };

    let mut seen: BTreeMap<(Vec<usize>, Vec<usize>), BTreeSet<usize>> = BTreeMap::new();
    let improper_key = (
        (0..vertices.len()).collect::<Vec<_>>(),
        (0..n).collect::<Vec<_>>(),
    );
    seen.insert(improper_key, BTreeSet::new());

    let mut queue: Vec<BTreeSet<usize>> = Vec::new();
    for t in 0..facets.len() {
        let single: BTreeSet<usize> = [t].into_iter().collect();
        if let Some((vids, rec)) = face_of_tightset(&single) {
            let canon = canonical_tight(&vids, &rec);
            if seen.insert((vids, rec), canon.clone()).is_none() {
                queue.push(canon);
            }
        }
    }
    while let Some(tight) = queue.pop() {
        for t in 0..facets.len() {
            if tight.contains(&t) {
                continue;
            }
            let mut bigger = tight.clone();
            bigger.insert(t);
            if let Some((vids, rec)) = face_of_tightset(&bigger) {
                let canon = canonical_tight(&vids, &rec);
                if seen.insert((vids, rec), canon.clone()).is_none() {
                    queue.push(canon);
                }
            }
        }
    }

    let mut faces: Vec<Face> = seen
        .into_iter()
        .map(|((vids, recession), tight)| {
            let dim = face_dim(n, vertices, &vids, &recession);
            let support_points: Vec<ExponentVector> = support
                .iter()
                .filter(|m| {
                    let mb = m.to_bigint();
                    tight
                        .iter()
                        .all(|&t| dot_int(&facets[t].normal, &mb) == facets[t].offset)
                })
                .cloned()
                .collect();
            Face {
                id: 0,
                dim,
                tight_facets: tight.into_iter().collect(),
                support_points,
                vertex_ids: vids,
                recession: recession.clone(),
                compact: recession.is_empty(),
            }
        })
        .collect();
    faces.sort_by(|a, b| {
        (a.dim, &a.vertex_ids, &a.recession).cmp(&(b.dim, &b.vertex_ids, &b.recession))
    });
    for (i, fc) in faces.iter_mut().enumerate() {
        fc.id = i;
    }
    faces
}

fn face_dim(n: usize, vertices: &[ExponentVector], vids: &[usize], recession: &[usize]) -> usize {
    let mut span: Vec<RatVec> = Vec::new();
    let base = vertices[vids[0]].to_rational();
    for &v in &vids[1..] {
        span.push(
            vertices[v]
                .to_rational()
                .iter()
                .zip(&base)
                .map(|(a, b)| a - b)
                .collect(),
        );
    }
    for &i in recession {
        let mut e = vec![BigRational::zero(); n];
        e[i] = BigRational::from_integer(1.into());
        span.push(e);
    }
    rank(&span)
}

impl NewtonPolyhedron {
    pub fn face(&self, id: FaceId) -> Result<&Face, NewtonError> {
        self.faces.get(id).ok_or(NewtonError::ForeignFace(id))
    }

    /// Faces filtered to the compact ones.
    pub fn compact_faces(&self) -> impl Iterator<Item = &Face> {
        self.faces.iter().filter(|f| f.compact)
    }

    /// `nu_omega(f) = min omega . mu` over the support.
    pub fn omega_order(&self, omega: &[BigRational]) -> Result<BigRational, NewtonError> {
        self.check_omega(omega)?;
        Ok(self
            .support
            .iter()
            .map(|m| dot_int_rat(&m.to_bigint(), omega))
            .min()
            .expect("nonempty support"))
    }

    /// The face on which `omega` attains its minimum over the polyhedron.
    pub fn first_meet_locus(&self, omega: &[BigRational]) -> Result<&Face, NewtonError> {
        self.check_omega(omega)?;
        let nu = self.omega_order(omega)?;
        let vids: Vec<usize> = self
            .vertices
            .iter()
            .enumerate()
            .filter(|(_, v)| dot_int_rat(&v.to_bigint(), omega) == nu)
            .map(|(i, _)| i)
            .collect();
        let recession: Vec<usize> = (0..self.n).filter(|&i| omega[i].is_zero()).collect();
        self.faces
            .iter()
            .find(|fc| fc.vertex_ids == vids && fc.recession == recession)
            .ok_or(NewtonError::ForeignFace(usize::MAX))
    }

    fn check_omega(&self, omega: &[BigRational]) -> Result<(), NewtonError> {
        if omega.len() != self.n {
            return Err(NewtonError::DimensionMismatch {
                expected: self.n,
                got: omega.len(),
            });
        }
        if omega.iter().any(|x| x.is_negative()) {
            return Err(NewtonError::NegativeOmega);
        }
        Ok(())
    }

    /// Integer-vector convenience for [`Self::omega_order`].
    pub fn omega_order_int(&self, omega: &[i64]) -> Result<BigRational, NewtonError> {
        let w: RatVec = omega.iter().map(|&x| linalg::rat(x)).collect();
        self.omega_order(&w)
    }

    pub fn first_meet_locus_int(&self, omega: &[i64]) -> Result<&Face, NewtonError> {
        let w: RatVec = omega.iter().map(|&x| linalg::rat(x)).collect();
        self.first_meet_locus(&w)
    }

    /// Membership test for a rational point, straight off the H-representation.
    pub fn contains(&self, point: &[BigRational]) -> bool {
        point.iter().all(|x| !x.is_negative())
            && self.facets.iter().all(|fa| {
                dot_int_rat(&fa.normal, point)
                    >= BigRational::from_integer(fa.offset.clone())
            })
    }

    /// The affine-hull region of a face, for restriction.
    pub fn face_region(&self, id: FaceId) -> Result<Region, NewtonError> {
        let face = self.face(id)?;
        let mut region = Region::new(self.n);
        for &t in &face.tight_facets {
            let u: RatVec = int_to_rat(&self.facets[t].normal);
            let b = BigRational::from_integer(self.facets[t].offset.clone());
            region = region.with_hyperplane(u, b);
        }
        Ok(region)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "n": self.n,
            "vertices": self.vertices.iter().map(|v| v.0.clone()).collect::<Vec<_>>(),
            "facets": self.facets.iter().map(|fa| json!({
                "u": fa.normal.iter().map(bigint_to_json).collect::<Vec<_>>(),
                "nu": bigint_to_json(&fa.offset),
            })).collect::<Vec<_>>(),
            "faces": self.faces.iter().map(|fc| json!({
                "dim": fc.dim,
                "tight": fc.tight_facets,
                "compact": fc.compact,
            })).collect::<Vec<_>>(),
        })
    }
}

fn bigint_to_json(x: &BigInt) -> serde_json::Value {
    use num_traits::ToPrimitive;
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

/// The face function `f_F`: terms of `f` supported on the face.
pub fn face_function(
    np: &NewtonPolyhedron,
    f: &LaurentPolynomial,
    id: FaceId,
) -> Result<LaurentPolynomial, NewtonError> {
    let face = np.face(id)?;
    Ok(f.restrict_to_support(&face.support_points))
}

/// Remoteness data of `NP(f)`.
///
/// `t0` is the diagonal boundary parameter: `t0 (1,..,1)` is where the
/// diagonal meets the boundary. `nu0 = min ||u|| / (2 nu_u) = 1 / (2 t0)`
/// under the squared-modulus convention; both are reported.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RemotenessReport {
    pub t0: BigRational,
    pub nu0: BigRational,
    pub attaining_normals: Vec<IntVec>,
}

pub fn remoteness(np: &NewtonPolyhedron) -> Result<RemotenessReport, NewtonError> {
    let mut best: Option<BigRational> = None;
    for facet in np.facets.iter().filter(|fa| fa.has_positive_offset()) {
        let ratio = BigRational::new(facet.offset.clone(), facet.normal_sum());
        if best.as_ref().map_or(true, |b| ratio > *b) {
            best = Some(ratio);
        }
    }
    let t0 = best.ok_or(NewtonError::NoPositiveFacet)?;
    let attaining_normals: Vec<IntVec> = np
        .facets
        .iter()
        .filter(|fa| {
            fa.has_positive_offset()
                && BigRational::new(fa.offset.clone(), fa.normal_sum()) == t0
        })
        .map(|fa| fa.normal.clone())
        .collect();
    let nu0 = BigRational::new(1.into(), 2.into()) / t0.clone();
    Ok(RemotenessReport {
        t0,
        nu0,
        attaining_normals,
    })
}

/// Calls `body` with every `k`-subset of `0..n`, in lexicographic order.
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
        // advance
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
