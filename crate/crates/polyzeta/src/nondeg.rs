//! Arnol'd non-degeneracy of `f` with respect to the faces of `NP(f)`.
//!
//! A face `F` is degenerate when `f_F = 0, grad f_F = 0` has a solution
//! with all coordinates nonzero. Vertices are trivially non-degenerate
//! (monomials do not vanish on the torus) and edges are decided exactly by
//! a univariate squarefreeness test over the Gaussian rationals. Faces of
//! dimension two or more get a randomized damped least-squares witness
//! search and an honest `Unknown` on exhaustion.
//!
//! Every numeric witness is re-checked in exact arithmetic: the point is
//! rounded to a dyadic Gaussian rational, one exact Gauss-Newton step is
//! taken, and the verdict is downgraded to `Unknown` unless the exact
//! residual drops below `REFINED_RESIDUAL_BOUND`.

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::gauss::GaussianRational;
use crate::newton::{self, Face, FaceId, NewtonPolyhedron};
use crate::poly::{ExponentVector, LaurentPolynomial};

/// Exact-refinement acceptance threshold for numeric witnesses.
pub const REFINED_RESIDUAL_BOUND: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct NondegConfig {
    pub seed: u64,
    pub attempts: u32,
    pub tol: f64,
}

impl Default for NondegConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            attempts: 200,
            tol: 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum VerdictStatus {
    /// Exact: only from the monomial or edge-univariate methods.
    NonDegenerate,
    Degenerate {
        witness: Vec<Complex64>,
        residual: f64,
    },
    Unknown {
        attempts: u32,
        tol: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Monomial,
    EdgeUnivariate,
    NumericSearch,
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub face: FaceId,
    pub dim: usize,
    pub compact: bool,
    pub status: VerdictStatus,
    pub method: Method,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Overall {
    NonDegenerate,
    Degenerate,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct NondegReport {
    pub verdicts: Vec<Verdict>,
    pub overall: Overall,
    pub compact_only: bool,
}

impl NondegReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "overall": match self.overall {
                Overall::NonDegenerate => "non-degenerate",
                Overall::Degenerate => "degenerate",
                Overall::Inconclusive => "inconclusive",
            },
            "compact_only": self.compact_only,
            "faces": self.verdicts.iter().map(|v| {
                let mut o = serde_json::Map::new();
                o.insert("face".into(), json!(v.face));
                o.insert("dim".into(), json!(v.dim));
                o.insert("compact".into(), json!(v.compact));
                o.insert("method".into(), json!(match v.method {
                    Method::Monomial => "monomial",
                    Method::EdgeUnivariate => "edge-univariate",
                    Method::NumericSearch => "numeric-search",
                }));
                match &v.status {
                    VerdictStatus::NonDegenerate => {
                        o.insert("status".into(), json!("non-degenerate"));
                    }
                    VerdictStatus::Degenerate { witness, residual } => {
                        o.insert("status".into(), json!("degenerate"));
                        o.insert("witness".into(), json!(witness
                            .iter()
                            .map(|z| json!([z.re, z.im]))
                            .collect::<Vec<_>>()));
                        o.insert("residual".into(), json!(residual));
                    }
                    VerdictStatus::Unknown { attempts, tol } => {
                        o.insert("status".into(), json!("unknown"));
                        o.insert("attempts".into(), json!(attempts));
                        o.insert("tol".into(), json!(tol));
                    }
                }
                serde_json::Value::Object(o)
            }).collect::<Vec<_>>(),
        })
    }
}

/// Data of the univariate reduction of an edge function:
/// `f_F = x^{base} * p(x^{direction})`.
#[derive(Clone, Debug)]
pub struct EdgeReduction {
    pub coeffs: Vec<GaussianRational>,
    pub direction: Vec<i64>,
    pub base: ExponentVector,
}

/// Reduces a one-dimensional face to the univariate polynomial `p` with
/// `f_F = x^{base} p(x^d)`. `f` is non-degenerate with respect to the face
/// iff `p` has no multiple root in `C \ {0}`.
pub fn edge_univariate(
    np: &NewtonPolyhedron,
    f: &LaurentPolynomial,
    face_id: FaceId,
) -> Result<EdgeReduction, newton::NewtonError> {
    let face = np.face(face_id)?;
    assert_eq!(face.dim, 1, "edge reduction needs a one-dimensional face");
    let pts = &face.support_points;
    assert!(pts.len() >= 2, "an edge function has at least two terms");

    let a = pts.iter().min().unwrap().clone();
    let b = pts.iter().max().unwrap().clone();
    let diff = b.sub(&a);
    let dir_big = crate::linalg::primitivize_int(&diff.to_bigint());
    let direction: Vec<i64> = dir_big.iter().map(|x| x.to_i64().unwrap()).collect();
    let k = direction
        .iter()
        .position(|&d| d != 0)
        .expect("nonzero direction");

    let mut js: Vec<(i64, &ExponentVector)> = pts
        .iter()
        .map(|p| {
            let j = (p.0[k] - a.0[k]) / direction[k];
            debug_assert!(p
                .0
                .iter()
                .zip(&a.0)
                .zip(&direction)
                .all(|((pi, ai), di)| pi - ai == j * di));
            (j, p)
        })
        .collect();
    js.sort_by_key(|(j, _)| *j);
    let jmin = js[0].0;
    let base = js[0].1.clone();
    let deg = (js.last().unwrap().0 - jmin) as usize;
    let mut coeffs = vec![GaussianRational::zero(); deg + 1];
    for (j, p) in js {
        coeffs[(j - jmin) as usize] = f.coefficient(p);
    }
    debug_assert!(!coeffs[0].is_zero() && !coeffs[deg].is_zero());
    Ok(EdgeReduction {
        coeffs,
        direction,
        base,
    })
}

// --- univariate polynomials over Q(i) ---

fn uni_degree(p: &[GaussianRational]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

fn uni_derivative(p: &[GaussianRational]) -> Vec<GaussianRational> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c.mul(&GaussianRational::from_int(i as i64)))
        .collect()
}

fn uni_rem(num: &[GaussianRational], den: &[GaussianRational]) -> Vec<GaussianRational> {
    let dd = uni_degree(den).expect("nonzero divisor");
    let lead_inv = den[dd].inv();
    let mut r = num.to_vec();
    while let Some(rd) = uni_degree(&r) {
        if rd < dd {
            break;
        }
        let factor = r[rd].mul(&lead_inv);
        for i in 0..=dd {
            let t = den[i].mul(&factor);
            r[rd - dd + i] -= t;
        }
        r.truncate(rd); // leading term cancelled exactly
    }
    r
}

/// Monic gcd over the field Q(i).
pub fn uni_gcd(p: &[GaussianRational], q: &[GaussianRational]) -> Vec<GaussianRational> {
    let mut a = p.to_vec();
    let mut b = q.to_vec();
    loop {
        let Some(db) = uni_degree(&b) else {
            break;
        };
        let _ = db;
        let r = uni_rem(&a, &b);
        a = b;
        b = r;
    }
    if let Some(da) = uni_degree(&a) {
        let inv = a[da].inv();
        a.truncate(da + 1);
        for c in &mut a {
            *c = c.mul(&inv);
        }
    } else {
        a = vec![];
    }
    a
}

/// All complex roots by Durand-Kerner, deterministic.
fn uni_roots(p: &[GaussianRational]) -> Vec<Complex64> {
    let deg = uni_degree(p).unwrap_or(0);
    if deg == 0 {
        return vec![];
    }
    let c: Vec<Complex64> = p[..=deg].iter().map(|x| x.to_complex64()).collect();
    let eval = |z: Complex64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in (0..=deg).rev() {
            acc = acc * z + c[k];
        }
        acc
    };
    let lead = c[deg];
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..deg).map(|i| seed.powu(i as u32 + 1)).collect();
    for _ in 0..200 {
        let mut max_step = 0.0f64;
        for i in 0..deg {
            let mut denom = lead;
            for j in 0..deg {
                if j != i {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() < 1e-300 {
                continue;
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step < 1e-14 {
            break;
        }
    }
    roots.sort_by(|a, b| {
        (a.re, a.im)
            .partial_cmp(&(b.re, b.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    roots
}

/// Integer vector `c` with `c . d = 1` for primitive `d`.
fn cofactor_vector(d: &[i64]) -> Vec<i64> {
    fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
        if b == 0 {
            (a.abs(), if a >= 0 { 1 } else { -1 }, 0)
        } else {
            let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
            (g, y, x - (a.div_euclid(b)) * y)
        }
    }
    let mut g = 0i64;
    let mut c = vec![0i64; d.len()];
    for i in 0..d.len() {
        if d[i] == 0 {
            continue;
        }
        if g == 0 {
            let (gi, _, yi) = ext_gcd(0, d[i]);
            c[i] = yi;
            g = gi;
        } else {
            let (gi, x, y) = ext_gcd(g, d[i]);
            for cj in c.iter_mut() {
                *cj *= x;
            }
            c[i] = y;
            g = gi;
        }
    }
    debug_assert_eq!(
        d.iter().zip(&c).map(|(a, b)| a * b).sum::<i64>(),
        1,
        "primitive direction has a cofactor"
    );
    c
}

/// Randomized damped least-squares search for a torus solution of
/// `{g = 0, grad g = 0}`. Returns the first float witness found.
pub fn witness_search(
    g: &LaurentPolynomial,
    cfg: &NondegConfig,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<Complex64>> {
    if g.num_terms() <= 1 {
        return None;
    }
    let n = g.dimension();
    let grad = g.gradient();
    let hess: Vec<Vec<LaurentPolynomial>> = grad
        .iter()
        .map(|gi| (1..=n).map(|j| gi.partial(j)).collect())
        .collect();

    let residual = |z: &[Complex64]| -> Vec<Complex64> {
        let mut r = Vec::with_capacity(n + 1);
        r.push(g.evaluate(z));
        for gi in &grad {
            r.push(gi.evaluate(z));
        }
        r
    };
    let res_norm = |r: &[Complex64]| r.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();

    for _ in 0..cfg.attempts {
        let mut z: Vec<Complex64> = (0..n)
            .map(|_| {
                let radius = (rng.gen_range(-1.2f64..1.2f64)).exp();
                let angle = rng.gen_range(0.0..std::f64::consts::TAU);
                Complex64::from_polar(radius, angle)
            })
            .collect();
        let mut lambda = 1e-3;
        let mut r = residual(&z);
        for _ in 0..80 {
            if res_norm(&r) < cfg.tol * 1e-2 {
                break;
            }
            // rows: grad g ; then Hessian rows
            let mut jac: Vec<Vec<Complex64>> = Vec::with_capacity(n + 1);
            jac.push(grad.iter().map(|gi| gi.evaluate(&z)).collect());
            for hi in &hess {
                jac.push(hi.iter().map(|hij| hij.evaluate(&z)).collect());
            }
            // normal equations (J^H J + lambda I) delta = -J^H r
            let mut a = vec![vec![Complex64::new(0.0, 0.0); n]; n];
            let mut b = vec![Complex64::new(0.0, 0.0); n];
            for i in 0..n {
                for j in 0..n {
                    for row in &jac {
                        a[i][j] += row[i].conj() * row[j];
                    }
                }
                a[i][i] += Complex64::new(lambda, 0.0);
                for (row, rk) in jac.iter().zip(&r) {
                    b[i] -= row[i].conj() * rk;
                }
            }
            let Some(delta) = solve_complex(&mut a, &mut b) else {
                break;
            };
            let z_new: Vec<Complex64> = z.iter().zip(&delta).map(|(zi, d)| zi + d).collect();
            let r_new = residual(&z_new);
            if res_norm(&r_new) < res_norm(&r) {
                z = z_new;
                r = r_new;
                lambda = (lambda / 3.0).max(1e-12);
            } else {
                lambda *= 10.0;
                if lambda > 1e10 {
                    break;
                }
            }
        }
        let max_res = r.iter().map(|x| x.norm()).fold(0.0, f64::max);
        let min_coord = z.iter().map(|x| x.norm()).fold(f64::INFINITY, f64::min);
        if max_res < cfg.tol && min_coord > cfg.tol {
            return Some(z);
        }
    }
    None
}

fn solve_complex(a: &mut [Vec<Complex64>], b: &mut [Complex64]) -> Option<Vec<Complex64>> {
    let n = b.len();
    for col in 0..n {
        let (piv, mag) = (col..n)
            .map(|r| (r, a[r][col].norm()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
            .unwrap();
        if mag < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = Complex64::new(1.0, 0.0) / a[col][col];
        for r in (col + 1)..n {
            let factor = a[r][col] * inv;
            if factor.norm() == 0.0 {
                continue;
            }
            for cc in col..n {
                let t = a[col][cc];
                a[r][cc] -= factor * t;
            }
            let t = b[col];
            b[r] -= factor * t;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for cc in (row + 1)..n {
            acc -= a[row][cc] * x[cc];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Exact refinement: rounds the witness to dyadic Gaussian rationals, takes
/// one exact Gauss-Newton step, and evaluates the exact residual.
fn refine_witness(
    g: &LaurentPolynomial,
    witness: &[Complex64],
) -> Option<(Vec<Complex64>, f64)> {
    let n = g.dimension();
    let grad = g.gradient();
    let z0: Vec<GaussianRational> = witness
        .iter()
        .map(|z| GaussianRational::from_complex64_dyadic(*z, 48))
        .collect();

    let eval_all = |z: &[GaussianRational]| -> Option<Vec<GaussianRational>> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(g.evaluate_exact(z).ok()?);
        for gi in &grad {
            out.push(gi.evaluate_exact(z).ok()?);
        }
        Some(out)
    };

    let r0 = eval_all(&z0)?;
    let z1 = if r0.iter().all(|x| x.is_zero()) {
        z0.clone()
    } else {
        let hess: Vec<Vec<LaurentPolynomial>> = grad
            .iter()
            .map(|gi| (1..=n).map(|j| gi.partial(j)).collect())
            .collect();
        let mut jac: Vec<Vec<GaussianRational>> = Vec::with_capacity(n + 1);
        jac.push(
            grad.iter()
                .map(|gi| gi.evaluate_exact(&z0).ok())
                .collect::<Option<_>>()?,
        );
        for hi in &hess {
            jac.push(
                hi.iter()
                    .map(|hij| hij.evaluate_exact(&z0).ok())
                    .collect::<Option<_>>()?,
            );
        }
        // (J^H J) delta = -J^H r over Q(i)
        let mut a = vec![vec![GaussianRational::zero(); n]; n];
        let mut b = vec![GaussianRational::zero(); n];
        for i in 0..n {
            for j in 0..n {
                for row in &jac {
                    a[i][j] += row[i].conj().mul(&row[j]);
                }
            }
            for (row, rk) in jac.iter().zip(&r0) {
                b[i] -= row[i].conj().mul(rk);
            }
        }
        let delta = solve_gaussian(&mut a, &mut b)?;
        z0.iter()
            .zip(&delta)
            .map(|(z, d)| Some(z.clone() + d))
            .collect::<Option<Vec<_>>>()?
    };

    let r1 = eval_all(&z1)?;
    let residual = r1
        .iter()
        .map(|x| x.norm_sq().to_f64().unwrap_or(f64::INFINITY).sqrt())
        .fold(0.0, f64::max);
    let refined: Vec<Complex64> = z1.iter().map(|z| z.to_complex64()).collect();
    if refined.iter().any(|z| z.norm() == 0.0) {
        return None;
    }
    Some((refined, residual))
}

fn solve_gaussian(
    a: &mut [Vec<GaussianRational>],
    b: &mut [GaussianRational],
) -> Option<Vec<GaussianRational>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = a[col][col].inv();
        for r in (col + 1)..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].mul(&inv);
            for cc in col..n {
                let t = factor.mul(&a[col][cc]);
                a[r][cc] -= t;
            }
            let t = factor.mul(&b[col]);
            b[r] -= t;
        }
    }
    let mut x = vec![GaussianRational::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for cc in (row + 1)..n {
            acc -= a[row][cc].mul(&x[cc]);
        }
        x[row] = acc.mul(&a[row][row].inv());
    }
    Some(x)
}

/// Decides non-degeneracy of `f` with respect to one face.
pub fn check_face(
    f: &LaurentPolynomial,
    np: &NewtonPolyhedron,
    face: &Face,
    cfg: &NondegConfig,
) -> Verdict {
    let g = newton::face_function(np, f, face.id).expect("face of this polyhedron");
    let mk = |status, method| Verdict {
        face: face.id,
        dim: face.dim,
        compact: face.compact,
        status,
        method,
    };

    if g.num_terms() == 1 {
        // a monomial never vanishes on the torus
        return mk(VerdictStatus::NonDegenerate, Method::Monomial);
    }

    if face.dim == 1 {
        let edge = edge_univariate(np, f, face.id).expect("dimension checked");
        let dp = uni_derivative(&edge.coeffs);
        let gcd = uni_gcd(&edge.coeffs, &dp);
        let gcd_deg = uni_degree(&gcd).unwrap_or(0);
        if gcd_deg == 0 {
            return mk(VerdictStatus::NonDegenerate, Method::EdgeUnivariate);
        }
        // a multiple nonzero root of p gives an explicit torus witness
        let roots = uni_roots(&gcd);
        let c = cofactor_vector(&edge.direction);
        for t0 in roots {
            if t0.norm() < 1e-12 {
                continue;
            }
            let log_t = t0.ln();
            let witness: Vec<Complex64> = c
                .iter()
                .map(|&ci| (log_t * Complex64::new(ci as f64, 0.0)).exp())
                .collect();
            if let Some((refined, residual)) = refine_witness(&g, &witness) {
                if residual < REFINED_RESIDUAL_BOUND {
                    return mk(
                        VerdictStatus::Degenerate {
                            witness: refined,
                            residual,
                        },
                        Method::EdgeUnivariate,
                    );
                }
            }
        }
        // exact test says degenerate but no certified witness: stay honest
        return mk(
            VerdictStatus::Unknown {
                attempts: 0,
                tol: cfg.tol,
            },
            Method::EdgeUnivariate,
        );
    }

    // dimension >= 2: randomized semi-decision
    let mut rng = ChaCha8Rng::seed_from_u64(
        cfg.seed ^ (face.id as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
    );
    if let Some(witness) = witness_search(&g, cfg, &mut rng) {
        if let Some((refined, residual)) = refine_witness(&g, &witness) {
            if residual < REFINED_RESIDUAL_BOUND {
                return mk(
                    VerdictStatus::Degenerate {
                        witness: refined,
                        residual,
                    },
                    Method::NumericSearch,
                );
            }
        }
    }
    mk(
        VerdictStatus::Unknown {
            attempts: cfg.attempts,
            tol: cfg.tol,
        },
        Method::NumericSearch,
    )
}

/// Aggregates [`check_face`] over all (or all compact) faces.
pub fn check_all(
    f: &LaurentPolynomial,
    np: &NewtonPolyhedron,
    compact_only: bool,
    cfg: &NondegConfig,
) -> NondegReport {
    let verdicts: Vec<Verdict> = np
        .faces
        .iter()
        .filter(|face| !compact_only || face.compact)
        .map(|face| check_face(f, np, face, cfg))
        .collect();
    let overall = if verdicts
        .iter()
        .any(|v| matches!(v.status, VerdictStatus::Degenerate { .. }))
    {
        Overall::Degenerate
    } else if verdicts
        .iter()
        .all(|v| matches!(v.status, VerdictStatus::NonDegenerate))
    {
        Overall::NonDegenerate
    } else {
        Overall::Inconclusive
    };
    NondegReport {
        verdicts,
        overall,
        compact_only,
    }
}

/// Convenience: builds the polyhedron and checks every face.
pub fn check_polynomial(
    f: &LaurentPolynomial,
    compact_only: bool,
    cfg: &NondegConfig,
) -> Result<(NewtonPolyhedron, NondegReport), newton::NewtonError> {
    let np = newton::newton_polyhedron(f)?;
    let report = check_all(f, &np, compact_only, cfg);
    Ok((np, report))
}
