//! Refined candidate poles of the complex local zeta function.
//!
//! For each facet normal `u` of `NP(f)` with `nu_u(f) > 0` the arithmetic
//! progression `P(u) = { -(||u||+k) / (2 nu_u(f)) : k in N }` is a
//! candidate-pole family; all poles lie in the union of these progressions
//! and the half-integer family `-(1+N)/2`. The refined list uses only the
//! facet normals; the naive list, for comparison, uses every ray of a
//! regularized subdivision of the dual fan, which is what a resolution of
//! singularities through toric charts would produce.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde_json::json;
use thiserror::Error;

use crate::fan::{dual_fan, regularize, simplicialize};
use crate::linalg::{dot_int, IntVec};
use crate::newton::{self, NewtonPolyhedron, RemotenessReport};
use crate::nondeg::{check_all, NondegConfig, NondegReport, Overall};
use crate::poly::LaurentPolynomial;

#[derive(Debug, Error)]
pub enum PoleError {
    #[error("the zero polynomial has no zeta function data")]
    ZeroPolynomial,
    #[error("f(0) != 0: the candidate-pole list requires a vanishing constant term")]
    NonzeroConstantTerm,
    #[error("f is degenerate with respect to its Newton polyhedron (face {face}, dim {dim})")]
    DegenerateInput { face: usize, dim: usize },
    #[error("progression undefined: nu_u(f) = 0 for this normal")]
    ZeroOrder,
    #[error("not a facet normal of NP(f)")]
    UnknownNormal,
    #[error(transparent)]
    Newton(#[from] newton::NewtonError),
}

/// The candidate progression attached to one facet normal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoleProgression {
    pub normal: IntVec,
    pub nu: BigInt,
    pub values: Vec<BigRational>,
}

/// `P(u)` truncated at `k = k_max`; `u` must be a facet normal of `NP(f)`
/// with positive offset.
pub fn progression(
    np: &NewtonPolyhedron,
    u: &IntVec,
    k_max: u32,
) -> Result<PoleProgression, PoleError> {
    let facet = np
        .facets
        .iter()
        .find(|fa| &fa.normal == u)
        .ok_or(PoleError::UnknownNormal)?;
    if !facet.offset.is_positive() {
        return Err(PoleError::ZeroOrder);
    }
    Ok(progression_unchecked(u, &facet.offset, k_max))
}

fn progression_unchecked(u: &IntVec, nu: &BigInt, k_max: u32) -> PoleProgression {
    let norm: BigInt = u.iter().sum();
    let two_nu = BigInt::from(2) * nu;
    let values = (0..=k_max)
        .map(|k| -BigRational::new(&norm + BigInt::from(k), two_nu.clone()))
        .collect();
    PoleProgression {
        normal: u.clone(),
        nu: nu.clone(),
        values,
    }
}

/// Is `value` a member of the (infinite) progression `P(u)`?
fn in_progression(value: &BigRational, norm: &BigInt, nu: &BigInt) -> bool {
    // -(||u|| + k) / (2 nu) = value  <=>  k = -2 nu value - ||u|| in N
    let k = -value * BigRational::from_integer(BigInt::from(2) * nu)
        - BigRational::from_integer(norm.clone());
    k.is_integer() && !k.numer().is_negative()
}

fn in_half_family(value: &BigRational) -> bool {
    let k = -value * BigRational::from_integer(2.into()) - BigRational::one();
    k.is_integer() && !k.numer().is_negative()
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum PoleSource {
    /// A facet normal of `NP(f)` (or a subdivision ray in the naive list).
    Normal(IntVec),
    HalfIntegers,
}

#[derive(Clone, Debug)]
pub struct PoleEntry {
    pub value: BigRational,
    pub sources: Vec<PoleSource>,
    pub order_bound: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Hypothesis {
    /// Every checked face carries an exact non-degenerate verdict.
    Verified,
    /// Some faces are undecided; candidates hold if `f` is non-degenerate.
    Inconclusive,
    /// Forced past a degenerate verdict; the theorem does not apply.
    Unverified,
}

/// The truncated candidate-pole list with provenance and order bounds.
#[derive(Clone, Debug)]
pub struct CandidatePoleSet {
    pub k_max: u32,
    pub entries: Vec<PoleEntry>,
    pub holomorphy_bound: BigRational,
    pub remoteness: RemotenessReport,
    pub hypothesis: Hypothesis,
    /// The candidates constrain zeta functions of cutoff functions
    /// supported in a small enough neighborhood of the origin.
    pub caveat: &'static str,
    /// How order bounds quantify over facets.
    pub order_bound_note: &'static str,
}

const CAVEAT: &str = "candidates apply to test functions supported in a \
                      sufficiently small neighborhood of the origin";
const ORDER_NOTE: &str = "order bound requires s0 in P(u) for every facet \
                          containing the face";

impl CandidatePoleSet {
    pub fn values(&self) -> Vec<BigRational> {
        self.entries.iter().map(|e| e.value.clone()).collect()
    }

    pub fn entry(&self, value: &BigRational) -> Option<&PoleEntry> {
        self.entries.iter().find(|e| &e.value == value)
    }

    pub fn top_value(&self) -> Option<&BigRational> {
        self.entries.first().map(|e| &e.value)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "k_max": self.k_max,
            "holomorphy_bound": self.holomorphy_bound.to_string(),
            "remoteness": {
                "t0": self.remoteness.t0.to_string(),
                "nu0": self.remoteness.nu0.to_string(),
                "attaining_normals": self.remoteness.attaining_normals.iter()
                    .map(|u| normal_json(u)).collect::<Vec<_>>(),
            },
            "hypothesis": match self.hypothesis {
                Hypothesis::Verified => "verified",
                Hypothesis::Inconclusive => "inconclusive",
                Hypothesis::Unverified => "hypothesis-unverified",
            },
            "caveat": self.caveat,
            "order_bound_note": self.order_bound_note,
            "candidates": self.entries.iter().map(|e| json!({
                "value": e.value.to_string(),
                "sources": e.sources.iter().map(|s| match s {
                    PoleSource::Normal(u) => normal_json(u),
                    PoleSource::HalfIntegers => json!("half-integers"),
                }).collect::<Vec<_>>(),
                "order_bound": e.order_bound,
            })).collect::<Vec<_>>(),
        })
    }
}

fn normal_json(u: &IntVec) -> serde_json::Value {
    json!(u
        .iter()
        .map(|x| x.to_i64().map(serde_json::Value::from).unwrap_or_else(|| json!(x.to_string())))
        .collect::<Vec<_>>())
}

/// `max{-nu0(f), -1/2}`: the half-plane of guaranteed holomorphy.
pub fn holomorphy_bound(np: &NewtonPolyhedron) -> Result<BigRational, PoleError> {
    let rem = newton::remoteness(np)?;
    let minus_half = -BigRational::new(1.into(), 2.into());
    Ok((-rem.nu0.clone()).max(minus_half))
}

fn merge_progressions(
    progressions: &[PoleProgression],
    k_max: u32,
) -> BTreeMap<BigRational, Vec<PoleSource>> {
    let mut merged: BTreeMap<BigRational, Vec<PoleSource>> = BTreeMap::new();
    for p in progressions {
        for v in &p.values {
            merged
                .entry(v.clone())
                .or_default()
                .push(PoleSource::Normal(p.normal.clone()));
        }
    }
    // half-integer family, truncated at the deepest progression value
    let cutoff = progressions
        .iter()
        .filter_map(|p| p.values.last().cloned())
        .min();
    if let Some(cutoff) = cutoff {
        let mut k = 0u32;
        loop {
            let v = -BigRational::new(BigInt::from(1 + i64::from(k)), 2.into());
            if v < cutoff || k > 2 * k_max + 2 {
                break;
            }
            merged.entry(v).or_default().push(PoleSource::HalfIntegers);
            k += 1;
        }
        // values already present that happen to be half-integers also
        // record the family as a source
        for (v, sources) in merged.iter_mut() {
            if in_half_family(v) && !sources.contains(&PoleSource::HalfIntegers) {
                sources.push(PoleSource::HalfIntegers);
            }
        }
    }
    merged
}

fn order_bound_refined(np: &NewtonPolyhedron, value: &BigRational) -> usize {
    let n = np.n;
    let facet_ok: Vec<bool> = np
        .facets
        .iter()
        .map(|fa| {
            fa.offset.is_positive() && in_progression(value, &fa.normal_sum(), &fa.offset)
        })
        .collect();
    let max_codim = np
        .faces
        .iter()
        .filter(|face| face.tight_facets.iter().all(|&t| facet_ok[t]))
        .map(|face| face.codim(n))
        .max()
        .unwrap_or(0);
    if in_half_family(value) {
        (1 + max_codim).min(n)
    } else {
        max_codim.clamp(1, n)
    }
}

fn build_set(
    np: &NewtonPolyhedron,
    progressions: &[PoleProgression],
    k_max: u32,
    hypothesis: Hypothesis,
    order_bound: impl Fn(&BigRational) -> usize,
) -> Result<CandidatePoleSet, PoleError> {
    let remoteness = newton::remoteness(np)?;
    let bound = holomorphy_bound(np)?;
    let merged = merge_progressions(progressions, k_max);
    let entries: Vec<PoleEntry> = merged
        .into_iter()
        .rev() // descending: closest to zero first
        .map(|(value, mut sources)| {
            sources.sort();
            sources.dedup();
            let order = order_bound(&value);
            PoleEntry {
                value,
                sources,
                order_bound: order,
            }
        })
        .collect();
    debug_assert!(entries.iter().all(|e| e.value.is_negative()));
    debug_assert!(entries.first().map_or(true, |top| top.value <= bound));
    Ok(CandidatePoleSet {
        k_max,
        entries,
        holomorphy_bound: bound,
        remoteness,
        hypothesis,
        caveat: CAVEAT,
        order_bound_note: ORDER_NOTE,
    })
}

fn check_hypothesis(report: &NondegReport) -> Result<Hypothesis, PoleError> {
    match report.overall {
        Overall::Degenerate => {
            let v = report
                .verdicts
                .iter()
                .find(|v| matches!(v.status, crate::nondeg::VerdictStatus::Degenerate { .. }))
                .expect("degenerate overall has a degenerate face");
            Err(PoleError::DegenerateInput {
                face: v.face,
                dim: v.dim,
            })
        }
        Overall::NonDegenerate => Ok(Hypothesis::Verified),
        Overall::Inconclusive => Ok(Hypothesis::Inconclusive),
    }
}

fn require_vanishing_origin(f: &LaurentPolynomial) -> Result<(), PoleError> {
    if f.is_zero() {
        return Err(PoleError::ZeroPolynomial);
    }
    if !f.constant_term().is_zero() {
        return Err(PoleError::NonzeroConstantTerm);
    }
    Ok(())
}

fn facet_progressions(np: &NewtonPolyhedron, k_max: u32) -> Vec<PoleProgression> {
    np.facets
        .iter()
        .filter(|fa| fa.offset.is_positive())
        .map(|fa| progression_unchecked(&fa.normal, &fa.offset, k_max))
        .collect()
}

/// The refined candidate-pole set: progressions over the facet normals of
/// `NP(f)` with positive offset, merged with the half-integer family.
///
/// Refuses degenerate input; an inconclusive non-degeneracy report is
/// carried in the `hypothesis` field.
pub fn candidate_poles(
    f: &LaurentPolynomial,
    k_max: u32,
    compact_only_nondeg: bool,
    cfg: &NondegConfig,
) -> Result<CandidatePoleSet, PoleError> {
    require_vanishing_origin(f)?;
    let np = newton::newton_polyhedron(f)?;
    let report = check_all(f, &np, compact_only_nondeg, cfg);
    let hypothesis = check_hypothesis(&report)?;
    let progs = facet_progressions(&np, k_max);
    build_set(&np, &progs, k_max, hypothesis, |v| {
        order_bound_refined(&np, v)
    })
}

/// As [`candidate_poles`], but proceeds past a degenerate verdict and tags
/// the output `Hypothesis::Unverified`.
pub fn candidate_poles_forced(
    f: &LaurentPolynomial,
    k_max: u32,
    compact_only_nondeg: bool,
    cfg: &NondegConfig,
) -> Result<CandidatePoleSet, PoleError> {
    require_vanishing_origin(f)?;
    let np = newton::newton_polyhedron(f)?;
    let report = check_all(f, &np, compact_only_nondeg, cfg);
    let hypothesis = check_hypothesis(&report).unwrap_or(Hypothesis::Unverified);
    let progs = facet_progressions(&np, k_max);
    build_set(&np, &progs, k_max, hypothesis, |v| {
        order_bound_refined(&np, v)
    })
}

/// Re-annotates the order bounds of a set against a polyhedron.
pub fn order_bounds(set: &mut CandidatePoleSet, np: &NewtonPolyhedron) {
    for e in &mut set.entries {
        e.order_bound = order_bound_refined(np, &e.value);
    }
}

/// The longer list a toric-resolution approach produces: progressions over
/// every ray of `regularize(simplicialize(Sigma(f)))` with positive
/// omega-order. Order bounds count progression memberships per chart.
pub fn naive_candidates(
    f: &LaurentPolynomial,
    k_max: u32,
    compact_only_nondeg: bool,
    cfg: &NondegConfig,
) -> Result<CandidatePoleSet, PoleError> {
    require_vanishing_origin(f)?;
    let np = newton::newton_polyhedron(f)?;
    let report = check_all(f, &np, compact_only_nondeg, cfg);
    let hypothesis = check_hypothesis(&report)?;

    let fan = regularize(&simplicialize(&dual_fan(&np))).expect("dual fan refines to regular");
    let nu_of = |u: &IntVec| -> BigInt {
        np.support
            .iter()
            .map(|m| dot_int(u, &m.to_bigint()))
            .min()
            .expect("nonempty support")
    };
    let progs: Vec<PoleProgression> = fan
        .rays()
        .iter()
        .filter_map(|u| {
            let nu = nu_of(u);
            nu.is_positive().then(|| progression_unchecked(u, &nu, k_max))
        })
        .collect();

    // per-chart order bounds: in each max cone count the rays whose
    // progression contains the value
    let charts: Vec<Vec<(BigInt, BigInt)>> = fan
        .max_cone_ids()
        .iter()
        .map(|&i| {
            fan.cone_rays(i)
                .iter()
                .map(|u| (u.iter().sum(), nu_of(u)))
                .collect()
        })
        .collect();
    let n = np.n;
    build_set(&np, &progs, k_max, hypothesis, move |v| {
        let count = charts
            .iter()
            .map(|chart| {
                chart
                    .iter()
                    .filter(|(norm, nu)| nu.is_positive() && in_progression(v, norm, nu))
                    .count()
            })
            .max()
            .unwrap_or(0);
        if in_half_family(v) {
            (1 + count).min(n)
        } else {
            count.clamp(1, n)
        }
    })
}

/// The monomial-integral model `I(s) = \int phi x^{2sm + nu - 1} |g|^{2s}`
/// with `g` nonvanishing on the support: holomorphy bound and candidate
/// poles, used as a consistency reference. Candidates falling inside the
/// holomorphy region are pruned (they are provably not poles).
#[derive(Clone, Debug)]
pub struct MonomialIntegralModel {
    pub m: Vec<u64>,
    pub nu: Vec<u64>,
}

impl MonomialIntegralModel {
    /// `max{-1, -nu_i / (2 m_i)}` over coordinates with `m_i > 0`.
    pub fn holomorphy_bound(&self) -> BigRational {
        let mut bound = -BigRational::one();
        for (&m, &nu) in self.m.iter().zip(&self.nu) {
            if m > 0 {
                let b = -BigRational::new(BigInt::from(nu), BigInt::from(2 * m));
                if b > bound {
                    bound = b;
                }
            }
        }
        bound
    }

    pub fn candidates(&self, k_max: u32) -> Vec<BigRational> {
        let bound = self.holomorphy_bound();
        let mut out: Vec<BigRational> = Vec::new();
        for (&m, &nu) in self.m.iter().zip(&self.nu) {
            if m == 0 {
                continue;
            }
            for k in 0..=k_max {
                out.push(-BigRational::new(
                    BigInt::from(nu + u64::from(k)),
                    BigInt::from(2 * m),
                ));
            }
        }
        for k in 0..=k_max {
            out.push(-BigRational::new(BigInt::from(1 + u64::from(k)), 2.into()));
        }
        out.retain(|v| *v <= bound);
        out.sort();
        out.dedup();
        out.reverse();
        out
    }
}
