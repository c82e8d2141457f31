//! Desk-scale numerical validation of the candidate-pole predictions:
//! polar-grid quadrature of `Z_phi(s, f)` for one or two complex
//! variables, closed-form monomial references, and a holomorphy probe.
//!
//! The test function is the polynomial bump `(1 - r^2/R^2)^p` on each
//! coordinate disc. Quadrature is a tensor-product midpoint rule in polar
//! coordinates, no adaptivity; error estimates come from doubling the
//! radial grid. Accumulation uses a fixed pairwise tree reduction so a
//! given grid always produces bit-identical results.

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde_json::json;
use thiserror::Error;

use crate::newton;
use crate::poly::LaurentPolynomial;

#[derive(Debug, Error)]
pub enum ZetaError {
    #[error("quadrature supports at most two variables, got {0}")]
    DimensionTooLarge(usize),
    #[error("direct quadrature requires Re(s) > 0")]
    NonpositiveRealPart,
    #[error("s hits a pole of the reference product")]
    PoleInput,
    #[error("grid resolutions must be at least 2")]
    BadGrid,
    #[error("bump radius must be positive")]
    BadBump,
    #[error(transparent)]
    Newton(#[from] newton::NewtonError),
}

/// The cutoff `phi(x) = prod_i (1 - |x_i|^2 / R^2)^p` on the polydisc of
/// radius `R`, zero outside. `p = 0` is the raw indicator.
#[derive(Clone, Copy, Debug)]
pub struct BumpSpec {
    pub radius: f64,
    pub smoothness: u32,
}

impl BumpSpec {
    pub fn new(radius: f64, smoothness: u32) -> Result<Self, ZetaError> {
        if !(radius > 0.0) {
            return Err(ZetaError::BadBump);
        }
        Ok(Self { radius, smoothness })
    }

    fn eval_radial(&self, r: f64) -> f64 {
        let t = 1.0 - (r / self.radius) * (r / self.radius);
        if t <= 0.0 {
            0.0
        } else {
            t.powi(self.smoothness as i32)
        }
    }
}

/// Per-variable polar resolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridSpec {
    pub radial: usize,
    pub angular: usize,
}

impl GridSpec {
    pub fn new(radial: usize, angular: usize) -> Result<Self, ZetaError> {
        if radial < 2 || angular < 2 {
            return Err(ZetaError::BadGrid);
        }
        Ok(Self { radial, angular })
    }

    fn double_radial(self) -> Self {
        Self {
            radial: self.radial * 2,
            angular: self.angular,
        }
    }

    fn halve_radial(self) -> Self {
        Self {
            radial: (self.radial / 2).max(2),
            angular: self.angular,
        }
    }
}

/// One quadrature sample of `Z_phi(s, f)`.
#[derive(Clone, Debug)]
pub struct ZetaSample {
    pub s: Complex64,
    pub value: Complex64,
    pub grid: GridSpec,
    /// Radial grid-doubling comparison: difference between this grid and
    /// the one with half the radial resolution.
    pub est_error: f64,
}

impl ZetaSample {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "s_re": self.s.re,
            "s_im": self.s.im,
            "value_re": self.value.re,
            "value_im": self.value.im,
            "est_error": self.est_error,
        })
    }

    pub const CSV_HEADER: &'static str = "s_re,s_im,value_re,value_im,est_error";

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.s.re, self.s.im, self.value.re, self.value.im, self.est_error
        )
    }
}

/// Exact value of `int_{|x|<=1} (1-|x|^2)^p |x^m|^{2s} dA`:
/// `pi p! / prod_{j=1}^{p+1} (m s + j)`, poles at `s = -j/m`.
pub fn monomial_reference(m: u32, p: u32, s: Complex64) -> Result<Complex64, ZetaError> {
    assert!(m >= 1, "monomial exponent must be positive");
    let mut value = Complex64::new(std::f64::consts::PI, 0.0);
    for j in 1..=p {
        value *= j as f64;
    }
    for j in 1..=(p + 1) {
        let factor = s * (m as f64) + (j as f64);
        if factor.norm() < 1e-12 {
            return Err(ZetaError::PoleInput);
        }
        value /= factor;
    }
    Ok(value)
}

/// Polynomial terms flattened to machine numbers for the inner loop.
struct CompiledPoly {
    terms: Vec<(Vec<i32>, Complex64)>,
}

impl CompiledPoly {
    fn new(f: &LaurentPolynomial) -> Self {
        Self {
            terms: f
                .terms()
                .map(|(e, c)| {
                    (
                        e.0.iter().map(|&k| k as i32).collect(),
                        c.to_complex64(),
                    )
                })
                .collect(),
        }
    }

    fn eval(&self, z: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (exps, coef) in &self.terms {
            let mut t = *coef;
            for (zi, &e) in z.iter().zip(exps) {
                if e != 0 {
                    t *= zi.powi(e);
                }
            }
            acc += t;
        }
        acc
    }
}

struct PolarGrid {
    radii: Vec<f64>,
    weights: Vec<f64>, // r * dr * dtheta, bump premultiplied
    angles: Vec<Complex64>,
}

impl PolarGrid {
    fn new(bump: &BumpSpec, grid: GridSpec) -> Self {
        let dr = bump.radius / grid.radial as f64;
        let dtheta = std::f64::consts::TAU / grid.angular as f64;
        let radii: Vec<f64> = (0..grid.radial).map(|k| (k as f64 + 0.5) * dr).collect();
        let weights = radii
            .iter()
            .map(|&r| bump.eval_radial(r) * r * dr * dtheta)
            .collect();
        let angles = (0..grid.angular)
            .map(|l| Complex64::from_polar(1.0, (l as f64 + 0.5) * dtheta))
            .collect();
        Self {
            radii,
            weights,
            angles,
        }
    }

    fn cells(&self) -> usize {
        self.radii.len() * self.angles.len()
    }

    fn cell(&self, idx: usize) -> (Complex64, f64) {
        let ir = idx / self.angles.len();
        let ia = idx % self.angles.len();
        (self.angles[ia] * self.radii[ir], self.weights[ir])
    }
}

/// Raw quadrature; no sign restriction on `Re(s)` (the probe runs below
/// zero on purpose). Cells where `f` vanishes exactly are skipped.
fn quadrature_raw(
    poly: &CompiledPoly,
    n: usize,
    bump: &BumpSpec,
    s: Complex64,
    grid: GridSpec,
) -> Complex64 {
    let pg = PolarGrid::new(bump, grid);
    let two_s = s * 2.0;
    let term = |idx: usize| -> Complex64 {
        let (z, w) = match n {
            1 => {
                let (z0, w0) = pg.cell(idx);
                (vec![z0], w0)
            }
            _ => {
                let per = pg.cells();
                let (z0, w0) = pg.cell(idx / per);
                let (z1, w1) = pg.cell(idx % per);
                (vec![z0, z1], w0 * w1)
            }
        };
        let fv = poly.eval(&z).norm();
        if fv == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        (two_s * fv.ln()).exp() * w
    };
    let total = if n == 1 {
        pg.cells()
    } else {
        pg.cells() * pg.cells()
    };
    tree_sum(&term, 0, total)
}

/// Deterministic pairwise reduction over the cell index range.
fn tree_sum(term: &dyn Fn(usize) -> Complex64, lo: usize, hi: usize) -> Complex64 {
    if hi - lo <= 64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in lo..hi {
            acc += term(i);
        }
        return acc;
    }
    let mid = lo + (hi - lo) / 2;
    tree_sum(term, lo, mid) + tree_sum(term, mid, hi)
}

/// Tensor polar midpoint quadrature of
/// `Z_phi(s, f) = int phi(x) |f(x)|^{2s} |dx|` for `n <= 2`, `Re(s) > 0`.
pub fn zeta_quadrature(
    f: &LaurentPolynomial,
    bump: &BumpSpec,
    s: Complex64,
    grid: GridSpec,
) -> Result<ZetaSample, ZetaError> {
    let n = f.dimension();
    if n > 2 || n == 0 {
        return Err(ZetaError::DimensionTooLarge(n));
    }
    if !(s.re > 0.0) {
        return Err(ZetaError::NonpositiveRealPart);
    }
    if grid.radial < 2 || grid.angular < 2 {
        return Err(ZetaError::BadGrid);
    }
    let poly = CompiledPoly::new(f);
    let value = quadrature_raw(&poly, n, bump, s, grid);
    let coarse = quadrature_raw(&poly, n, bump, s, grid.halve_radial());
    Ok(ZetaSample {
        s,
        value,
        grid,
        est_error: (value - coarse).norm(),
    })
}

/// Stability threshold of the holomorphy probe: a relative change above
/// this under radial grid doubling counts as divergence-like growth.
pub const PROBE_CHANGE_THRESHOLD: f64 = 0.10;

/// Margin above the holomorphy bound inside which stability is guaranteed.
pub const PROBE_GUARANTEE_MARGIN: f64 = 0.02;

#[derive(Clone, Debug)]
pub struct ProbeEntry {
    pub s: Complex64,
    pub coarse: Complex64,
    pub fine: Complex64,
    pub rel_change: f64,
    pub stable: bool,
    /// `Re(s)` exceeds the holomorphy bound by the guarantee margin.
    pub within_guarantee: bool,
}

#[derive(Clone, Debug)]
pub struct ProbeReport {
    pub holomorphy_bound: f64,
    pub entries: Vec<ProbeEntry>,
}

impl ProbeReport {
    /// Instability inside the guaranteed half-plane: a theorem violation
    /// (and, in practice, an implementation bug).
    pub fn violations(&self) -> Vec<&ProbeEntry> {
        self.entries
            .iter()
            .filter(|e| e.within_guarantee && !e.stable)
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "holomorphy_bound": self.holomorphy_bound,
            "entries": self.entries.iter().map(|e| json!({
                "s_re": e.s.re,
                "s_im": e.s.im,
                "coarse_re": e.coarse.re,
                "coarse_im": e.coarse.im,
                "fine_re": e.fine.re,
                "fine_im": e.fine.im,
                "rel_change": e.rel_change,
                "stable": e.stable,
                "within_guarantee": e.within_guarantee,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Probes grid stability of the quadrature along a list of `s` values.
///
/// Stability is guaranteed only for `Re(s)` at least
/// [`PROBE_GUARANTEE_MARGIN`] above the holomorphy bound; values below the
/// bound are evaluated anyway and typically show the flagged growth.
pub fn holomorphy_probe(
    f: &LaurentPolynomial,
    bump: &BumpSpec,
    s_values: &[Complex64],
    grid: GridSpec,
) -> Result<ProbeReport, ZetaError> {
    let n = f.dimension();
    if n > 2 || n == 0 {
        return Err(ZetaError::DimensionTooLarge(n));
    }
    let np = newton::newton_polyhedron(f)?;
    let rem = newton::remoteness(&np)?;
    let bound = (-rem.nu0.to_f64().unwrap()).max(-0.5);

    let poly = CompiledPoly::new(f);
    let entries = s_values
        .iter()
        .map(|&s| {
            let coarse = quadrature_raw(&poly, n, bump, s, grid);
            let fine = quadrature_raw(&poly, n, bump, s, grid.double_radial());
            let denom = coarse.norm().max(f64::MIN_POSITIVE);
            let rel_change = (fine - coarse).norm() / denom;
            let stable =
                coarse.is_finite() && fine.is_finite() && rel_change <= PROBE_CHANGE_THRESHOLD;
            ProbeEntry {
                s,
                coarse,
                fine,
                rel_change,
                stable,
                within_guarantee: s.re >= bound + PROBE_GUARANTEE_MARGIN,
            }
        })
        .collect();
    Ok(ProbeReport {
        holomorphy_bound: bound,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn reference_closed_forms() {
        // m=1, p=0, s=1: pi/2
        let v = monomial_reference(1, 0, c(1.0, 0.0)).unwrap();
        assert!((v - c(std::f64::consts::PI / 2.0, 0.0)).norm() < 1e-14);
        // m=2, p=1: pi / ((2s+1)(2s+2))
        let s = c(0.7, 0.3);
        let v = monomial_reference(2, 1, s).unwrap();
        let expect = std::f64::consts::PI / ((s * 2.0 + 1.0) * (s * 2.0 + 2.0));
        assert!((v - expect).norm() < 1e-14);
        // pole input rejected
        assert!(matches!(
            monomial_reference(2, 1, c(-0.5, 0.0)),
            Err(ZetaError::PoleInput)
        ));
    }

    #[test]
    fn reference_poles_are_candidates() {
        use crate::nondeg::NondegConfig;
        use crate::poles::candidate_poles;
        use num_rational::BigRational;
        // poles -j/m of the closed form lie in P(u=1) union -(1+N)/2
        for m in 1..=5u32 {
            let f = parse(&format!("x1^{m}"), 1).unwrap();
            let set = candidate_poles(&f, 25, true, &NondegConfig::default()).unwrap();
            let values = set.values();
            for j in 1..=3u32 {
                let target = -BigRational::new(j.into(), m.into());
                assert!(values.contains(&target), "-{j}/{m} missing");
            }
        }
    }

    #[test]
    fn quadrature_matches_reference_1d() {
        let f = parse("x1", 1).unwrap();
        let bump = BumpSpec::new(1.0, 0).unwrap();
        let grid = GridSpec::new(2048, 4).unwrap();
        let sample = zeta_quadrature(&f, &bump, c(1.0, 0.0), grid).unwrap();
        let reference = monomial_reference(1, 0, c(1.0, 0.0)).unwrap();
        assert!((sample.value - reference).norm() / reference.norm() < 1e-6);
    }

    #[test]
    fn quadrature_self_convergence_cusp() {
        let f = parse("x1^2 + x2^3", 2).unwrap();
        let bump = BumpSpec::new(1.0, 1).unwrap();
        let a = zeta_quadrature(&f, &bump, c(1.0, 0.0), GridSpec::new(64, 64).unwrap()).unwrap();
        let b = zeta_quadrature(&f, &bump, c(1.0, 0.0), GridSpec::new(128, 128).unwrap()).unwrap();
        assert!((a.value - b.value).norm() / b.value.norm() < 1e-3);
    }

    #[test]
    fn real_s_gives_real_nonnegative_value() {
        let f = parse("x1^2 + x2^3", 2).unwrap();
        let bump = BumpSpec::new(1.0, 1).unwrap();
        let sample =
            zeta_quadrature(&f, &bump, c(0.75, 0.0), GridSpec::new(32, 16).unwrap()).unwrap();
        assert!(sample.value.re > 0.0);
        assert!(sample.value.im.abs() <= sample.est_error + 1e-12);
    }

    #[test]
    fn quadrature_validates_input() {
        let f = parse("x1*x2*x3", 3).unwrap();
        let bump = BumpSpec::new(1.0, 1).unwrap();
        let grid = GridSpec::new(8, 8).unwrap();
        assert!(matches!(
            zeta_quadrature(&f, &bump, c(1.0, 0.0), grid),
            Err(ZetaError::DimensionTooLarge(3))
        ));
        let f = parse("x1", 1).unwrap();
        assert!(matches!(
            zeta_quadrature(&f, &bump, c(-0.2, 0.0), grid),
            Err(ZetaError::NonpositiveRealPart)
        ));
    }

    #[test]
    fn scaling_covariance() {
        // Z_{c f}(s) = |c|^{2s} Z_f(s)
        let f = parse("x1^2 + x2^3", 2).unwrap();
        let g = parse("2*x1^2 + 2*x2^3", 2).unwrap();
        let bump = BumpSpec::new(1.0, 1).unwrap();
        let grid = GridSpec::new(48, 24).unwrap();
        let s = c(0.8, 0.0);
        let zf = zeta_quadrature(&f, &bump, s, grid).unwrap().value;
        let zg = zeta_quadrature(&g, &bump, s, grid).unwrap().value;
        let factor = (s * 2.0 * 2.0f64.ln()).exp();
        assert!((zg - factor * zf).norm() / zg.norm() < 1e-12);
    }

    #[test]
    fn support_monotonicity() {
        let f = parse("x1^2 + x2^3", 2).unwrap();
        let grid = GridSpec::new(48, 16).unwrap();
        let s = c(1.0, 0.0);
        let big = zeta_quadrature(&f, &BumpSpec::new(1.0, 1).unwrap(), s, grid)
            .unwrap()
            .value;
        let small = zeta_quadrature(&f, &BumpSpec::new(0.5, 1).unwrap(), s, grid)
            .unwrap()
            .value;
        assert!(small.norm() < big.norm());
    }

    #[test]
    fn probe_stable_inside_half_plane() {
        let f = parse("x1^2 + x2^3", 2).unwrap();
        let bump = BumpSpec::new(1.0, 1).unwrap();
        let report = holomorphy_probe(
            &f,
            &bump,
            &[c(-0.3, 0.0), c(-0.2, 0.0), c(-0.1, 0.0)],
            GridSpec::new(16, 8).unwrap(),
        )
        .unwrap();
        assert!((report.holomorphy_bound - (-5.0 / 12.0)).abs() < 1e-12);
        assert!(report.entries.iter().all(|e| e.stable && e.within_guarantee));
        assert!(report.violations().is_empty());
    }

    #[test]
    fn probe_flags_instability_below_bound() {
        let f = parse("x1", 1).unwrap();
        let bump = BumpSpec::new(1.0, 2).unwrap();
        let report = holomorphy_probe(
            &f,
            &bump,
            &[c(-0.9, 0.0)],
            GridSpec::new(8, 8).unwrap(),
        )
        .unwrap();
        assert!((report.holomorphy_bound - (-0.5)).abs() < 1e-12);
        let e = &report.entries[0];
        assert!(!e.within_guarantee);
        assert!(!e.stable, "rel change {} should exceed 10%", e.rel_change);
        // instability below the bound is expected, not a violation
        assert!(report.violations().is_empty());
    }

    #[test]
    fn probe_stable_in_convergence_region() {
        for text in ["x1", "x1^2 + x2^3", "x1*x2"] {
            let n = if text.contains("x2") { 2 } else { 1 };
            let f = parse(text, n).unwrap();
            let bump = BumpSpec::new(1.0, 1).unwrap();
            let report = holomorphy_probe(
                &f,
                &bump,
                &[c(0.5, 0.0)],
                GridSpec::new(16, 8).unwrap(),
            )
            .unwrap();
            assert!(report.entries[0].stable);
        }
    }

    #[test]
    fn twenty_reference_cases_within_tolerance() {
        let bump0 = BumpSpec::new(1.0, 0).unwrap();
        let bump1 = BumpSpec::new(1.0, 1).unwrap();
        let grid1 = GridSpec::new(2048, 4).unwrap();
        let mut cases = 0;
        for m in 1..=4u32 {
            for (p, bump) in [(0u32, &bump0), (1u32, &bump1)] {
                for s in [c(0.5, 0.0), c(1.0, 0.0)] {
                    let f = parse(&format!("x1^{m}"), 1).unwrap();
                    let sample = zeta_quadrature(&f, bump, s, grid1).unwrap();
                    let reference = monomial_reference(m, p, s).unwrap();
                    let rel = (sample.value - reference).norm() / reference.norm();
                    assert!(rel < 1e-5, "m={m} p={p} s={s}: rel {rel}");
                    cases += 1;
                }
            }
        }
        assert_eq!(cases, 16);
    }
}
