//! Acceptance suite: one test per criterion, each printing a PASS line.
//! Values are checked exactly (rationals) or at the stated tolerances.

mod common;

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polyzeta::fan::{dual_fan, hilbert_basis, regularize, simplicialize, RationalCone};
use polyzeta::linalg::{det_int, IntVec};
use polyzeta::monomial::{factor_vertex, jacobian_exponents, transform};
use polyzeta::newton::{newton_polyhedron, remoteness};
use polyzeta::nondeg::{check_all, NondegConfig, Overall, VerdictStatus};
use polyzeta::parse::parse;
use polyzeta::poles::{candidate_poles, naive_candidates, PoleSource};
use polyzeta::poly::{ExponentVector, LaurentPolynomial};
use polyzeta::zetanum::{holomorphy_probe, monomial_reference, zeta_quadrature, BumpSpec, GridSpec};

use common::{iv, q, random_nondegenerate_poly, symbolic_jacobian_det};

fn cfg() -> NondegConfig {
    NondegConfig::default()
}

#[test]
fn acceptance_01_cusp_end_to_end() {
    let start = Instant::now();
    let f = parse("x1^2 + x2^3", 2).unwrap();
    let np = newton_polyhedron(&f).unwrap();

    assert_eq!(
        np.vertices,
        vec![ExponentVector(vec![0, 3]), ExponentVector(vec![2, 0])]
    );
    let mut facets: Vec<(IntVec, BigInt)> = np
        .facets
        .iter()
        .map(|fa| (fa.normal.clone(), fa.offset.clone()))
        .collect();
    facets.sort();
    assert_eq!(
        facets,
        vec![
            (iv(&[0, 1]), BigInt::from(0)),
            (iv(&[1, 0]), BigInt::from(0)),
            (iv(&[3, 2]), BigInt::from(6)),
        ]
    );

    // Vert(Sigma(f)) equals the facet normal set
    let fan = dual_fan(&np);
    let mut normals: Vec<IntVec> = np.facets.iter().map(|fa| fa.normal.clone()).collect();
    normals.sort();
    assert_eq!(fan.rays(), &normals[..]);

    let rem = remoteness(&np).unwrap();
    assert_eq!(rem.nu0, q(5, 12));

    let set = candidate_poles(&f, 12, true, &cfg()).unwrap();
    assert_eq!(set.holomorphy_bound, q(-5, 12));
    // exactly {-(5+k)/12 : 0<=k<=12} union {-(1+k)/2 : >= -17/12}
    let mut expected: Vec<BigRational> = (0..=12).map(|k| q(-(5 + k), 12)).collect();
    let mut k = 0;
    loop {
        let v = q(-(1 + k), 2);
        if v < q(-17, 12) {
            break;
        }
        if !expected.contains(&v) {
            expected.push(v);
        }
        k += 1;
    }
    expected.sort();
    expected.reverse();
    assert_eq!(set.values(), expected);

    let report = check_all(&f, &np, true, &cfg());
    assert_eq!(report.overall, Overall::NonDegenerate);
    assert!(report
        .verdicts
        .iter()
        .all(|v| matches!(v.status, VerdictStatus::NonDegenerate)));

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!("acceptance 01 (cusp end-to-end): PASS");
}

#[test]
fn acceptance_02_refined_vs_naive() {
    let f = parse("x1^2 + x2^3", 2).unwrap();
    let k_max = 8;
    let refined = candidate_poles(&f, k_max, true, &cfg()).unwrap();
    let naive = naive_candidates(&f, k_max, true, &cfg()).unwrap();

    // the naive list adds the regularization rays (1,1) and (2,1)
    let sources: Vec<&PoleSource> = naive.entries.iter().flat_map(|e| &e.sources).collect();
    assert!(sources.contains(&&PoleSource::Normal(iv(&[1, 1]))));
    assert!(sources.contains(&&PoleSource::Normal(iv(&[2, 1]))));
    for k in 0..=k_max as i64 {
        assert!(naive.values().contains(&q(-(2 + k), 4)), "-(2+{k})/4");
        assert!(naive.values().contains(&q(-(3 + k), 6)), "-(3+{k})/6");
    }
    let naive_values = naive.values();
    for v in refined.values() {
        assert!(naive_values.contains(&v), "refined value {v} not in naive");
    }
    assert!(naive_values.len() > refined.values().len());

    // regular dual fan: the two lists coincide exactly
    let g = parse("x1 + x2", 2).unwrap();
    let refined = candidate_poles(&g, k_max, true, &cfg()).unwrap();
    let naive = naive_candidates(&g, k_max, true, &cfg()).unwrap();
    assert_eq!(refined.values(), naive.values());
    println!("acceptance 02 (refined vs naive lists): PASS");
}

#[test]
fn acceptance_03_order_bound_ground_truth() {
    let f = parse("x1*x2", 2).unwrap();
    let set = candidate_poles(&f, 8, true, &cfg()).unwrap();
    assert_eq!(set.entry(&q(-1, 2)).unwrap().order_bound, 2);

    // ground truth: Z(s, x1 x2) with the p = 0 bump is the square of the
    // one-variable closed form pi/(s+1); its actual poles sit at the
    // negative integers with order exactly 2 (simultaneous factor poles)
    for j in 1..=3i64 {
        let actual_order = 2; // both factors contribute the same pole
        let bound = set.entry(&q(-j, 1)).unwrap().order_bound;
        assert!(bound >= actual_order, "bound {bound} < actual at -{j}");
        assert_eq!(bound, 2);
    }
    // numerically: (s+1)^2 Z(s) stays bounded as s -> -1 along the reals
    let near = [
        Complex64::new(-0.9, 0.0),
        Complex64::new(-0.99, 0.0),
        Complex64::new(-0.999, 0.0),
    ];
    let vals: Vec<f64> = near
        .iter()
        .map(|&s| {
            let z = monomial_reference(1, 0, s).unwrap() * monomial_reference(1, 0, s).unwrap();
            ((s + 1.0) * (s + 1.0) * z).norm()
        })
        .collect();
    let target = std::f64::consts::PI * std::f64::consts::PI;
    for v in vals {
        assert!((v - target).abs() < 1e-6);
    }
    println!("acceptance 03 (order-bound ground truth): PASS");
}

#[test]
fn acceptance_04_monomial_pole_containment() {
    let p = 2u32; // bump smoothness: closed-form poles at -j/b_i, j <= p+1
    let k_max = 40;
    let mut checked = 0;
    for b1 in 1..=5i64 {
        // n = 1
        let f = parse(&format!("x1^{b1}"), 1).unwrap();
        let set = candidate_poles(&f, k_max, true, &cfg()).unwrap();
        let values = set.values();
        for j in 1..=(p as i64 + 1) {
            assert!(values.contains(&q(-j, b1)), "n=1 b={b1}: -{j}/{b1}");
            checked += 1;
        }
        // n = 2
        for b2 in 1..=5i64 {
            let f = parse(&format!("x1^{b1}*x2^{b2}"), 2).unwrap();
            let set = candidate_poles(&f, k_max, true, &cfg()).unwrap();
            let values = set.values();
            for j in 1..=(p as i64 + 1) {
                assert!(values.contains(&q(-j, b1)), "b=({b1},{b2}): -{j}/{b1}");
                assert!(values.contains(&q(-j, b2)), "b=({b1},{b2}): -{j}/{b2}");
                checked += 2;
            }
        }
    }
    assert!(checked >= 150);
    println!("acceptance 04 (monomial pole containment): PASS");
}

#[test]
fn acceptance_05_jacobian_lemma_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut done = 0;
    while done < 50 {
        let n = rng.gen_range(1..=4usize);
        let a: Vec<IntVec> = (0..n)
            .map(|_| (0..n).map(|_| BigInt::from(rng.gen_range(0..=4i64))).collect())
            .collect();
        let det = det_int(&a);
        if det.is_zero() {
            continue;
        }
        done += 1;
        let (d, exps) = jacobian_exponents(&a).unwrap();
        assert_eq!(d, det);
        let expected = LaurentPolynomial::monomial(
            ExponentVector(exps),
            polyzeta::gauss::GaussianRational::from_rational(BigRational::from_integer(d)),
        );
        assert_eq!(symbolic_jacobian_det(&a), expected, "matrix {a:?}");
    }
    println!("acceptance 05 (jacobian lemma, 50 matrices): PASS");
}

#[test]
fn acceptance_06_factorization_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut polys = vec![parse("x1^2 + x2^3", 2).unwrap()];
    for _ in 0..10 {
        polys.push(random_nondegenerate_poly(&mut rng));
    }
    for f in &polys {
        let np = newton_polyhedron(f).unwrap();
        let fan = simplicialize(&dual_fan(&np));
        let max_ids = fan.max_cone_ids();
        assert!(!max_ids.is_empty());
        for idx in max_ids {
            let sigma = fan.rational_cone(idx);
            let fac = factor_vertex(f, &np, &sigma).unwrap();
            // b_image is the vector of ray orders
            for (i, ray) in sigma.rays().iter().enumerate() {
                let nu = np
                    .omega_order(&ray.iter().map(|x| BigRational::from_integer(x.clone())).collect::<Vec<_>>())
                    .unwrap();
                assert_eq!(BigRational::from_integer(BigInt::from(fac.b_image.0[i])), nu);
            }
            // exact factorization f o psi = x^{b_image} h with h(0) != 0
            assert!(!fac.h.constant_term().is_zero());
            assert!(fac.h.support().iter().all(|e| e.is_nonnegative()));
            let pulled = transform(f, &fac.map);
            assert_eq!(pulled, fac.h.shift(&fac.b_image));
            // the pullback polyhedron has the single vertex b_image
            let np_pulled = newton_polyhedron(&pulled).unwrap();
            assert_eq!(np_pulled.vertices, vec![fac.b_image.clone()]);
        }
    }
    println!("acceptance 06 (vertex factorization, cusp + 10 random): PASS");
}

#[test]
fn acceptance_07_dual_fan_partition() {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let polys: Vec<LaurentPolynomial> = vec![
        parse("x1^2 + x2^3", 2).unwrap(),
        parse("x1*x2", 2).unwrap(),
        parse("x1 + x2", 2).unwrap(),
        parse("x1*x2 + x1^4 + x2^5", 2).unwrap(),
        parse("x1*x2 + x3", 3).unwrap(),
    ];
    for f in &polys {
        let n = f.dimension();
        let np = newton_polyhedron(f).unwrap();
        let fan = dual_fan(&np);
        for _ in 0..1000 {
            let omega: Vec<BigRational> = (0..n)
                .map(|_| {
                    BigRational::new(
                        BigInt::from(rng.gen_range(1..1_000_000_000i64)),
                        BigInt::from(rng.gen_range(1..1_000_000_000i64)),
                    )
                })
                .collect();
            let hits = fan.max_cones_with_in_relative_interior(&omega);
            assert_eq!(hits.len(), 1, "omega {omega:?}");
            let face = fan.face_of_cone(hits[0]).unwrap();
            let fm = np.first_meet_locus(&omega).unwrap();
            assert_eq!(face, fm.id);
        }
    }
    println!("acceptance 07 (dual-fan partition, 1000 samples x 5 polynomials): PASS");
}

#[test]
fn acceptance_08_hilbert_basis_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut done = 0;
    while done < 30 {
        let r1 = iv(&[rng.gen_range(-6..=6), rng.gen_range(-6..=6)]);
        let r2 = iv(&[rng.gen_range(-6..=6), rng.gen_range(-6..=6)]);
        let det = &r1[0] * &r2[1] - &r1[1] * &r2[0];
        if det.is_zero() || det.abs() > BigInt::from(20) {
            continue;
        }
        let Ok(cone) = RationalCone::new(2, vec![r1, r2]) else {
            continue;
        };
        if cone.dim() != 2 {
            continue;
        }
        done += 1;
        let basis = hilbert_basis(&cone).unwrap();

        // every cone lattice point in the box decomposes over the basis
        let mut memo: BTreeMap<IntVec, bool> = BTreeMap::new();
        for x in -10..=10i64 {
            for y in -10..=10i64 {
                let p = iv(&[x, y]);
                if !cone.contains_int(&p) {
                    continue;
                }
                assert!(
                    decomposes(&p, &basis, &cone, &mut memo),
                    "({x},{y}) fails over {basis:?}"
                );
            }
        }
        // minimality: no element decomposes over the others
        for (i, b) in basis.iter().enumerate() {
            let others: Vec<IntVec> = basis
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, g)| g.clone())
                .collect();
            let mut memo = BTreeMap::new();
            assert!(
                !decomposes(b, &others, &cone, &mut memo),
                "{b:?} is reducible"
            );
        }
    }
    println!("acceptance 08 (hilbert basis oracle, 30 cones): PASS");
}

fn decomposes(
    x: &IntVec,
    basis: &[IntVec],
    cone: &RationalCone,
    memo: &mut BTreeMap<IntVec, bool>,
) -> bool {
    if x.iter().all(|c| c.is_zero()) {
        return true;
    }
    if let Some(&r) = memo.get(x) {
        return r;
    }
    let mut ok = false;
    for g in basis {
        let y: IntVec = x.iter().zip(g).map(|(a, b)| a - b).collect();
        if cone.contains_int(&y) && decomposes(&y, basis, cone, memo) {
            ok = true;
            break;
        }
    }
    memo.insert(x.clone(), ok);
    ok
}

#[test]
fn acceptance_09_nondeg_exactness() {
    // (x1+x2)^2: degenerate with a certified witness
    let f = parse("x1^2 + 2*x1*x2 + x2^2", 2).unwrap();
    let np = newton_polyhedron(&f).unwrap();
    let report = check_all(&f, &np, true, &cfg());
    assert_eq!(report.overall, Overall::Degenerate);
    let witness_ok = report.verdicts.iter().any(|v| match &v.status {
        VerdictStatus::Degenerate { residual, witness } => {
            assert!(witness.iter().all(|z| z.norm() > 0.0));
            *residual < 1e-6
        }
        _ => false,
    });
    assert!(witness_ok);

    for text in ["x1^2 + x2^3", "x1^2 + x2^2"] {
        let f = parse(text, 2).unwrap();
        let np = newton_polyhedron(&f).unwrap();
        let report = check_all(&f, &np, true, &cfg());
        assert_eq!(report.overall, Overall::NonDegenerate, "{text}");
        assert!(report
            .verdicts
            .iter()
            .all(|v| matches!(v.status, VerdictStatus::NonDegenerate)));
    }
    println!("acceptance 09 (non-degeneracy exactness): PASS");
}

#[test]
fn acceptance_10_numerical_validation() {
    let start = Instant::now();
    // 20 quadrature-vs-reference cases within 1e-5 relative
    let bump0 = BumpSpec::new(1.0, 0).unwrap();
    let bump1 = BumpSpec::new(1.0, 1).unwrap();
    let mut cases = 0;
    for m in 1..=4u32 {
        for (p, bump) in [(0u32, &bump0), (1u32, &bump1)] {
            for s in [Complex64::new(0.5, 0.0), Complex64::new(1.0, 0.0)] {
                let f = parse(&format!("x1^{m}"), 1).unwrap();
                let grid = GridSpec::new(2048, 4).unwrap();
                let sample = zeta_quadrature(&f, bump, s, grid).unwrap();
                let reference = monomial_reference(m, p, s).unwrap();
                let rel = (sample.value - reference).norm() / reference.norm();
                assert!(rel < 1e-5, "n=1 m={m} p={p} s={s}: rel {rel:.2e}");
                cases += 1;
            }
        }
    }
    for (b1, b2, p, s) in [
        (1u32, 1u32, 0u32, Complex64::new(1.0, 0.0)),
        (2, 1, 1, Complex64::new(0.5, 0.0)),
        (1, 2, 1, Complex64::new(1.0, 0.0)),
        (2, 2, 0, Complex64::new(0.5, 0.0)),
    ] {
        let f = parse(&format!("x1^{b1}*x2^{b2}"), 2).unwrap();
        let bump = BumpSpec::new(1.0, p).unwrap();
        let grid = GridSpec::new(1024, 2).unwrap();
        let sample = zeta_quadrature(&f, &bump, s, grid).unwrap();
        let reference =
            monomial_reference(b1, p, s).unwrap() * monomial_reference(b2, p, s).unwrap();
        let rel = (sample.value - reference).norm() / reference.norm();
        assert!(rel < 1e-5, "n=2 b=({b1},{b2}) p={p}: rel {rel:.2e}");
        cases += 1;
    }
    assert_eq!(cases, 20);
    let quad_elapsed = start.elapsed();
    assert!(
        quad_elapsed.as_secs_f64() < 10.0,
        "20 cases took {quad_elapsed:?}"
    );

    // probe: stable for the cusp above the bound, unstable for x1 below it
    let cusp = parse("x1^2 + x2^3", 2).unwrap();
    let report = holomorphy_probe(
        &cusp,
        &BumpSpec::new(1.0, 1).unwrap(),
        &[Complex64::new(-0.3, 0.0)],
        GridSpec::new(16, 8).unwrap(),
    )
    .unwrap();
    assert!(report.entries[0].within_guarantee);
    assert!(report.entries[0].stable);

    let line = parse("x1", 1).unwrap();
    let report = holomorphy_probe(
        &line,
        &BumpSpec::new(1.0, 2).unwrap(),
        &[Complex64::new(-0.9, 0.0)],
        GridSpec::new(8, 8).unwrap(),
    )
    .unwrap();
    assert!(!report.entries[0].stable);
    println!(
        "acceptance 10 (numerical validation, 20 cases in {:.2}s + probes): PASS",
        quad_elapsed.as_secs_f64()
    );
}
