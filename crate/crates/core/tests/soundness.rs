use matmaps::commutator::{canonical_case_prediction, image_subspace, CommutatorPoly, ImageSource};
use matmaps::gf::{make_field, FieldSpec};
use matmaps::mat::{all_matrices, Matrix2};
use matmaps::oracle::{enumerate_image, equals_subspace, is_subspace, Subspace, SweepOptions};
use matmaps::waring::{classify_image, roots_available, solve, PowerSumPoly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn nonzero(field: FieldSpec) -> Vec<Matrix2> {
    all_matrices(field).filter(|m| !m.is_zero()).collect()
}

fn check_power_sum(poly: &PowerSumPoly) {
    let field = poly.field();
    let image = enumerate_image(*poly, &SweepOptions::exhaustive(1)).unwrap();
    let predicted = classify_image(poly).unwrap().subspace(field);
    assert!(image.members().all(|m| predicted.contains(&m)), "{poly:?}: image escapes prediction");
    if roots_available(field, poly.k1(), poly.k2()) {
        assert!(equals_subspace(&image, &predicted).unwrap(), "{poly:?}: image smaller than prediction");
    }
}

#[test]
fn power_sum_classifier_exhaustive_small_fields() {
    let f2 = make_field(2, 1).unwrap();
    let m2 = nonzero(f2);
    for k in [(1, 1), (2, 3), (3, 3), (5, 2)] {
        for a in &m2 {
            for b in &m2 {
                check_power_sum(&PowerSumPoly::new(*a, *b, k.0, k.1).unwrap());
            }
        }
    }
    let f3 = make_field(3, 1).unwrap();
    let m3 = nonzero(f3);
    for a in &m3 {
        for b in &m3 {
            check_power_sum(&PowerSumPoly::new(*a, *b, 1, 1).unwrap());
        }
    }
}

#[test]
fn power_sum_classifier_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for (p, d) in [(5, 1), (2, 2), (7, 1)] {
        let field = make_field(p, d).unwrap();
        let ms = nonzero(field);
        let singular: Vec<Matrix2> = ms.iter().copied().filter(|m| !m.is_invertible()).collect();
        for i in 0..150 {
            let pool = if i % 4 == 0 { &ms } else { &singular };
            let a = pool[rng.gen_range(0..pool.len())];
            let b = pool[rng.gen_range(0..pool.len())];
            let k1 = rng.gen_range(1..=7);
            let k2 = rng.gen_range(1..=7);
            check_power_sum(&PowerSumPoly::new(a, b, k1, k2).unwrap());
        }
    }
}

#[test]
fn commutator_predictions_exhaustive_f3() {
    let f3 = make_field(3, 1).unwrap();
    let ms = nonzero(f3);
    let opts = SweepOptions::exhaustive(1);
    for a in &ms {
        for b in &ms {
            let poly = CommutatorPoly::new(*a, *b).unwrap();
            let report = is_subspace(&enumerate_image(poly, &opts).unwrap());
            assert!(report.is_subspace, "A={a} B={b}: {:?}", report.counterexample);
            let pred = canonical_case_prediction(&poly).expect("prediction over F_3");
            assert_eq!(report.basis, pred.subspace(f3), "A={a} B={b}");
            // fast paths agree with enumeration
            let img = image_subspace(&poly, &opts).unwrap();
            assert_eq!(img.subspace, report.basis);
            if (*a - *b).is_invertible() {
                assert_eq!(img.source, ImageSource::InvertibleDifference);
            } else if a == b {
                assert_eq!(img.source, ImageSource::EqualConstants);
                if a.is_scalar() {
                    assert_eq!(img.subspace, Subspace::trace_zero(f3));
                }
            }
        }
    }
}

#[test]
fn commutator_subspace_certificate_random_f5() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let f5 = make_field(5, 1).unwrap();
    let ms = nonzero(f5);
    let opts = SweepOptions::exhaustive(1);
    for _ in 0..500 {
        let a = ms[rng.gen_range(0..ms.len())];
        let b = ms[rng.gen_range(0..ms.len())];
        let poly = CommutatorPoly::new(a, b).unwrap();
        let report = is_subspace(&enumerate_image(poly, &opts).unwrap());
        assert!(report.is_subspace, "A={a} B={b}");
        assert_eq!(report.basis, canonical_case_prediction(&poly).unwrap().subspace(f5), "A={a} B={b}");
    }
}

#[test]
fn solver_matches_oracle_membership() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for (p, d, n) in [(3, 1, 100), (2, 2, 60), (5, 1, 40)] {
        let field = make_field(p, d).unwrap();
        let ms = nonzero(field);
        let singular: Vec<Matrix2> = ms.iter().copied().filter(|m| !m.is_invertible()).collect();
        for i in 0..n {
            let pool = if i % 3 == 0 { &ms } else { &singular };
            let a = pool[rng.gen_range(0..pool.len())];
            let b = pool[rng.gen_range(0..pool.len())];
            let poly = PowerSumPoly::new(a, b, rng.gen_range(1..=4), rng.gen_range(1..=4)).unwrap();
            let image = enumerate_image(poly, &SweepOptions::exhaustive(1)).unwrap();
            for _ in 0..5 {
                let c = Matrix2::from_vector([0; 4].map(|_| field.element(rng.gen_range(0..field.q()))));
                match solve(&poly, &c).unwrap() {
                    Some((x, y)) => assert_eq!(poly.eval(&x, &y), c),
                    None => assert!(!image.contains(&c), "{poly:?} C={c}: missed witness"),
                }
                assert_eq!(solve(&poly, &c).unwrap().is_some(), image.contains(&c));
            }
        }
    }
}
