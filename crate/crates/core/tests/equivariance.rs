use matmaps::canonical_pair;
use matmaps::commutator::{canonical_case_prediction, image_subspace, CommutatorPoly};
use matmaps::gf::{make_field, FieldSpec};
use matmaps::mat::Matrix2;
use matmaps::oracle::{enumerate_image, span, SweepOptions};
use matmaps::waring::{classify_image, PowerSumPoly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(rng: &mut ChaCha8Rng, field: FieldSpec) -> Matrix2 {
    Matrix2::from_vector([0; 4].map(|_| field.element(rng.gen_range(0..field.q()))))
}

fn random_nonzero(rng: &mut ChaCha8Rng, field: FieldSpec) -> Matrix2 {
    loop {
        let m = random_matrix(rng, field);
        if !m.is_zero() {
            return m;
        }
    }
}

fn random_invertible(rng: &mut ChaCha8Rng, field: FieldSpec) -> Matrix2 {
    loop {
        let m = random_matrix(rng, field);
        if m.is_invertible() {
            return m;
        }
    }
}

/// Pairs biased towards singular constants, where the interesting cases live.
fn random_pair(rng: &mut ChaCha8Rng, field: FieldSpec) -> (Matrix2, Matrix2) {
    let a = random_nonzero(rng, field);
    loop {
        let b = random_nonzero(rng, field);
        let want_singular = rng.gen_bool(0.75);
        if !want_singular || (!a.is_invertible() && !b.is_invertible()) || !(a - b).is_invertible() {
            return (a, b);
        }
    }
}

#[test]
fn canonical_pair_is_a_class_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (p, d) in [(3, 1), (5, 1), (2, 2)] {
        let field = make_field(p, d).unwrap();
        for _ in 0..200 {
            let (a, b) = random_pair(&mut rng, field);
            let q = random_invertible(&mut rng, field);
            let (Ok(cp), Ok(cq)) = (canonical_pair(&a, &b), canonical_pair(&a.conjugate_by(&q), &b.conjugate_by(&q)))
            else {
                continue;
            };
            assert_eq!((cp.j_a, cp.b_tilde, cp.family), (cq.j_a, cq.b_tilde, cq.family), "A={a} B={b} Q={q}");
            let w = cp.witness;
            let work = w.field();
            assert_eq!(a.coerce(work).unwrap().conjugate_by(&w), cp.j_a);
            assert_eq!(b.coerce(work).unwrap().conjugate_by(&w), cp.b_tilde);
        }
    }
}

#[test]
fn power_sum_image_is_equivariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let field = make_field(5, 1).unwrap();
    let opts = SweepOptions::exhaustive(1);
    for i in 0..200 {
        let (a, b) = random_pair(&mut rng, field);
        let q = random_invertible(&mut rng, field);
        let (k1, k2) = (1 + i % 3, 1 + (i / 3) % 3);
        let poly = PowerSumPoly::new(a, b, k1, k2).unwrap();
        let moved = PowerSumPoly::new(a.conjugate_by(&q), b.conjugate_by(&q), k1, k2).unwrap();
        let predicted = classify_image(&poly).unwrap().subspace(field);
        assert_eq!(classify_image(&moved).unwrap().subspace(field), predicted.conjugated(&q), "A={a} B={b} Q={q}");
        let image = enumerate_image(poly, &opts).unwrap();
        let moved_image = enumerate_image(moved, &opts).unwrap();
        let conj: Vec<Matrix2> = image.members().map(|m| m.conjugate_by(&q)).collect();
        assert_eq!(moved_image.len(), image.len());
        assert!(conj.iter().all(|m| moved_image.contains(m)), "A={a} B={b} Q={q}");
        assert_eq!(span(&moved_image), span(&image).conjugated(&q));
    }
}

#[test]
fn commutator_image_is_equivariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let field = make_field(5, 1).unwrap();
    let opts = SweepOptions::exhaustive(1);
    for _ in 0..200 {
        let (a, b) = random_pair(&mut rng, field);
        let q = random_invertible(&mut rng, field);
        let poly = CommutatorPoly::new(a, b).unwrap();
        let moved = CommutatorPoly::new(a.conjugate_by(&q), b.conjugate_by(&q)).unwrap();
        let image = image_subspace(&poly, &opts).unwrap().subspace;
        assert_eq!(image_subspace(&moved, &opts).unwrap().subspace, image.conjugated(&q), "A={a} B={b} Q={q}");
        if let (Some(p), Some(pm)) = (canonical_case_prediction(&poly), canonical_case_prediction(&moved)) {
            assert_eq!(pm.subspace(field), p.subspace(field).conjugated(&q));
        }
    }
}
