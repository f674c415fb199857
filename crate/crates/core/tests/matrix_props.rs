use matmaps::gf::{make_field, FieldSpec};
use matmaps::mat::{all_matrices, char_poly, jordan_form, kth_root_scan, matrix_kth_root, JordanKind, Matrix2};
use proptest::prelude::*;
use std::collections::HashMap;

fn mat(field: FieldSpec) -> impl Strategy<Value = Matrix2> {
    prop::array::uniform4(0..field.q()).prop_map(move |v| Matrix2::from_vector(v.map(|i| field.element(i))))
}

fn check_jordan(m: &Matrix2) {
    let jd = jordan_form(m).unwrap();
    let work = jd.j.field();
    let me = m.embed(work);
    assert_eq!(jd.base_extended, work != m.field());
    assert_eq!(jd.p * me * jd.p.inverse().expect("P invertible"), jd.j, "M = {m}");
    match jd.kind {
        JordanKind::Scalar { lambda } => assert_eq!(jd.j, Matrix2::scalar(lambda)),
        JordanKind::DiagonalDistinct { lambda, mu } => {
            assert!(lambda < mu);
            assert_eq!(jd.j, Matrix2::diag(lambda, mu));
        }
        JordanKind::Block { lambda } => {
            let o = work.zero();
            assert_eq!(jd.j, Matrix2::from_vector([lambda, work.one(), o, lambda]));
        }
    }
    let (t, d) = char_poly(&me);
    assert_eq!((t, d), (jd.j.trace(), jd.j.det()));
}

#[test]
fn jordan_reconstruction_exhaustive() {
    for (p, d) in [(2, 1), (3, 1), (5, 1)] {
        let field = make_field(p, d).unwrap();
        for m in all_matrices(field) {
            check_jordan(&m);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn jordan_reconstruction_f9(m in mat(make_field(3, 2).unwrap())) {
        // irreducible characteristic polynomials over F_9 have no splitting field here
        if jordan_form(&m).is_ok() {
            check_jordan(&m);
        }
    }

    #[test]
    fn cayley_hamilton_f7(m in mat(make_field(7, 1).unwrap())) {
        let (t, d) = char_poly(&m);
        let z = m * m - m.scale(t) + Matrix2::scalar(d);
        prop_assert!(z.is_zero());
    }

    #[test]
    fn inverse_and_det_multiplicative(a in mat(make_field(5, 1).unwrap()), b in mat(make_field(5, 1).unwrap())) {
        prop_assert_eq!((a * b).det(), a.det() * b.det());
        if let Some(ai) = a.inverse() {
            prop_assert!((ai * a - Matrix2::identity(a.field())).is_zero());
        } else {
            prop_assert!(a.det().is_zero());
        }
    }

    #[test]
    fn parse_display_round_trip(m in mat(make_field(3, 2).unwrap())) {
        prop_assert_eq!(Matrix2::parse(&m.to_string(), m.field()).unwrap(), m);
    }
}

#[test]
fn matrix_kth_root_sound_and_complete_over_f5() {
    let field = make_field(5, 1).unwrap();
    for k in 1..=12u64 {
        let mut powers: HashMap<Matrix2, Matrix2> = HashMap::new();
        for x in all_matrices(field) {
            powers.entry(x.pow(k)).or_insert(x);
        }
        for m in all_matrices(field) {
            match matrix_kth_root(&m, k) {
                Some(r) => assert_eq!(r.pow(k), m, "k={k} M={m}"),
                None => assert!(!powers.contains_key(&m), "k={k} M={m}: missed root"),
            }
        }
    }
}

#[test]
fn matrix_kth_root_agrees_with_scan_over_f3() {
    let field = make_field(3, 1).unwrap();
    for k in 1..=8u64 {
        for m in all_matrices(field) {
            assert_eq!(matrix_kth_root(&m, k).is_some(), kth_root_scan(&m, k).is_some(), "k={k} M={m}");
        }
    }
}
