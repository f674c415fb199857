use matmaps::gf::{is_power_bijective, kth_root, make_field, Fe, FieldSpec};
use proptest::prelude::*;

fn fe(field: FieldSpec) -> impl Strategy<Value = Fe> {
    (0..field.q()).prop_map(move |i| field.element(i))
}

fn triple(field: FieldSpec) -> impl Strategy<Value = (Fe, Fe, Fe)> {
    (fe(field), fe(field), fe(field))
}

fn check_axioms(a: Fe, b: Fe, c: Fe) -> Result<(), TestCaseError> {
    let field = a.field();
    let (zero, one) = (field.zero(), field.one());
    prop_assert_eq!((a + b) + c, a + (b + c));
    prop_assert_eq!((a * b) * c, a * (b * c));
    prop_assert_eq!(a + b, b + a);
    prop_assert_eq!(a * b, b * a);
    prop_assert_eq!(a * (b + c), a * b + a * c);
    prop_assert_eq!(a + zero, a);
    prop_assert_eq!(a * one, a);
    prop_assert_eq!(a + (-a), zero);
    prop_assert_eq!(a - b, a + (-b));
    if a.is_zero() {
        prop_assert!(a.inv().is_err());
    } else {
        prop_assert_eq!(a * a.inv().unwrap(), one);
    }
    prop_assert_eq!((a * b).frobenius(), a.frobenius() * b.frobenius());
    prop_assert_eq!((a + b).frobenius(), a.frobenius() + b.frobenius());
    prop_assert_eq!(a.pow(field.q() as u64), a);
    Ok(())
}

macro_rules! axiom_suite {
    ($name:ident, $p:expr, $d:expr) => {
        proptest! {
            #![proptest_config(ProptestConfig::with_cases(1000))]
            #[test]
            fn $name((a, b, c) in triple(make_field($p, $d).unwrap())) {
                check_axioms(a, b, c)?;
            }
        }
    };
}

axiom_suite!(axioms_f3, 3, 1);
axiom_suite!(axioms_f5, 5, 1);
axiom_suite!(axioms_f9, 3, 2);
axiom_suite!(axioms_f4, 2, 2);
axiom_suite!(axioms_f121, 11, 2);

#[test]
fn multiplicative_group_is_cyclic() {
    for (p, d) in [(2, 1), (3, 1), (2, 2), (3, 2), (5, 2), (7, 2), (11, 2)] {
        let field = make_field(p, d).unwrap();
        let n = field.q() as u64 - 1;
        let order = |x: Fe| (1..=n).find(|&e| x.pow(e).is_one()).unwrap();
        assert!(field.elements().filter(|x| !x.is_zero()).any(|x| order(x) == n), "{field}");
    }
}

#[test]
fn kth_root_sound_and_complete_over_f5() {
    let field = make_field(5, 1).unwrap();
    for k in 1..=12u64 {
        for a in field.elements() {
            let brute = field.elements().any(|r| r.pow(k) == a);
            match kth_root(a, k) {
                Some(r) => assert_eq!(r.pow(k), a, "k={k} a={a}"),
                None => assert!(!brute, "k={k} a={a}: missed root"),
            }
        }
        let image: std::collections::HashSet<Fe> = field.elements().map(|r| r.pow(k)).collect();
        assert_eq!(image.len() == 5, is_power_bijective(field, k), "k={k}");
    }
}

#[test]
fn parse_display_round_trip() {
    for (p, d) in [(3, 1), (2, 2), (3, 2), (11, 2)] {
        let field = make_field(p, d).unwrap();
        for a in field.elements() {
            assert_eq!(field.parse_element(&a.to_string()).unwrap(), a);
        }
    }
}
