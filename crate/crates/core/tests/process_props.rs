use duron_core::process::{
    compose, conjugate, incidence_product, iterant_matrix, merge, parse, print, quaternion_units,
    IncidenceElement, Iterant, Label, ProcessBracket, ProcessElement, ProcessError,
    TransitionSystem,
};
use duron_core::scalar::{gauss, Coeff};
use duron_core::GaussRational;
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use proptest::prelude::*;

type Q = GaussRational;
type B = ProcessBracket<Q>;

const NAMES: [&str; 4] = ["A", "B", "C", "D"];

fn label(i: usize) -> Label {
    Label::atom(NAMES[i]).unwrap()
}

fn q() -> impl Strategy<Value = Q> {
    (-9i64..=9, 1i64..=5, -9i64..=9, 1i64..=5).prop_map(|(a, b, c, d)| gauss(a, b, c, d))
}

fn bracket() -> impl Strategy<Value = B> {
    (0usize..4, 0usize..4, q()).prop_map(|(l, r, k)| B::new(label(l), label(r), k))
}

fn mat_mul(x: &[[Q; 2]; 2], y: &[[Q; 2]; 2]) -> [[Q; 2]; 2] {
    let e =
        |r: usize, c: usize| x[r][0].clone() * y[0][c].clone() + x[r][1].clone() * y[1][c].clone();
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn iterant() -> impl Strategy<Value = Iterant<Q>> {
    (q(), q(), any::<bool>()).prop_map(|(a, b, s)| {
        if s {
            Iterant::shifted(a, b)
        } else {
            Iterant::new(a, b)
        }
    })
}

proptest! {
    #[test]
    fn composition_defined_iff_middle_labels_match(b1 in bracket(), b2 in bracket()) {
        let out = compose(&b1, &b2);
        if b1.right == b2.left {
            let c = out.unwrap();
            prop_assert_eq!(&c.left, &b1.left);
            prop_assert_eq!(&c.right, &b2.right);
            prop_assert_eq!(c.strength, b1.strength.clone() * b2.strength.clone());
        } else {
            let is_undefined = matches!(out, Err(ProcessError::UndefinedComposition { .. }));
            prop_assert!(is_undefined);
        }
    }

    #[test]
    fn composition_is_associative(l in proptest::collection::vec(0usize..4, 4), k in proptest::collection::vec(q(), 3)) {
        let b = |i: usize| B::new(label(l[i]), label(l[i + 1]), k[i].clone());
        let left = compose(&compose(&b(0), &b(1)).unwrap(), &b(2)).unwrap();
        let right = compose(&b(0), &compose(&b(1), &b(2)).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn conjugation_is_an_involution(b in bracket()) {
        prop_assert_eq!(conjugate(&conjugate(&b)), b.clone());
        let c = conjugate(&b);
        prop_assert_eq!(&c.left, &b.right);
        prop_assert_eq!(c.strength, -b.strength.conj());
    }

    #[test]
    fn merge_needs_equal_strengths(b1 in bracket(), b2 in bracket()) {
        match merge(&b1, &b2) {
            Ok(m) => {
                prop_assert_eq!(&b1.strength, &b2.strength);
                prop_assert_eq!(m.left, b1.left.plus(&b2.left));
            }
            Err(e) => {
                prop_assert_eq!(e, ProcessError::MergeStrength);
                prop_assert!(b1.strength != b2.strength);
            }
        }
    }

    #[test]
    fn iterant_matrix_is_faithful(u in iterant(), v in iterant()) {
        prop_assert_eq!(iterant_matrix(&u.star(&v)), mat_mul(&iterant_matrix(&u), &iterant_matrix(&v)));
    }

    #[test]
    fn incidence_product_is_associative(idx in proptest::collection::vec(0usize..3, 6)) {
        let e = |i: usize| IncidenceElement::<Q>::ket_bra(label(idx[2 * i]), label(idx[2 * i + 1]));
        let left = incidence_product(&incidence_product(&e(0), &e(1)), &e(2));
        let right = incidence_product(&e(0), &incidence_product(&e(1), &e(2)));
        prop_assert_eq!(left, right);
    }

    #[test]
    fn printing_is_parse_stable(terms in proptest::collection::vec((bracket(), 0usize..4), 1..4)) {
        let mut e = ProcessElement::<Q>::zero();
        for (b, tail) in terms {
            let next = ProcessElement::from_bracket(B::new(b.right.clone(), label(tail), Q::from_int(1)));
            e = e.add(&ProcessElement::from_bracket(b).juxtapose(&next));
        }
        let once = parse::<Q>(&print(&e)).unwrap();
        prop_assert_eq!(&once, &e);
        prop_assert_eq!(parse::<Q>(&print(&once)).unwrap(), once);
    }

    #[test]
    fn ritz_rule_is_exact(nums in proptest::collection::vec((-50i64..50, 1i64..12), 2..7)) {
        let freqs: Vec<BigRational> = nums.iter().map(|&(a, b)| BigRational::new(BigInt::from(a), BigInt::from(b))).collect();
        let n = freqs.len();
        let sys = TransitionSystem::<BigRational, f64>::new(freqs, DMatrix::from_element(n, n, Complex::new(1.0, 0.0)));
        prop_assert!(sys.ritz_check().pass());
        let (_, dev) = sys.transition_product(0.37);
        prop_assert!(dev <= 1e-12);
    }
}

#[test]
fn quaternion_relations() {
    let (i, j, k) = quaternion_units::<Q>();
    let minus_one = Iterant::one().scale(&-Q::from_int(1));
    assert_eq!(i.star(&i), minus_one);
    assert_eq!(j.star(&j), minus_one);
    assert_eq!(k.star(&k), minus_one);
    assert_eq!(i.star(&j).star(&k), minus_one);
    assert_eq!(i.star(&j), k);
    assert_eq!(j.star(&i), k.scale(&-Q::from_int(1)));
}

#[test]
fn parsed_chain_evaluates() {
    let e = parse::<Q>("[A,B][B,C]").unwrap().evaluate().unwrap();
    assert_eq!(print(&e), "[A,C]");
    let err = parse::<Q>("[A,B][C,D]").unwrap().evaluate();
    assert!(matches!(
        err,
        Err(ProcessError::UndefinedComposition { .. })
    ));
}
