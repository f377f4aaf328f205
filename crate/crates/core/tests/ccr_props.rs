use duron_core::ccr::{
    bogoliubov_symbolic_check, verify_table, Algebra, BracketMode, Generator, GeneratorKind, Preset,
};
use duron_core::scalar::gauss;
use duron_core::{ExactAlgebra, ExactPoly, GaussRational};
use proptest::prelude::*;

type Q = GaussRational;

fn heisenberg() -> ExactAlgebra {
    Algebra::new(
        vec![
            Generator::new("x1", GeneratorKind::Position),
            Generator::new("p1", GeneratorKind::Momentum),
            Generator::new("x2", GeneratorKind::Position),
            Generator::new("p2", GeneratorKind::Momentum),
        ],
        BracketMode::Quantum,
    )
    .and_then(|a| a.with_bracket("x1", "p1", <Q as duron_core::Coeff>::i()))
    .and_then(|a| a.with_bracket("x2", "p2", <Q as duron_core::Coeff>::i()))
    .unwrap()
}

/// Random polynomial: a sum of up to three products of up to three generators.
fn poly() -> impl Strategy<Value = Vec<(Q, Vec<usize>)>> {
    let coeff =
        (-4i64..=4, 1i64..=3, -4i64..=4, 1i64..=3).prop_map(|(a, b, c, d)| gauss(a, b, c, d));
    proptest::collection::vec((coeff, proptest::collection::vec(0usize..4, 0..3)), 1..4)
}

fn build(alg: &ExactAlgebra, spec: &[(Q, Vec<usize>)]) -> ExactPoly {
    let names = ["x1", "p1", "x2", "p2"];
    let mut out = alg.zero();
    for (c, word) in spec {
        let mut term = alg.constant(c.clone());
        for &g in word {
            term = alg.mul(&term, &alg.gen(names[g]).unwrap()).unwrap();
        }
        out = out.add(&term).unwrap();
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_is_associative(a in poly(), b in poly(), c in poly()) {
        let alg = heisenberg();
        let (a, b, c) = (build(&alg, &a), build(&alg, &b), build(&alg, &c));
        let left = alg.mul(&alg.mul(&a, &b).unwrap(), &c).unwrap();
        let right = alg.mul(&a, &alg.mul(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn jacobi_identity(a in poly(), b in poly(), c in poly()) {
        let alg = heisenberg();
        let (a, b, c) = (build(&alg, &a), build(&alg, &b), build(&alg, &c));
        let br = |u: &ExactPoly, v: &ExactPoly| alg.commutator(u, v).unwrap();
        let sum = br(&a, &br(&b, &c)).add(&br(&b, &br(&c, &a))).unwrap().add(&br(&c, &br(&a, &b))).unwrap();
        prop_assert!(sum.is_zero());
    }

    #[test]
    fn commutator_is_antisymmetric(a in poly(), b in poly()) {
        let alg = heisenberg();
        let (a, b) = (build(&alg, &a), build(&alg, &b));
        let sum = alg.commutator(&a, &b).unwrap().add(&alg.commutator(&b, &a).unwrap()).unwrap();
        prop_assert!(sum.is_zero());
    }
}

#[test]
fn presets_against_their_tables() {
    for preset in Preset::ALL {
        let report = verify_table(preset);
        if preset == Preset::StandardDoubling {
            // two ordinary copies cannot produce the mixed brackets
            assert!(!report.all_pass());
            assert_eq!(report.entry("[X,pi]").unwrap().rhs_computed, "0");
        } else {
            assert!(
                report.all_pass(),
                "{}: {:?}",
                preset.name(),
                report.entries.iter().find(|e| !e.pass)
            );
        }
    }
}

#[test]
fn symbolic_bogoliubov_preserves_ladders() {
    assert!(bogoliubov_symbolic_check().pass);
}
