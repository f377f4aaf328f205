use duron_core::fock::{
    annihilation, expm, kron, lift_left, lift_right, matrix_from_csv, matrix_from_json,
    matrix_to_csv, matrix_to_json, oscillator_hamiltonian, tensor, HermitianSpectrum, SpaceTag,
};
use duron_core::rng::Rng;
use duron_core::{Operator, State};
use num_complex::Complex;
use proptest::prelude::*;

fn identity_dev(op: &Operator) -> f64 {
    op.max_abs_diff(&Operator::identity(op.cutoff(), op.space()))
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn kron_is_associative(seed in any::<u64>()) {
        let mut rng = Rng::new(seed);
        let (a, b, c) = (rng.hermitian::<f64>(2), rng.hermitian::<f64>(3), rng.hermitian::<f64>(2));
        let left = kron(&kron(a.matrix(), b.matrix()), c.matrix());
        let right = kron(a.matrix(), &kron(b.matrix(), c.matrix()));
        prop_assert!((left - right).camax() <= 1e-14);
    }

    #[test]
    fn mixed_product_rule(seed in any::<u64>()) {
        let mut rng = Rng::new(seed);
        let n = 3;
        let (a, b, c, d) = (rng.hermitian::<f64>(n), rng.hermitian::<f64>(n), rng.hermitian::<f64>(n), rng.hermitian::<f64>(n));
        let lhs = tensor(&a, &b).unwrap().mul(&tensor(&c, &d).unwrap()).unwrap();
        let rhs = tensor(&a.mul(&c).unwrap(), &b.mul(&d).unwrap()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-12);
    }

    #[test]
    fn exponential_of_anti_hermitian_is_unitary(seed in any::<u64>(), n in 2usize..7) {
        let mut rng = Rng::new(seed);
        let g = rng.hermitian::<f64>(n).scale(Complex::new(0.0, 1.0));
        let u = expm(&g, 1e-10).unwrap();
        prop_assert!(identity_dev(&u.mul(&u.adjoint()).unwrap()) <= 1e-12);
    }

    #[test]
    fn evolution_composes(seed in any::<u64>(), t1 in -2.0f64..2.0, t2 in -2.0f64..2.0) {
        let mut rng = Rng::new(seed);
        let h = rng.hermitian::<f64>(5);
        let psi = rng.state::<f64>(5).unwrap();
        let spec = HermitianSpectrum::new(&h).unwrap();
        let two_step = spec.evolve(&spec.evolve(&psi, t1).unwrap(), t2).unwrap();
        let one_step = spec.evolve(&psi, t1 + t2).unwrap();
        prop_assert!(two_step.max_abs_diff(&one_step) <= 1e-12);
        prop_assert!((two_step.recomputed_norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn serialization_round_trips(seed in any::<u64>()) {
        let mut rng = Rng::new(seed);
        let m = rng.hermitian::<f64>(4).into_matrix();
        prop_assert_eq!(&matrix_from_json::<f64>(&matrix_to_json(&m)).unwrap(), &m);
        prop_assert_eq!(&matrix_from_csv::<f64>(&matrix_to_csv(&m)).unwrap(), &m);
    }
}

#[test]
fn lifted_ladders_commute_and_obey_ccr_below_top() {
    let n = 6;
    let a = annihilation::<f64>(n).unwrap();
    let (l, r) = (lift_left(&a).unwrap(), lift_right(&a).unwrap());
    assert_eq!(l.commutator(&r).unwrap().max_abs(), 0.0);
    let ccr = l.commutator(&l.adjoint()).unwrap();
    let interior = duron_core::fock::interior_indices(n, SpaceTag::Doubled, n - 2);
    let diff = ccr.sub(&Operator::identity(n, SpaceTag::Doubled)).unwrap();
    assert!(diff.max_abs_on(&interior) <= 1e-14);
}

#[test]
fn oscillator_ground_state_is_stationary() {
    let h = oscillator_hamiltonian(8, 1.5).unwrap();
    let psi = State::vacuum(8, SpaceTag::Single);
    let later = duron_core::fock::evolve(&psi, &h, 2.0).unwrap();
    assert!((later.inner(&psi).norm() - 1.0).abs() < 1e-14);
}

#[test]
fn single_precision_alias_builds() {
    let a = annihilation::<f32>(4).unwrap();
    let n: duron_core::OperatorF32 = a.adjoint().mul(&a).unwrap();
    assert!((n.entry(3, 3).re - 3.0).abs() < 1e-6);
}
