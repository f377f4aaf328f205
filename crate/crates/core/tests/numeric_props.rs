use approx::assert_abs_diff_eq;
use duron_core::classical::{hj_residuals, EndPoints, FdOptions, MidpointCoords, TwoPointAction};
use duron_core::fock::{oscillator_hamiltonian, StateVector};
use duron_core::quantum::{bilocal, energy_anticommutator, liouville_residual};
use duron_core::rng::Rng;
use duron_core::superops::{devectorize, evolution_check, spectrum_check, vectorize};
use duron_core::thermofield::{required_cutoff, theta_of_beta, theta_vacuum};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn midpoint_coordinates_round_trip(x1 in -5.0f64..5.0, t1 in -5.0f64..5.0, x2 in -5.0f64..5.0, t2 in -5.0f64..5.0) {
        let e = EndPoints::new(x1, t1, x2, t2);
        let back = e.to_midpoint().to_endpoints();
        prop_assert!((back.x1 - x1).abs() <= 1e-14 && (back.t2 - t2).abs() <= 1e-14);
        let m: MidpointCoords<f64> = e.to_midpoint();
        prop_assert!((m.dt - (t2 - t1)).abs() <= 1e-14);
    }

    #[test]
    fn free_particle_solves_hamilton_jacobi(x1 in -2.0f64..2.0, x2 in -2.0f64..2.0, dt in 0.3f64..2.0) {
        let s = TwoPointAction::free_particle(1.3).unwrap();
        let r = hj_residuals(&s, &EndPoints::new(x1, 0.1, x2, 0.1 + dt), &FdOptions::central(1e-4)).unwrap();
        prop_assert!(r.max_abs() <= 1e-5, "{:?}", r);
    }

    #[test]
    fn anticommutator_trace_is_twice_the_energy(seed in any::<u64>(), t in 0.0f64..3.0) {
        let mut rng = Rng::new(seed);
        let h = rng.hermitian::<f64>(6);
        let psi = rng.state::<f64>(6).unwrap();
        let rep = energy_anticommutator(&psi, &h, t).unwrap();
        prop_assert!((rep.half_trace - rep.expectation).abs() <= 1e-12);
    }

    #[test]
    fn coincident_bilocal_density_is_hermitian(seed in any::<u64>(), t in -2.0f64..2.0) {
        let mut rng = Rng::new(seed);
        let h = rng.hermitian::<f64>(5);
        let psi = rng.state::<f64>(5).unwrap();
        let rho = bilocal(&psi, &h, t, t).unwrap().matrix;
        prop_assert!(rho.hermitian_deviation() <= 1e-14);
        prop_assert!((rho.trace().re - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn liouville_residual_is_small(seed in any::<u64>()) {
        let mut rng = Rng::new(seed);
        let h = rng.hermitian::<f64>(8);
        let psi = rng.state::<f64>(8).unwrap();
        prop_assert!(liouville_residual(&psi, &h, 0.4, 1e-4).unwrap() <= 1e-6);
    }

    #[test]
    fn superoperator_spectra(seed in any::<u64>(), n in 2usize..=8) {
        let mut rng = Rng::new(seed);
        let h = rng.hermitian::<f64>(n);
        let s = spectrum_check(&h).unwrap();
        prop_assert!(s.liouvillian <= 1e-9 && s.energy <= 1e-9);
    }

    #[test]
    fn vec_evolution_is_two_sided(seed in any::<u64>(), t in 0.0f64..2.0) {
        let mut rng = Rng::new(seed);
        let h = rng.hermitian::<f64>(4);
        let rho = rng.hermitian::<f64>(4);
        prop_assert_eq!(devectorize(&vectorize(&rho).unwrap()), rho.clone());
        let c = evolution_check(&h, &rho, t).unwrap();
        prop_assert!(c.deviation <= 1e-9 && c.norm_drift <= 1e-9);
    }

    #[test]
    fn theta_increases_with_temperature(b1 in 0.2f64..5.0, b2 in 0.2f64..5.0) {
        prop_assume!((b1 - b2).abs() > 1e-6);
        let (t1, t2) = (theta_of_beta(b1, 1.0).unwrap(), theta_of_beta(b2, 1.0).unwrap());
        prop_assert_eq!(b1 < b2, t1 > t2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn squeezed_vacuum_is_normalized_and_decreasing(theta in 0.05f64..0.9) {
        let n = required_cutoff(theta).max(16);
        let v = theta_vacuum(theta, n).unwrap();
        let total: f64 = v.coefficients.iter().map(|c| c * c).sum();
        prop_assert!((total - 1.0).abs() <= 1e-8);
        for w in v.coefficients[..=n / 2].windows(2) {
            prop_assert!(w[0] > w[1] && w[1] >= 0.0);
        }
        prop_assert!(v.reduced_density().iter().enumerate().all(|(k, z)| k % (n + 1) == 0 || z.norm() <= 1e-10));
    }
}

#[test]
fn eigenstate_anticommutator_is_twice_the_energy() {
    let h = oscillator_hamiltonian(6, 1.0).unwrap();
    for level in 0..6 {
        let psi = StateVector::basis(6, duron_core::fock::SpaceTag::Single, level);
        let rep = energy_anticommutator(&psi, &h, 0.3).unwrap();
        let rho = bilocal(&psi, &h, 0.3, 0.3).unwrap().matrix;
        let expected = rho.scale_real(2.0 * (level as f64 + 0.5));
        assert!(rep.anticommutator.max_abs_diff(&expected).unwrap() <= 1e-12);
        assert_abs_diff_eq!(rep.half_trace, level as f64 + 0.5, epsilon = 1e-12);
    }
}
