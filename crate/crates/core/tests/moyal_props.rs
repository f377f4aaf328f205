use duron_core::moyal::{
    baker_bracket, classical_limit_report, moyal_bracket, parse_poly, poisson_bracket, star,
    star_bopp, PhasePoly,
};
use duron_core::rng::Rng;
use proptest::prelude::*;

fn random_pair(seed: u64, degree: u32) -> (PhasePoly, PhasePoly, PhasePoly) {
    let mut rng = Rng::new(seed);
    (
        PhasePoly::random(&mut rng, degree, 3),
        PhasePoly::random(&mut rng, degree, 3),
        PhasePoly::random(&mut rng, degree, 3),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn star_is_associative(seed in any::<u64>()) {
        let (f, g, h) = random_pair(seed, 4);
        prop_assert_eq!(star(&star(&f, &g), &h), star(&f, &star(&g, &h)));
    }

    #[test]
    fn bopp_route_agrees(seed in any::<u64>()) {
        let (f, g, _) = random_pair(seed, 3);
        prop_assert_eq!(star_bopp(&f, &g), star(&f, &g));
    }

    #[test]
    fn moyal_bracket_obeys_jacobi(seed in any::<u64>()) {
        let (f, g, h) = random_pair(seed, 3);
        let mb = |a: &PhasePoly, b: &PhasePoly| moyal_bracket(a, b);
        let sum = mb(&f, &mb(&g, &h)).add(&mb(&g, &mb(&h, &f))).add(&mb(&h, &mb(&f, &g)));
        prop_assert!(sum.is_zero());
    }

    #[test]
    fn quadratics_have_no_corrections(seed in any::<u64>()) {
        let (f, g, _) = random_pair(seed, 2);
        prop_assert_eq!(moyal_bracket(&f, &g), poisson_bracket(&f, &g));
    }

    #[test]
    fn brackets_reduce_classically(seed in any::<u64>()) {
        let (f, g, _) = random_pair(seed, 4);
        prop_assert!(classical_limit_report(&f, &g).pass());
        prop_assert_eq!(baker_bracket(&f, &g), baker_bracket(&g, &f));
        prop_assert_eq!(moyal_bracket(&f, &g).at_hbar_zero(), poisson_bracket(&f, &g));
    }

    #[test]
    fn display_parses_back(seed in any::<u64>()) {
        let (f, g, _) = random_pair(seed, 3);
        let p = star(&f, &g);
        prop_assert_eq!(parse_poly(&p.to_string()).unwrap(), p);
    }
}

#[test]
fn canonical_star_product() {
    let xp = star(&PhasePoly::x(), &PhasePoly::p());
    assert_eq!(xp, parse_poly("x p + i/2 h").unwrap());
}

#[test]
fn cubic_bracket_correction() {
    let f = parse_poly("x^3").unwrap();
    let g = parse_poly("p^3").unwrap();
    let diff = moyal_bracket(&f, &g).sub(&poisson_bracket(&f, &g));
    assert_eq!(diff, parse_poly("-3/2 h^2").unwrap());
}
