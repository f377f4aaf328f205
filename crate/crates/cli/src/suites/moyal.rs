//! Phase-space star product and brackets.

use duron_core::moyal::{
    baker_bracket, classical_limit_report, moyal_bracket, parse_poly, poisson_bracket, star,
    star_bopp, PhasePoly,
};
use duron_core::rng::Rng;
use duron_core::scalar::Coeff;
use duron_core::GaussRational;
use serde_json::json;

use super::{SuiteOutput, PLUMBING};
use crate::check::Check;
use crate::config::RunConfig;

pub const ANCHORS: &[&str] = &[
    "moyal.star",
    "moyal.bracket-quadratic",
    "moyal.baker-symmetry",
    "moyal.classical-limit",
    "moyal.associativity",
    "moyal.jacobi",
    "moyal.higher-order",
];

type Q = GaussRational;

const PAIRS: usize = 50;
const TRIPLES: usize = 20;

fn count<F: FnMut() -> bool>(n: usize, mut violates: F) -> usize {
    (0..n).filter(|_| violates()).count()
}

/// Every monomial of degree at most two.
fn quadratic_basis() -> Vec<PhasePoly> {
    let mut out = Vec::new();
    for deg in 0..=2u32 {
        for a in 0..=deg {
            out.push(PhasePoly::monomial(Q::from_int(1), a, deg - a, 0));
        }
    }
    out
}

pub fn run(cfg: &RunConfig, out: &mut SuiteOutput) {
    let mut rng = Rng::for_suite(cfg.seed, "moyal");
    let (x, p) = (PhasePoly::x(), PhasePoly::p());

    let expected = x
        .mul(&p)
        .add(&PhasePoly::monomial(Q::i() * Q::from_ratio(1, 2), 0, 0, 1));
    out.push(
        Check::exact("x-star-p", "moyal.star", star(&x, &p) == expected, None)
            .with_note(format!("x*p = {}", star(&x, &p))),
    );
    let bopp = count(PAIRS, || {
        let (f, g) = (
            PhasePoly::random(&mut rng, 4, 3),
            PhasePoly::random(&mut rng, 4, 3),
        );
        star(&f, &g) != star_bopp(&f, &g)
    });
    out.push(
        Check::count("star.bopp-route", "moyal.star", bopp)
            .with_note(format!("{PAIRS} random pairs, degree <= 4")),
    );

    let basis = quadratic_basis();
    let mut quad = basis
        .iter()
        .flat_map(|f| basis.iter().map(move |g| (f, g)))
        .filter(|(f, g)| moyal_bracket(f, g) != poisson_bracket(f, g))
        .count();
    quad += count(PAIRS, || {
        let (f, g) = (
            PhasePoly::random(&mut rng, 2, 4),
            PhasePoly::random(&mut rng, 2, 4),
        );
        moyal_bracket(&f, &g) != poisson_bracket(&f, &g)
    });
    out.push(
        Check::count(
            "quadratics.moyal-equals-poisson",
            "moyal.bracket-quadratic",
            quad,
        )
        .with_note(format!(
            "all {} monomial pairs and {PAIRS} random quadratics",
            basis.len() * basis.len()
        )),
    );

    let baker = count(PAIRS, || {
        let (f, g) = (
            PhasePoly::random(&mut rng, 4, 3),
            PhasePoly::random(&mut rng, 4, 3),
        );
        baker_bracket(&f, &g) != baker_bracket(&g, &f)
    });
    out.push(Check::count(
        "baker.symmetric",
        "moyal.baker-symmetry",
        baker,
    ));

    let limits = count(PAIRS, || {
        let (f, g) = (
            PhasePoly::random(&mut rng, 4, 3),
            PhasePoly::random(&mut rng, 4, 3),
        );
        !classical_limit_report(&f, &g).pass()
    });
    out.push(
        Check::count("hbar-to-zero", "moyal.classical-limit", limits)
            .with_note("MB -> PB and Baker -> fg, corrections from hbar^2"),
    );

    let assoc = count(TRIPLES, || {
        let (f, g, h) = (
            PhasePoly::random(&mut rng, 4, 3),
            PhasePoly::random(&mut rng, 4, 3),
            PhasePoly::random(&mut rng, 4, 3),
        );
        star(&star(&f, &g), &h) != star(&f, &star(&g, &h))
    });
    out.push(
        Check::count("star.associative", "moyal.associativity", assoc)
            .with_note(format!("{TRIPLES} random triples, degree <= 4")),
    );

    let jacobi = count(TRIPLES, || {
        let (f, g, h) = (
            PhasePoly::random(&mut rng, 3, 3),
            PhasePoly::random(&mut rng, 3, 3),
            PhasePoly::random(&mut rng, 3, 3),
        );
        let mb = moyal_bracket;
        !mb(&f, &mb(&g, &h))
            .add(&mb(&g, &mb(&h, &f)))
            .add(&mb(&h, &mb(&f, &g)))
            .is_zero()
    });
    out.push(Check::count("moyal.jacobi", "moyal.jacobi", jacobi));

    // MB(x^3, p^3) - PB(x^3, p^3) = -(3/2) hbar^2
    let (x3, p3) = (
        PhasePoly::monomial(Q::from_int(1), 3, 0, 0),
        PhasePoly::monomial(Q::from_int(1), 0, 3, 0),
    );
    let diff = moyal_bracket(&x3, &p3).sub(&poisson_bracket(&x3, &p3));
    out.push(
        Check::exact(
            "cubic.correction",
            "moyal.higher-order",
            diff == PhasePoly::monomial(Q::from_ratio(-3, 2), 0, 0, 2),
            None,
        )
        .with_note(format!("MB - PB = {diff}")),
    );

    let round_trip = count(PAIRS, || {
        let f = PhasePoly::random(&mut rng, 4, 4);
        parse_poly(&f.to_string()).ok() != Some(f)
    });
    out.push(Check::count("parse.round-trip", PLUMBING, round_trip));
    out.detail("cubic_correction", json!(diff.to_string()));
}
