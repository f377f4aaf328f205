//! Process algebra and CCR kernel.

use duron_core::ccr::{
    bogoliubov_symbolic_check, duron_algebra, verify_table, Algebra, BracketMode, Generator,
    GeneratorKind, Preset,
};
use duron_core::process::{
    compose, conjugate, incidence_product, merge, parse, print, quaternion_units, IncidenceElement,
    Iterant, Label, ProcessBracket, ProcessElement, ProcessError, TransitionSystem,
};
use duron_core::rng::Rng;
use duron_core::scalar::{gauss, Coeff};
use duron_core::{ExactAlgebra, ExactPoly, GaussRational};
use nalgebra::DMatrix;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::json;

use super::{SuiteOutput, PLUMBING};
use crate::check::Check;
use crate::config::RunConfig;

type Q = GaussRational;
type B = ProcessBracket<Q>;

pub const ANCHORS: &[&str] = &[
    "groupoid.strength",
    "groupoid.direction",
    "groupoid.succession",
    "groupoid.association",
    "groupoid.coexistence",
    "groupoid.undefined",
    "iterant.product",
    "iterant.quaternions",
    "incidence.product",
    "transition.ritz",
    "transition.phase",
    "ccr.jacobi",
    "ccr.doubling",
    "ccr.standard-doubling",
    "ccr.poisson-doubling",
    "ccr.duron",
    "ccr.bogoliubov",
];

pub const EXPRESSIONS: usize = 1000;
pub const RITZ_TABLES: usize = 100;
const ATOMS: [&str; 4] = ["A", "B", "C", "D"];

fn atom(rng: &mut Rng) -> Label {
    Label::atom(ATOMS[rng.below(ATOMS.len() as u64) as usize]).expect("static atom")
}

/// Small Gaussian rational; drawn from a short list part of the time so that equal strengths occur.
fn strength(rng: &mut Rng) -> Q {
    if rng.below(4) == 0 {
        [Q::from_int(1), Q::from_int(2), Q::i()][rng.below(3) as usize].clone()
    } else {
        gauss(
            rng.int_in(-6, 6),
            rng.int_in(1, 4),
            rng.int_in(-6, 6),
            rng.int_in(1, 4),
        )
    }
}

pub fn run(cfg: &RunConfig, out: &mut SuiteOutput) {
    expressions(cfg, out);
    iterants(cfg, out);
    incidence(cfg, out);
    ritz(cfg, out);
    ccr(cfg, out);
}

#[derive(Default)]
struct Tally {
    strength: usize,
    direction: usize,
    succession: usize,
    association: usize,
    coexistence: usize,
    undefined: usize,
    round_trip: usize,
    defined: usize,
}

/// Random composition chains `k[l0,r0][l1,r1]...`, checked against a direct oracle.
fn expressions(cfg: &RunConfig, out: &mut SuiteOutput) {
    let mut rng = Rng::for_suite(cfg.seed, "algebra.expressions");
    let mut t = Tally::default();
    for _ in 0..EXPRESSIONS {
        let len = 1 + rng.below(4) as usize;
        let mut links: Vec<B> = Vec::with_capacity(len);
        for j in 0..len {
            let left = match links.last() {
                Some(prev) if j > 0 && rng.below(4) != 0 => prev.right.clone(),
                _ => atom(&mut rng),
            };
            links.push(B::new(left, atom(&mut rng), strength(&mut rng)));
        }
        let chained = links.windows(2).all(|w| w[0].right == w[1].left);

        let element = links
            .iter()
            .skip(1)
            .fold(ProcessElement::from_bracket(links[0].clone()), |acc, b| {
                acc.juxtapose(&ProcessElement::from_bracket(b.clone()))
            });
        match parse::<Q>(&print(&element)) {
            Ok(back) if back == element => {}
            _ => t.round_trip += 1,
        }

        // oracle: outer labels and the product of strengths
        let oracle = B::new(
            links[0].left.clone(),
            links[len - 1].right.clone(),
            links
                .iter()
                .fold(Q::from_int(1), |acc, b| acc * b.strength.clone()),
        );
        match element.brackets() {
            Ok(bs) if chained => {
                t.defined += 1;
                let expected = if oracle.strength.is_zero() {
                    vec![]
                } else {
                    vec![oracle.clone()]
                };
                if bs != expected {
                    t.succession += 1;
                }
            }
            Err(ProcessError::UndefinedComposition { .. }) if !chained => {}
            Ok(_) | Err(_) => {
                if chained {
                    t.succession += 1;
                } else {
                    t.undefined += 1;
                }
            }
        }

        let b1 = &links[0];
        let k = strength(&mut rng);
        if B::with_scaled_labels(k.clone(), b1.left.clone(), b1.right.clone())
            != B::new(b1.left.clone(), b1.right.clone(), k.clone())
        {
            t.strength += 1;
        }
        if conjugate(&conjugate(b1)) != *b1
            || conjugate(b1) != B::new(b1.right.clone(), b1.left.clone(), -b1.strength.conj())
        {
            t.direction += 1;
        }
        if len >= 2 {
            let b2 = &links[1];
            if let Ok(c) = compose(b1, b2) {
                if compose(&b1.scale(&k), b2).ok() != Some(c.scale(&k))
                    || compose(b1, &b2.scale(&k)).ok() != Some(c.scale(&k))
                {
                    t.strength += 1;
                }
                // (b1 b2)* = -(b2* b1*)
                let reversed =
                    compose(&conjugate(b2), &conjugate(b1)).map(|r| r.scale(&-Q::from_int(1)));
                if reversed.ok() != Some(conjugate(&c)) {
                    t.direction += 1;
                }
            }
            match merge(b1, b2) {
                Ok(m) if b1.strength == b2.strength => {
                    if m != B::new(
                        b1.left.plus(&b2.left),
                        b1.right.plus(&b2.right),
                        b1.strength.clone(),
                    ) {
                        t.coexistence += 1;
                    }
                }
                Err(ProcessError::MergeStrength) if b1.strength != b2.strength => {}
                _ => t.coexistence += 1,
            }
            let equal = B::new(b2.left.clone(), b2.right.clone(), b1.strength.clone());
            if merge(b1, &equal).map(|m| (m.left, m.right)).ok()
                != Some((b1.left.plus(&b2.left), b1.right.plus(&b2.right)))
            {
                t.coexistence += 1;
            }
        }
        if chained && len >= 3 {
            let (b2, b3) = (&links[1], &links[2]);
            let left = compose(b1, b2).and_then(|x| compose(&x, b3));
            let right = compose(b2, b3).and_then(|x| compose(b1, &x));
            if left.is_err() || left != right {
                t.association += 1;
            }
        }
    }
    let n = format!("{EXPRESSIONS} seeded expressions");
    out.push(Check::count("rule1.strength", "groupoid.strength", t.strength).with_note(n.clone()));
    out.push(
        Check::count("rule2.direction", "groupoid.direction", t.direction).with_note(n.clone()),
    );
    out.push(
        Check::count("rule3.succession", "groupoid.succession", t.succession)
            .with_note(format!("{} chains defined", t.defined)),
    );
    out.push(
        Check::count("rule4.association", "groupoid.association", t.association)
            .with_note(n.clone()),
    );
    out.push(
        Check::count("rule5.coexistence", "groupoid.coexistence", t.coexistence)
            .with_note(n.clone()),
    );
    out.push(
        Check::count(
            "composition.undefined-iff-mismatch",
            "groupoid.undefined",
            t.undefined,
        )
        .with_note(format!(
            "{} chains with a mismatched middle label",
            EXPRESSIONS - t.defined
        )),
    );
    out.push(Check::count("parser.round-trip", PLUMBING, t.round_trip));
    let example = parse::<Q>("[A,B][B,C]")
        .and_then(|e| e.evaluate())
        .map(|e| print(&e));
    out.push(
        Check::exact(
            "eval.example",
            "groupoid.succession",
            example.as_deref() == Ok("[A,C]"),
            None,
        )
        .with_note(format!(
            "[A,B][B,C] -> {}",
            example.unwrap_or_else(|e| e.to_string())
        )),
    );
    out.detail(
        "expressions",
        json!({ "count": EXPRESSIONS, "defined": t.defined }),
    );
}

fn mat_mul(x: &[[Q; 2]; 2], y: &[[Q; 2]; 2]) -> [[Q; 2]; 2] {
    let e =
        |r: usize, c: usize| x[r][0].clone() * y[0][c].clone() + x[r][1].clone() * y[1][c].clone();
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn iterants(cfg: &RunConfig, out: &mut SuiteOutput) {
    let (i, j, k) = quaternion_units::<Q>();
    let minus_one = Iterant::one().scale(&-Q::from_int(1));
    let relations = [
        i.star(&i) == minus_one,
        j.star(&j) == minus_one,
        k.star(&k) == minus_one,
        i.star(&j).star(&k) == minus_one,
        i.star(&j) == k,
        j.star(&i) == k.scale(&-Q::from_int(1)),
    ];
    let failed = relations.iter().filter(|ok| !**ok).count();
    out.push(
        Check::count("quaternions", "iterant.quaternions", failed)
            .with_note("I^2 = J^2 = K^2 = IJK = -1, IJ = K, JI = -K"),
    );
    let units = [&i, &j, &k];
    let matrix_failures = units
        .iter()
        .flat_map(|u| units.iter().map(move |v| (u, v)))
        .filter(|(u, v)| u.star(v).matrix() != mat_mul(&u.matrix(), &v.matrix()))
        .count();
    out.push(Check::count(
        "quaternions.matrix-oracle",
        "iterant.quaternions",
        matrix_failures,
    ));

    let mut rng = Rng::for_suite(cfg.seed, "algebra.iterants");
    let draw = |rng: &mut Rng| {
        let (a, b) = (strength(rng), strength(rng));
        if rng.coin() {
            Iterant::shifted(a, b)
        } else {
            Iterant::new(a, b)
        }
    };
    let violations = (0..200)
        .filter(|_| {
            let (u, v) = (draw(&mut rng), draw(&mut rng));
            u.star(&v).matrix() != mat_mul(&u.matrix(), &v.matrix())
        })
        .count();
    out.push(
        Check::count("iterant.faithful", "iterant.product", violations)
            .with_note("200 random pairs against 2x2 matrices"),
    );
}

fn incidence(cfg: &RunConfig, out: &mut SuiteOutput) {
    let mut rng = Rng::for_suite(cfg.seed, "algebra.incidence");
    let mut assoc = 0;
    let mut delta = 0;
    for _ in 0..200 {
        let mut kb = || {
            let (a, b) = (atom(&mut rng), atom(&mut rng));
            (a.clone(), b.clone(), IncidenceElement::<Q>::ket_bra(a, b))
        };
        let (a1, b1, e1) = kb();
        let (a2, b2, e2) = kb();
        let (_, _, e3) = kb();
        let p = incidence_product(&e1, &e2);
        let expected = if b1 == a2 {
            IncidenceElement::ket_bra(a1, b2)
        } else {
            IncidenceElement::zero()
        };
        if p != expected {
            delta += 1;
        }
        let s1 = e1.add(&e3.scale(&Q::i()));
        if incidence_product(&incidence_product(&s1, &e2), &e3)
            != incidence_product(&s1, &incidence_product(&e2, &e3))
        {
            assoc += 1;
        }
    }
    out.push(
        Check::count("incidence.associative", "incidence.product", assoc)
            .with_note("200 random triples"),
    );
    out.push(
        Check::count("incidence.delta", "incidence.product", delta)
            .with_note("mismatched inner labels give zero"),
    );
}

fn ritz(cfg: &RunConfig, out: &mut SuiteOutput) {
    let mut rng = Rng::for_suite(cfg.seed, "algebra.ritz");
    let mut violations = 0;
    let mut phase = 0.0f64;
    for _ in 0..RITZ_TABLES {
        let levels = 2 + rng.below(5) as usize;
        let freqs: Vec<BigRational> = (0..levels).map(|_| rng.rational(50, 12)).collect();
        let amps = DMatrix::from_fn(levels, levels, |_, _| {
            Complex::new(rng.normal(), rng.normal())
        });
        let sys = TransitionSystem::<BigRational, f64>::new(freqs, amps);
        let report = sys.ritz_check();
        violations += report.violations;
        let t = rng.uniform_in(-3.0, 3.0);
        phase = phase.max(sys.transition_product(t).1);
    }
    out.push(
        Check::count("ritz.combination", "transition.ritz", violations)
            .with_note(format!("{RITZ_TABLES} random rational tables")),
    );
    out.push(Check::at_most(
        "ritz.product-phase",
        "transition.phase",
        phase,
        cfg.tol(1e-12),
    ));
}

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
    .and_then(|a| a.with_bracket("x1", "p1", Q::i()))
    .and_then(|a| a.with_bracket("x2", "p2", -Q::i()))
    .expect("static algebra")
}

fn random_poly(alg: &ExactAlgebra, rng: &mut Rng) -> ExactPoly {
    let names = ["x1", "p1", "x2", "p2"];
    let mut out = alg.zero();
    for _ in 0..1 + rng.below(3) {
        let mut term = alg.constant(strength(rng));
        for _ in 0..rng.below(3) {
            term = alg
                .mul(
                    &term,
                    &alg.gen(names[rng.below(4) as usize]).expect("known"),
                )
                .expect("shared context");
        }
        out = out.add(&term).expect("shared context");
    }
    out
}

fn ccr(cfg: &RunConfig, out: &mut SuiteOutput) {
    let alg = heisenberg();
    let mut rng = Rng::for_suite(cfg.seed, "algebra.ccr");
    let mut jacobi = 0;
    for _ in 0..50 {
        let (a, b, c) = (
            random_poly(&alg, &mut rng),
            random_poly(&alg, &mut rng),
            random_poly(&alg, &mut rng),
        );
        let br = |u: &ExactPoly, v: &ExactPoly| alg.commutator(u, v).expect("shared context");
        let sum = br(&a, &br(&b, &c))
            .add(&br(&b, &br(&c, &a)))
            .and_then(|s| s.add(&br(&c, &br(&a, &b))));
        let anti = br(&a, &b).add(&br(&b, &a));
        if !matches!(sum, Ok(ref s) if s.is_zero()) || !matches!(anti, Ok(ref s) if s.is_zero()) {
            jacobi += 1;
        }
    }
    out.push(
        Check::count("ccr.jacobi-antisymmetry", "ccr.jacobi", jacobi)
            .with_note("50 random triples, mirrored doubling"),
    );

    let failing = |preset: Preset| {
        verify_table(preset)
            .entries
            .iter()
            .filter(|e| !e.pass)
            .count()
    };
    out.push(Check::count(
        "preset.mirror-doubling",
        "ccr.doubling",
        failing(Preset::MirrorDoubling),
    ));
    out.push(Check::count(
        "preset.classical-poisson-doubling",
        "ccr.poisson-doubling",
        failing(Preset::ClassicalPoissonDoubling),
    ));

    let standard = verify_table(Preset::StandardDoubling);
    let rhs = |lhs: &str| {
        standard
            .entry(lhs)
            .map(|e| e.rhs_computed.clone())
            .unwrap_or_default()
    };
    let half_i = (Q::i() * Q::from_ratio(1, 2)).render();
    let ok = rhs("[X,pi]") == "0" && rhs("[X,P]") == half_i && !standard.all_pass();
    out.push(
        Check::exact(
            "preset.standard-doubling-fails",
            "ccr.standard-doubling",
            ok,
            None,
        )
        .with_note(format!(
            "[X,pi] = {}, [X,P] = {}, [eta,pi] = {}",
            rhs("[X,pi]"),
            rhs("[X,P]"),
            rhs("[eta,pi]")
        )),
    );

    let (_, axiomatic) = duron_algebra();
    let coproduct = verify_table(Preset::TimeDuron);
    out.push(Check::count(
        "preset.time-duron",
        "ccr.duron",
        failing(Preset::TimeDuron),
    ));
    out.push(Check::count(
        "duron.axiomatic",
        "ccr.duron",
        axiomatic.entries.iter().filter(|e| !e.pass).count(),
    ));
    out.push(Check::exact(
        "duron.tables-agree",
        "ccr.duron",
        coproduct
            .entries
            .iter()
            .zip(&axiomatic.entries)
            .all(|(a, b)| a.lhs == b.lhs && a.rhs_computed == b.rhs_computed),
        None,
    ));
    let bog = bogoliubov_symbolic_check();
    out.push(
        Check::exact("bogoliubov.symbolic", "ccr.bogoliubov", bog.pass, None)
            .with_note(format!("[a(t),a(t)^+] = {}", bog.a_adag)),
    );
    out.detail(
        "presets",
        json!(Preset::ALL
            .iter()
            .map(|p| (p.name(), verify_table(*p).all_pass()))
            .collect::<std::collections::BTreeMap<_, _>>()),
    );
}
