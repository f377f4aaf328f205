//! Liouville and energy super-operators on vectorized densities.

use duron_core::fock::{FockResult, SpaceTag};
use duron_core::rng::Rng;
use duron_core::superops::{
    age_duron_symbolic, apply, devectorize, energy_superop, evolution_check, liouvillian,
    spectrum_check, vec_liouville_residual, vectorize,
};
use duron_core::Operator;
use nalgebra::DMatrix;
use serde_json::{json, Value};

use super::{SuiteOutput, PLUMBING};
use crate::check::Check;
use crate::config::RunConfig;

pub const ANCHORS: &[&str] = &[
    "superop.liouvillian-spectrum",
    "superop.energy-spectrum",
    "superop.evolution",
    "superop.vec-liouville",
    "superop.duron-table",
];

pub const DEFAULT_MAX_LEVELS: usize = 8;

fn pure_density(rng: &mut Rng, n: usize) -> FockResult<Operator> {
    let psi = rng.state::<f64>(n)?;
    let a = psi.amplitudes();
    Operator::new(
        DMatrix::from_fn(n, n, |i, j| a[i] * a[j].conj()),
        n,
        SpaceTag::Single,
    )
}

struct Sample {
    n: usize,
    liouvillian: f64,
    energy: f64,
    evolution: f64,
    norm_drift: f64,
    vec_residual: f64,
    round_trip: f64,
}

fn sample(rng: &mut Rng, n: usize, h: f64) -> FockResult<Sample> {
    let ham = rng.hermitian::<f64>(n);
    let spec = spectrum_check(&ham)?;
    let rho0 = pure_density(rng, n)?;
    let t = rng.uniform_in(0.0, 3.0);
    let evo = evolution_check(&ham, &rho0, t)?;
    let psi = rng.state::<f64>(n)?;
    let vec_residual = vec_liouville_residual(&psi, &ham, t, h)?;
    // L vec(rho) = vec([H, rho]) and E vec(rho) = vec({H, rho}), entry by entry
    let v = vectorize(&rho0)?;
    let l_rho = devectorize(&apply(&liouvillian(&ham)?, &v)?);
    let e_rho = devectorize(&apply(&energy_superop(&ham)?, &v)?);
    let round_trip = l_rho
        .max_abs_diff(&ham.commutator(&rho0)?)?
        .max(e_rho.max_abs_diff(&ham.anticommutator(&rho0)?)?)
        .max(devectorize(&v).max_abs_diff(&rho0)?);
    Ok(Sample {
        n,
        liouvillian: spec.liouvillian,
        energy: spec.energy,
        evolution: evo.deviation,
        norm_drift: evo.norm_drift,
        vec_residual,
        round_trip,
    })
}

pub fn run(cfg: &RunConfig, out: &mut SuiteOutput) {
    let top = cfg.levels.unwrap_or(DEFAULT_MAX_LEVELS);
    let h = cfg.h.unwrap_or(1e-4);
    let mut rng = Rng::for_suite(cfg.seed, "superops");
    let mut samples = Vec::new();
    for n in 2..=top {
        match sample(&mut rng, n, h) {
            Ok(s) => samples.push(s),
            Err(e) => {
                return out.push(Check::error(
                    format!("random.{n}"),
                    "superop.liouvillian-spectrum",
                    e,
                ))
            }
        }
    }
    let worst = |f: fn(&Sample) -> f64| samples.iter().map(f).fold(0.0f64, f64::max);
    let note = format!("seeded random Hermitian H, N = 2..={top}");
    let tol = cfg.tol(1e-9);
    out.push(
        Check::at_most(
            "spectrum.liouvillian",
            "superop.liouvillian-spectrum",
            worst(|s| s.liouvillian),
            tol,
        )
        .with_note(note.clone()),
    );
    out.push(
        Check::at_most(
            "spectrum.energy",
            "superop.energy-spectrum",
            worst(|s| s.energy),
            tol,
        )
        .with_note(note.clone()),
    );
    out.push(
        Check::at_most(
            "evolution.two-sided",
            "superop.evolution",
            worst(|s| s.evolution),
            tol,
        )
        .with_note(note.clone()),
    );
    out.push(Check::at_most(
        "evolution.norm",
        "superop.evolution",
        worst(|s| s.norm_drift),
        tol,
    ));
    out.push(
        Check::at_most(
            "vec-liouville.residual",
            "superop.vec-liouville",
            worst(|s| s.vec_residual),
            cfg.tol(1e-6),
        )
        .with_note(format!("h = {h:e}")),
    );
    out.push(Check::at_most(
        "vectorization.round-trip",
        PLUMBING,
        worst(|s| s.round_trip),
        cfg.tol(1e-12),
    ));

    let sym = age_duron_symbolic();
    out.push(
        Check::exact(
            "duron.symbolic-table",
            "superop.duron-table",
            sym.pass,
            None,
        )
        .with_note(sym.age_operator.clone()),
    );

    let per_n = |f: fn(&Sample) -> f64| -> Value {
        samples
            .iter()
            .map(|s| (s.n.to_string(), json!(f(s))))
            .collect::<serde_json::Map<_, _>>()
            .into()
    };
    out.detail(
        "spectrum_check",
        json!({ "liouvillian": per_n(|s| s.liouvillian), "energy": per_n(|s| s.energy) }),
    );
    out.detail(
        "evolution_crosscheck",
        json!({ "deviation": per_n(|s| s.evolution), "norm_drift": per_n(|s| s.norm_drift) }),
    );
    out.detail(
        "symbolic_table",
        json!(sym
            .coproduct_table
            .entries
            .iter()
            .map(|e| json!({ "lhs": e.lhs, "rhs_expected": e.rhs_expected, "rhs_computed": e.rhs_computed, "pass": e.pass }))
            .collect::<Vec<_>>()),
    );
}
