//! Two-time density matrix and the polar (Hamilton-Jacobi) form.

use duron_core::fock::{oscillator_hamiltonian, SpaceTag};
use duron_core::quantum::{
    bilocal, delta_t_residual, energy_anticommutator, liouville_residual, polar_decompose,
    quantum_hj_residual, GridPropagator, QhjReport,
};
use duron_core::rng::Rng;
use duron_core::{Grid, Operator, State};
use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex;
use serde_json::json;

use super::SuiteOutput;
use crate::check::Check;
use crate::config::{RunConfig, System};
use crate::report::{Cell, Table};

pub const ANCHORS: &[&str] = &[
    "bilocal.liouville",
    "bilocal.delta-t",
    "bilocal.energy",
    "qhj.stationary",
    "qhj.coherent",
    "qhj.operator-form",
    "qhj.convergence",
];

pub const DEFAULT_LEVELS: usize = 8;
pub const RANDOM_SYSTEMS: usize = 5;
pub const RANDOM_STATES: usize = 100;
pub const DEFAULT_H: f64 = 1e-4;
pub const DEFAULT_DX: f64 = 0.01;
pub const DEFAULT_DT: f64 = 1e-4;
const AMPLITUDE_FLOOR: f64 = 1e-6;

pub fn run(cfg: &RunConfig, out: &mut SuiteOutput) {
    let levels = cfg.levels.unwrap_or(DEFAULT_LEVELS);
    liouville(cfg, out, levels);
    energy(cfg, out, levels);
    qhj(cfg, out);
}

fn liouville(cfg: &RunConfig, out: &mut SuiteOutput, levels: usize) {
    let h = cfg.h.unwrap_or(DEFAULT_H);
    let mut rng = Rng::for_suite(cfg.seed, "quantum.liouville");
    let (mut worst, mut worst_dt, mut ratios, mut ratios_dt) =
        (0.0f64, 0.0f64, Vec::new(), Vec::new());
    for _ in 0..RANDOM_SYSTEMS {
        let ham = rng.hermitian::<f64>(levels);
        let psi = match rng.state::<f64>(levels) {
            Ok(p) => p,
            Err(e) => return out.push(Check::error("liouville.random", "bilocal.liouville", e)),
        };
        let t = rng.uniform_in(0.0, 2.0);
        let run = || -> duron_core::fock::FockResult<[f64; 4]> {
            Ok([
                liouville_residual(&psi, &ham, t, h)?,
                liouville_residual(&psi, &ham, t, 1e-2)? / liouville_residual(&psi, &ham, t, 5e-3)?,
                delta_t_residual(&psi, &ham, t, h)?,
                delta_t_residual(&psi, &ham, t, 1e-2)? / delta_t_residual(&psi, &ham, t, 5e-3)?,
            ])
        };
        match run() {
            Ok([r, q, rd, qd]) => {
                worst = worst.max(r);
                worst_dt = worst_dt.max(rd);
                ratios.push(q);
                ratios_dt.push(qd);
            }
            Err(e) => return out.push(Check::error("liouville.random", "bilocal.liouville", e)),
        }
    }
    let note = format!("{RANDOM_SYSTEMS} seeded {levels}-level systems, h = {h:e}");
    out.push(
        Check::at_most(
            "liouville.residual",
            "bilocal.liouville",
            worst,
            cfg.tol(1e-6),
        )
        .with_note(note.clone()),
    );
    for (k, r) in ratios.iter().enumerate() {
        out.push(
            Check::within(
                format!("liouville.convergence.{k}"),
                "bilocal.liouville",
                *r,
                3.5,
                4.5,
            )
            .with_note("h = 1e-2 vs 5e-3"),
        );
    }
    out.push(
        Check::at_most(
            "delta-t.residual",
            "bilocal.delta-t",
            worst_dt,
            cfg.tol(1e-6),
        )
        .with_note(note),
    );
    for (k, r) in ratios_dt.iter().enumerate() {
        out.push(
            Check::within(
                format!("delta-t.convergence.{k}"),
                "bilocal.delta-t",
                *r,
                3.5,
                4.5,
            )
            .with_note("h = 1e-2 vs 5e-3"),
        );
    }
    out.detail("liouville_residual", json!(worst));
    out.detail("delta_t_residual", json!(worst_dt));
    out.detail(
        "convergence_ratios",
        json!({ "liouville": ratios, "delta_t": ratios_dt }),
    );
}

fn eigenstate_deviation(psi: &State, ham: &Operator, e: f64) -> duron_core::fock::FockResult<f64> {
    let t = 0.3;
    let rep = energy_anticommutator(psi, ham, t)?;
    let rho = bilocal(psi, ham, t, t)?.matrix;
    rep.anticommutator.max_abs_diff(&rho.scale_real(2.0 * e))
}

fn energy(cfg: &RunConfig, out: &mut SuiteOutput, levels: usize) {
    let tol = cfg.tol(1e-12);
    let mut worst = 0.0f64;
    let osc = oscillator_hamiltonian::<f64>(levels, 1.0);
    let mut rng = Rng::for_suite(cfg.seed, "quantum.energy");
    let result = (|| -> duron_core::fock::FockResult<()> {
        let osc = osc?;
        for k in 0..levels {
            let psi = State::basis(levels, SpaceTag::Single, k);
            worst = worst.max(eigenstate_deviation(&psi, &osc, k as f64 + 0.5)?);
        }
        // eigenvectors of a random Hermitian matrix, from an independent eigensolver call
        let ham = rng.hermitian::<f64>(levels);
        let eig = SymmetricEigen::new(ham.matrix().clone());
        for k in 0..levels {
            let v: DVector<Complex<f64>> = eig.eigenvectors.column(k).into_owned();
            let psi = State::new(v, levels, SpaceTag::Single)?.normalized()?;
            worst = worst.max(eigenstate_deviation(&psi, &ham, eig.eigenvalues[k])?);
        }
        Ok(())
    })();
    match result {
        Ok(()) => out.push(
            Check::at_most("energy.eigenstates", "bilocal.energy", worst, tol)
                .with_note("[rho,H]_+ = 2 E_n rho on oscillator and random-matrix eigenstates"),
        ),
        Err(e) => out.push(Check::error("energy.eigenstates", "bilocal.energy", e)),
    }

    let mut trace_dev = 0.0f64;
    for _ in 0..RANDOM_STATES {
        let ham = rng.hermitian::<f64>(levels);
        let t = rng.uniform_in(-2.0, 2.0);
        match rng
            .state::<f64>(levels)
            .and_then(|psi| energy_anticommutator(&psi, &ham, t))
        {
            Ok(rep) => trace_dev = trace_dev.max((rep.half_trace - rep.expectation).abs()),
            Err(e) => return out.push(Check::error("energy.trace", "bilocal.energy", e)),
        }
    }
    out.push(
        Check::at_most("energy.trace", "bilocal.energy", trace_dev, tol).with_note(format!(
            "Tr([rho,H]_+)/2 = <H> on {RANDOM_STATES} seeded random states"
        )),
    );
    out.detail("anticomm_residual", json!(worst.max(trace_dev)));
}

fn slices(prop: &GridPropagator<f64>, psi0: &[Complex<f64>], t: f64, dt: f64) -> QhjReport<f64> {
    let g = prop.grid();
    let s = prop.evolve_many(psi0, &[t - dt, t, t + dt]);
    let f: Vec<_> = s
        .iter()
        .map(|p| polar_decompose(p, g, AMPLITUDE_FLOOR))
        .collect();
    quantum_hj_residual(&f[0], &f[1], &f[2], dt, g)
}

fn harmonic(half_width: f64, dx: f64) -> duron_core::fock::FockResult<Grid> {
    Grid::dirichlet(half_width, dx, 1.0, |x| 0.5 * x * x)
}

fn residual_table(rep: &QhjReport<f64>) -> Table {
    let mut t = Table::new(&["x", "residual", "operator_residual"]);
    for ((x, r), o) in rep.x.iter().zip(&rep.residual).zip(&rep.operator_residual) {
        t.push(vec![
            Cell::Num(*x),
            Cell::Num(r.unwrap_or(f64::NAN)),
            Cell::Num(o.unwrap_or(f64::NAN)),
        ]);
    }
    t
}

fn qhj(cfg: &RunConfig, out: &mut SuiteOutput) {
    let dx = cfg.dx.unwrap_or(DEFAULT_DX);
    let dt = cfg.dt.unwrap_or(DEFAULT_DT);
    let mut worst = 0.0f64;

    // the discrete ground state is stationary for the discrete Hamiltonian
    let stationary = harmonic(4.0, dx).map(|g| {
        let prop = GridPropagator::new(g);
        let (_, psi0) = prop.ground_state();
        slices(&prop, &psi0, 0.5, dt)
    });
    match &stationary {
        Ok(rep) => {
            worst = worst.max(rep.max_abs());
            out.push(
                Check::at_most(
                    "qhj.stationary",
                    "qhj.stationary",
                    rep.max_abs(),
                    cfg.tol(1e-6),
                )
                .with_note(format!("dx = {dx}, dt = {dt:e}")),
            );
        }
        Err(e) => out.push(Check::error("qhj.stationary", "qhj.stationary", e)),
    }

    // displaced ground state of the trap: a coherent state
    let coherent = harmonic(10.0, dx).map(|g| {
        let prop = GridPropagator::new(g);
        let psi0 = prop.grid().gaussian(0.3, 0.0, 1.0);
        slices(&prop, &psi0, 0.7, dt)
    });
    match &coherent {
        Ok(rep) => {
            worst = worst.max(rep.max_abs());
            let mut c =
                Check::at_most("qhj.coherent", "qhj.coherent", rep.max_abs(), cfg.tol(1e-4))
                    .with_note(format!(
                        "x0 = 0.3, t = 0.7, dx = {dx}, dt = {dt:e}, masked {:.3}",
                        rep.masked_fraction
                    ));
            if !rep.warnings.is_empty() {
                c = c.with_note(rep.warnings.join("; "));
            }
            out.push(c);
            out.push(
                Check::at_most(
                    "qhj.operator-form",
                    "qhj.operator-form",
                    rep.max_operator_where(|_| true),
                    cfg.tol(1e-8),
                )
                .with_note("position diagonal of [rho,H]_+ + 2 R^2 dS/dt"),
            );
        }
        Err(e) => {
            out.push(Check::error("qhj.coherent", "qhj.coherent", e.clone()));
            out.push(Check::error("qhj.operator-form", "qhj.operator-form", e));
        }
    }

    // free Gaussian, refining dx and dt together
    let mut residuals = Vec::new();
    let mut free_report = None;
    for (fdx, fdt) in [(0.04, 4e-3), (0.02, 2e-3), (0.01, 1e-3)] {
        match Grid::dirichlet(12.0, fdx, 1.0, |_| 0.0) {
            Ok(g) => {
                let prop = GridPropagator::new(g);
                let psi0 = prop.grid().gaussian(0.0, 1.0, 1.0);
                let rep = slices(&prop, &psi0, 0.5, fdt);
                residuals.push(rep.max_abs_where(|x| (x - 0.5).abs() <= 2.0));
                free_report = Some(rep);
            }
            Err(e) => return out.push(Check::error("qhj.convergence", "qhj.convergence", e)),
        }
    }
    let ratios: Vec<f64> = residuals.windows(2).map(|w| w[0] / w[1]).collect();
    for (k, r) in ratios.iter().enumerate() {
        out.push(
            Check::within(
                format!("qhj.convergence.{k}"),
                "qhj.convergence",
                *r,
                3.5,
                4.5,
            )
            .with_note(format!(
                "free Gaussian, residual {:.3e} -> {:.3e}",
                residuals[k],
                residuals[k + 1]
            )),
        );
    }
    out.detail("qhj_residual", json!(worst));
    out.detail(
        "qhj_convergence",
        json!({ "residuals": residuals, "ratios": ratios }),
    );

    let chosen = match cfg.system {
        Some(System::Free) => free_report,
        Some(System::Grid1d) => stationary.ok(),
        _ => coherent.ok(),
    };
    out.table = chosen.as_ref().map(residual_table);
}
