//! Thermofield doubling: the theta-vacuum, its Gibbs reduction and the Bogoliubov rotation.

use duron_core::fock::{annihilation, creation, number, FockResult};
use duron_core::thermofield::{
    ab_operators, ab_reconstruction, coproduct_identity_residual, deformed_check, gibbs_match,
    group_law, ladder_commutator_residual, required_cutoff, theta_derivative_check, theta_of_beta,
    theta_vacuum, verify_bogoliubov, ThetaVacuum, CORRESPONDENCE_LABEL,
};
use serde_json::{json, Value};

use super::SuiteOutput;
use crate::check::Check;
use crate::config::RunConfig;
use crate::report::{Cell, Table};

pub const ANCHORS: &[&str] = &[
    "thermo.vacuum",
    "thermo.occupation",
    "thermo.correspondence",
    "thermo.gibbs",
    "thermo.coproduct",
    "thermo.reconstruction",
    "thermo.ab-ladders",
    "thermo.deformation",
    "thermo.bogoliubov",
    "thermo.annihilation",
    "thermo.group-law",
    "thermo.derivative",
];

pub const DEFAULT_CUTOFF: usize = 60;
pub const BOGOLIUBOV_CUTOFF: usize = 50;
pub const DEFAULT_THETAS: [f64; 4] = [0.3, 0.6, 0.9, 1.2];
pub const DEFAULT_BETA_OMEGA: [f64; 4] = [0.5, 1.0, 2.0, 3.0];
/// Coefficients compared against `tanh^n / cosh`.
const COEFFICIENT_LEVELS: usize = 20;
/// Cutoff for the operator identities that do not depend on theta.
const IDENTITY_CUTOFF: usize = 12;
const DERIVATIVE_THETA: f64 = 0.6;
const GROUP_LAW: (f64, f64) = (0.3, 0.4);

fn label(theta: f64) -> String {
    format!("theta={theta}")
}

/// Keeps the values whose cutoff requirement is met, and notes the rest.
fn adequate(
    values: &[f64],
    theta_of: impl Fn(f64) -> Option<f64>,
    n: usize,
) -> (Vec<f64>, Vec<String>) {
    let mut keep = Vec::new();
    let mut skipped = Vec::new();
    for &v in values {
        match theta_of(v) {
            Some(t) if required_cutoff(t) <= n => keep.push(v),
            Some(t) => skipped.push(format!("{v} needs N >= {}", required_cutoff(t))),
            None => skipped.push(format!("{v} has no theta")),
        }
    }
    (keep, skipped)
}

fn certified(level: Option<usize>) -> String {
    match level {
        Some(l) => format!("certified level {l}"),
        None => "no certified level".to_string(),
    }
}

fn skipped_note(check: Check, skipped: &[String]) -> Check {
    if skipped.is_empty() {
        check
    } else {
        check.with_note(format!(
            "skipped (cutoff too small): {}",
            skipped.join(", ")
        ))
    }
}

pub fn run(cfg: &RunConfig, out: &mut SuiteOutput) {
    let n = cfg.n.unwrap_or(DEFAULT_CUTOFF);
    vacuum(cfg, out, n);
    gibbs(cfg, out, n);
    identities(cfg, out);
    bogoliubov(cfg, out);
    if let Some(sweep) = &cfg.theta_sweep {
        sweep_table(cfg, out, &sweep.points(), n);
    }
}

fn coefficient_error(vac: &ThetaVacuum<f64>) -> f64 {
    let (c, t) = (vac.theta.cosh(), vac.theta.tanh());
    vac.coefficients
        .iter()
        .take(COEFFICIENT_LEVELS + 1)
        .enumerate()
        .map(|(k, cn)| (cn * c - t.powi(k as i32)).abs())
        .fold(0.0, f64::max)
}

fn vacuum(cfg: &RunConfig, out: &mut SuiteOutput, n: usize) {
    let requested: Vec<f64> = cfg
        .theta
        .map(|t| vec![t])
        .unwrap_or_else(|| DEFAULT_THETAS.to_vec());
    let (thetas, skipped) = adequate(&requested, Some, n);
    if thetas.is_empty() {
        let msg = format!("no theta is adequate for N = {n}: {}", skipped.join(", "));
        out.push(
            Check::exact("vacuum.cutoff", "thermo.vacuum", false, None).with_note(msg.clone()),
        );
        out.push(
            Check::exact("vacuum.occupation", "thermo.occupation", false, None).with_note(msg),
        );
        return;
    }
    let tol = cfg.tol(1e-8);
    let (mut coeff, mut occ, mut norm, mut off) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut per_theta = serde_json::Map::new();
    for &theta in &thetas {
        let vac = match theta_vacuum(theta, n) {
            Ok(v) => v,
            Err(e) => {
                return out.push(Check::error(
                    format!("vacuum.{}", label(theta)),
                    "thermo.vacuum",
                    e,
                ))
            }
        };
        let c0 = (vac.coefficients[0] * theta.cosh() - 1.0).abs();
        out.push(
            Check::at_most(
                format!("vacuum.{}.c0-cosh", label(theta)),
                "thermo.vacuum",
                c0,
                tol,
            )
            .with_note("c_0 cosh(theta) = 1"),
        );
        let mean = match vac.mean_occupation() {
            Ok(m) => m,
            Err(e) => return out.push(Check::error("vacuum.occupation", "thermo.occupation", e)),
        };
        let e = coefficient_error(&vac);
        coeff = coeff.max(e);
        occ = occ.max((mean - theta.sinh().powi(2)).abs());
        norm = norm.max((vac.coefficients.iter().map(|c| c * c).sum::<f64>() - 1.0).abs());
        off = off.max(vac.off_diagonal_max(n / 2));
        per_theta.insert(
            label(theta),
            json!({ "coefficients": vac.coefficients.iter().take(COEFFICIENT_LEVELS + 1).collect::<Vec<_>>(), "mean_occupation": mean }),
        );
    }
    let note = format!("N = {n}, levels <= {COEFFICIENT_LEVELS}");
    out.push(skipped_note(
        Check::at_most("vacuum.coefficients", "thermo.vacuum", coeff, tol)
            .with_note(format!("|c_n cosh - tanh^n|, {note}")),
        &skipped,
    ));
    out.push(Check::at_most(
        "vacuum.normalization",
        "thermo.vacuum",
        norm,
        tol,
    ));
    out.push(
        Check::at_most("vacuum.off-diagonal", "thermo.vacuum", off, cfg.tol(1e-12))
            .with_note(format!("levels <= {}", n / 2)),
    );
    out.push(
        Check::at_most("vacuum.occupation", "thermo.occupation", occ, tol)
            .with_note("<N (x) 1> = sinh^2 theta"),
    );
    out.detail("vacuum", Value::Object(per_theta));
}

fn gibbs(cfg: &RunConfig, out: &mut SuiteOutput, n: usize) {
    let omega = cfg.omega;
    let requested: Vec<f64> = cfg
        .beta
        .map(|b| vec![b * omega])
        .unwrap_or_else(|| DEFAULT_BETA_OMEGA.to_vec());
    let (values, skipped) = adequate(&requested, |bw| theta_of_beta(bw / omega, omega).ok(), n);
    if values.is_empty() {
        let msg = format!(
            "no beta omega is adequate for N = {n}: {}",
            skipped.join(", ")
        );
        out.push(Check::exact("gibbs.cutoff", "thermo.gibbs", false, None).with_note(msg.clone()));
        out.push(
            Check::exact("gibbs.correspondence", "thermo.correspondence", false, None)
                .with_note(msg),
        );
        return;
    }
    let (mut solve, mut diag, mut obs, mut offd) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut rows = Vec::new();
    for &bw in &values {
        let beta = bw / omega;
        let rep = theta_of_beta(beta, omega).and_then(|theta| {
            // closed form, kept apart from the bisection
            solve = solve.max((theta - (-bw / 2.0).exp().atanh()).abs());
            gibbs_match(theta, beta, omega, n)
        });
        match rep {
            Ok(r) => {
                diag = diag.max(r.diagonal_deviation);
                obs = obs.max(r.max_observable_deviation());
                offd = offd.max(r.off_diagonal_max);
                rows.push(json!({
                    "beta_omega": bw,
                    "theta": r.theta,
                    "diagonal_deviation": r.diagonal_deviation,
                    "observables": r.observables.iter().map(|o| json!({ "name": o.name, "vacuum": o.vacuum, "gibbs": o.gibbs })).collect::<Vec<_>>(),
                }));
            }
            Err(e) => {
                return out.push(Check::error(
                    format!("gibbs.beta-omega={bw}"),
                    "thermo.gibbs",
                    e,
                ))
            }
        }
    }
    let note = format!("{CORRESPONDENCE_LABEL}: tanh theta = exp(-beta omega / 2), N = {n}");
    out.push(
        Check::at_most(
            "gibbs.theta-solve",
            "thermo.correspondence",
            solve,
            cfg.tol(1e-10),
        )
        .with_note(note.clone()),
    );
    out.push(skipped_note(
        Check::at_most("gibbs.diagonal", "thermo.gibbs", diag, cfg.tol(1e-6))
            .with_note(note.clone()),
        &skipped,
    ));
    out.push(Check::at_most(
        "gibbs.off-diagonal",
        "thermo.gibbs",
        offd,
        cfg.tol(1e-12),
    ));
    out.push(
        Check::at_most("gibbs.observables", "thermo.gibbs", obs, cfg.tol(1e-6))
            .with_note("<N>, <a + a^dagger>, <H>"),
    );
    out.detail(
        "gibbs",
        json!({ "label": CORRESPONDENCE_LABEL, "points": rows }),
    );
}

fn identities(cfg: &RunConfig, out: &mut SuiteOutput) {
    let n = IDENTITY_CUTOFF;
    let coproduct = || -> FockResult<f64> {
        let mut worst = 0.0f64;
        for op in [annihilation::<f64>(n)?, creation(n)?, number(n)?] {
            let (l, r) = coproduct_identity_residual(&op)?;
            worst = worst.max(l).max(r);
        }
        Ok(worst)
    };
    match coproduct() {
        Ok(r) => out.push(
            Check::at_most(
                "coproduct.sum-difference",
                "thermo.coproduct",
                r,
                cfg.tol(1e-14),
            )
            .with_note("a, a^dagger, N"),
        ),
        Err(e) => out.push(Check::error(
            "coproduct.sum-difference",
            "thermo.coproduct",
            e,
        )),
    }
    match ab_reconstruction::<f64>(n) {
        Ok(r) => out.push(
            Check::at_most(
                "ab.reconstruction",
                "thermo.reconstruction",
                r.max(),
                cfg.tol(1e-12),
            )
            .with_note(format!(
                "X {:.1e}, P {:.1e}, eta {:.1e}, pi {:.1e}",
                r.x_mean, r.p_mean, r.eta, r.pi
            )),
        ),
        Err(e) => out.push(Check::error(
            "ab.reconstruction",
            "thermo.reconstruction",
            e,
        )),
    }
    let ladders = || -> FockResult<f64> {
        let (a, b) = ab_operators::<f64>(n)?;
        let level = n / 2;
        Ok(ladder_commutator_residual(&a, &a, 1.0, level)?
            .max(ladder_commutator_residual(&b, &b, 1.0, level)?)
            .max(ladder_commutator_residual(&a, &b, 0.0, level)?))
    };
    match ladders() {
        Ok(r) => out.push(
            Check::at_most("ab.ladders", "thermo.ab-ladders", r, cfg.tol(1e-12)).with_note(
                format!(
                    "[A,A^dagger] = [B,B^dagger] = 1, [A,B^dagger] = 0 on levels <= {}",
                    n / 2
                ),
            ),
        ),
        Err(e) => out.push(Check::error("ab.ladders", "thermo.ab-ladders", e)),
    }
    match deformed_check::<f64>(n, cfg.h.unwrap_or(1e-3)) {
        Ok(d) => {
            out.push(
                Check::at_most(
                    "deformed.limit",
                    "thermo.deformation",
                    d.limit_a.max(d.limit_b),
                    cfg.tol(1e-14),
                )
                .with_note("A_q, B_q at theta = 0"),
            );
            out.push(
                Check::within(
                    "deformed.derivative-convergence",
                    "thermo.deformation",
                    d.ratio,
                    3.5,
                    4.5,
                )
                .with_note(format!(
                    "dA_q/dtheta = B, residual {:.3e} -> {:.3e}",
                    d.derivative_residual[0], d.derivative_residual[1]
                )),
            );
        }
        Err(e) => out.push(Check::error("deformed", "thermo.deformation", e)),
    }
}

fn bogoliubov(cfg: &RunConfig, out: &mut SuiteOutput) {
    let theta = DERIVATIVE_THETA;
    let nb = cfg.n.unwrap_or(BOGOLIUBOV_CUTOFF);
    let tol = cfg.tol(1e-6);
    match verify_bogoliubov(theta, nb, tol) {
        Ok(r) => {
            let note = format!(
                "theta = {theta}, N = {nb}, {}",
                certified(r.certified_level)
            );
            out.push(
                Check::at_most(
                    "bogoliubov.conjugation",
                    "thermo.bogoliubov",
                    r.conjugation_residual.max(r.conjugation_residual_tilde),
                    tol,
                )
                .with_note(note.clone()),
            );
            out.push(
                Check::at_most(
                    "bogoliubov.annihilation",
                    "thermo.annihilation",
                    r.annihilation_norm.max(r.annihilation_norm_tilde),
                    tol,
                )
                .with_note(format!(
                    "a(theta)|0(theta)> and a~(theta)|0(theta)> on levels <= {}",
                    nb / 2
                )),
            );
            out.push(Check::at_most(
                "bogoliubov.commutator",
                "thermo.bogoliubov",
                r.commutator_residual,
                cfg.tol(1e-10),
            ));
            out.push(Check::at_most(
                "bogoliubov.unitarity",
                "thermo.bogoliubov",
                r.unitarity_deviation,
                cfg.tol(1e-10),
            ));
            out.detail(
                "bogoliubov",
                json!({
                    "theta": theta,
                    "cutoff": nb,
                    "certified_level": r.certified_level,
                    "conjugation_residual": r.conjugation_residual,
                    "conjugation_residual_tilde": r.conjugation_residual_tilde,
                    "conjugation_residual_half_block": r.conjugation_residual_half,
                }),
            );
        }
        Err(e) => out.push(Check::error("bogoliubov", "thermo.bogoliubov", e)),
    }

    let ng = cfg.n.unwrap_or(DEFAULT_CUTOFF);
    match group_law(GROUP_LAW.0, GROUP_LAW.1, ng, tol) {
        Ok(g) => out.push(
            Check::at_most("group-law", "thermo.group-law", g.residual, tol).with_note(format!(
                "theta = {}, theta_bar = {}, N = {ng}, {}",
                GROUP_LAW.0,
                GROUP_LAW.1,
                certified(g.certified_level)
            )),
        ),
        Err(e) => out.push(Check::error("group-law", "thermo.group-law", e)),
    }

    let h = cfg.h.unwrap_or(1e-3);
    match theta_derivative_check(theta, nb, h) {
        Ok(d) => {
            out.push(
                Check::at_most(
                    "derivative.residual",
                    "thermo.derivative",
                    d.residual[1].max(d.residual_tilde[1]),
                    tol,
                )
                .with_note(format!("h/2 = {:e}", h / 2.0)),
            );
            out.push(Check::within(
                "derivative.convergence",
                "thermo.derivative",
                d.ratio,
                3.5,
                4.5,
            ));
            out.push(Check::within(
                "derivative.convergence-tilde",
                "thermo.derivative",
                d.ratio_tilde,
                3.5,
                4.5,
            ));
        }
        Err(e) => out.push(Check::error("derivative", "thermo.derivative", e)),
    }
}

fn sweep_table(cfg: &RunConfig, out: &mut SuiteOutput, thetas: &[f64], n: usize) {
    let mut header: Vec<String> = vec!["theta".into()];
    header.extend((0..n).map(|k| format!("c{k}")));
    header.extend(["mean_occupation", "gibbs_deviation", "bogoliubov_residual"].map(String::from));
    let mut table = Table::with_header(header);
    let (mut worst, mut skipped) = (0.0f64, Vec::new());
    for &theta in thetas {
        let mut row = vec![Cell::Num(theta)];
        if required_cutoff(theta) > n {
            skipped.push(format!("{theta} needs N >= {}", required_cutoff(theta)));
            row.extend((0..n + 3).map(|_| Cell::Num(f64::NAN)));
            table.push(row);
            continue;
        }
        let vac = match theta_vacuum(theta, n) {
            Ok(v) => v,
            Err(e) => return out.push(Check::error("sweep", "thermo.vacuum", e)),
        };
        worst = worst.max(coefficient_error(&vac));
        row.extend(vac.coefficients.iter().map(|c| Cell::Num(*c)));
        row.push(Cell::Num(vac.mean_occupation().unwrap_or(f64::NAN)));
        // theta = 0 is the zero-temperature end, where beta is infinite
        let gibbs_dev = if theta > 0.0 {
            let beta = -2.0 * theta.tanh().ln() / cfg.omega;
            gibbs_match(theta, beta, cfg.omega, n)
                .map(|r| r.diagonal_deviation)
                .unwrap_or(f64::NAN)
        } else {
            (vac.reduced_density()[(0, 0)].re - 1.0).abs()
        };
        row.push(Cell::Num(gibbs_dev));
        let (a, b) = vac.annihilation_norms(n / 2);
        row.push(Cell::Num(a.max(b)));
        table.push(row);
    }
    out.push(skipped_note(
        Check::at_most("sweep.coefficients", "thermo.vacuum", worst, cfg.tol(1e-8))
            .with_note(format!("{} points", thetas.len())),
        &skipped,
    ));
    out.table = Some(table);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adequacy_filter_reports_what_it_drops() {
        let (keep, skipped) = adequate(&[0.3, 3.0], Some, 20);
        assert_eq!(keep, vec![0.3]);
        assert_eq!(skipped.len(), 1);
        assert!(skipped[0].starts_with("3 needs N >= "));
    }
}
