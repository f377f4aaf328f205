//! Verification runner for `duron-core`: configuration, suite orchestration and reports.

pub mod check;
pub mod config;
pub mod report;
pub mod suites;

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use duron_core::ccr::{verify_table_named, CcrError, TableReport};
use duron_core::moyal::{bracket, parse_poly, BracketKind, MoyalError};
use duron_core::process::{parse, print, ProcessError};
use duron_core::GaussRational;
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

pub use config::{ConfigError, Format, RunConfig, Settings};
pub use report::Report;
pub use suites::{Suite, SuiteOutput};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Runs the selected suites on the rayon pool. Results keep the order of `cfg.suites`.
pub fn run_suites(cfg: &RunConfig) -> Report {
    let start = Instant::now();
    let outputs: Vec<SuiteOutput> = cfg.suites.par_iter().map(|s| s.run(cfg)).collect();
    let runtime = cfg.timing.then(|| start.elapsed().as_millis());
    Report::new(cfg, outputs, runtime)
}

pub fn exit_code(report: &Report) -> i32 {
    if report.all_pass() {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("cannot write {path}: {msg}")]
    Io { path: String, msg: String },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

fn io_error(path: &Path) -> impl Fn(io::Error) -> OutputError + '_ {
    move |e| OutputError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    }
}

/// The JSON report that accompanies a CSV table written to `out`.
pub fn summary_path(out: &Path) -> PathBuf {
    out.with_extension("report.json")
}

/// Writes the report to `cfg.out`, or to stdout when no path is set.
///
/// CSV output carries the suite data table when there is one and the check rows otherwise.
/// With a path, the full JSON report is written next to it.
pub fn write_report(report: &Report, cfg: &RunConfig) -> Result<(), OutputError> {
    match (cfg.format, &cfg.out) {
        (Format::Json, Some(path)) => {
            let mut f = File::create(path).map_err(io_error(path))?;
            f.write_all(report.to_json_text().as_bytes())
                .map_err(io_error(path))?;
            f.write_all(b"\n").map_err(io_error(path))
        }
        (Format::Json, None) => writeln!(io::stdout().lock(), "{}", report.to_json_text())
            .map_err(io_error(Path::new("stdout"))),
        (Format::Csv, out) => {
            let table = report.data_table().unwrap_or_else(|| report.checks_table());
            match out {
                Some(path) => {
                    table.write_csv(File::create(path).map_err(io_error(path))?)?;
                    let sidecar = summary_path(path);
                    std::fs::write(&sidecar, report.to_json_text() + "\n")
                        .map_err(io_error(&sidecar))
                }
                None => Ok(table.write_csv(io::stdout().lock())?),
            }
        }
    }
}

/// Evaluates a bracket expression and prints the reduced form.
pub fn eval_expression(text: &str) -> Result<String, ProcessError> {
    Ok(print(&parse::<GaussRational>(text)?.evaluate()?))
}

/// Computes one bracket of two phase-space polynomials, as text and as a term list.
pub fn phase_bracket(kind: BracketKind, f: &str, g: &str) -> Result<(String, Value), MoyalError> {
    let (f, g) = (parse_poly(f)?, parse_poly(g)?);
    let result = bracket(kind, &f, &g);
    let terms = serde_json::to_value(result.term_list()).unwrap_or(Value::Null);
    let doc = json!({ "kind": kind, "f": f.to_string(), "g": g.to_string(), "result": result.to_string(), "terms": terms });
    Ok((result.to_string(), doc))
}

pub fn preset_table(name: &str) -> Result<TableReport, CcrError> {
    verify_table_named(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_reduces_a_chain() {
        assert_eq!(eval_expression("[A,B][B,C]").unwrap(), "[A,C]");
        assert!(eval_expression("[A,B][C,D]").is_err());
    }

    #[test]
    fn bracket_of_x_and_p() {
        let (text, doc) = phase_bracket(BracketKind::Poisson, "x", "p").unwrap();
        assert_eq!(text, "1");
        assert_eq!(doc["kind"], "poisson");
    }

    #[test]
    fn sidecar_sits_next_to_the_table() {
        assert_eq!(
            summary_path(Path::new("a/b.csv")),
            PathBuf::from("a/b.report.json")
        );
    }
}
