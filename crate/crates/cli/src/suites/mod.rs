//! The verification suites, one per engine.

mod algebra;
mod classical;
mod moyal;
mod quantum;
mod superops;
mod thermofield;

use std::collections::BTreeSet;
use std::str::FromStr;

use serde_json::{Map, Value};

use crate::check::Check;
use crate::config::{RunConfig, System};
use crate::report::Table;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Algebra,
    BilocalClassical,
    BilocalQuantum,
    Moyal,
    Superops,
    Thermofield,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Algebra,
        Suite::BilocalClassical,
        Suite::BilocalQuantum,
        Suite::Moyal,
        Suite::Superops,
        Suite::Thermofield,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::BilocalClassical => "bilocal-classical",
            Suite::BilocalQuantum => "bilocal-quantum",
            Suite::Moyal => "moyal",
            Suite::Superops => "superops",
            Suite::Thermofield => "thermofield",
        }
    }

    /// Systems the `system` setting may select for this suite.
    pub fn systems(self) -> &'static [System] {
        match self {
            Suite::BilocalClassical => &[System::Free, System::Oscillator],
            Suite::BilocalQuantum => &[System::Free, System::Oscillator, System::Grid1d],
            _ => &[],
        }
    }

    /// Every anchor a full run of the suite must report on.
    pub fn anchors(self) -> &'static [&'static str] {
        match self {
            Suite::Algebra => algebra::ANCHORS,
            Suite::BilocalClassical => classical::ANCHORS,
            Suite::BilocalQuantum => quantum::ANCHORS,
            Suite::Moyal => moyal::ANCHORS,
            Suite::Superops => superops::ANCHORS,
            Suite::Thermofield => thermofield::ANCHORS,
        }
    }

    /// Runs the suite and appends the anchor-coverage row.
    pub fn run(self, cfg: &RunConfig) -> SuiteOutput {
        let mut out = SuiteOutput::new(self);
        match self {
            Suite::Algebra => algebra::run(cfg, &mut out),
            Suite::BilocalClassical => classical::run(cfg, &mut out),
            Suite::BilocalQuantum => quantum::run(cfg, &mut out),
            Suite::Moyal => moyal::run(cfg, &mut out),
            Suite::Superops => superops::run(cfg, &mut out),
            Suite::Thermofield => thermofield::run(cfg, &mut out),
        }
        let coverage = coverage_check(self, &out.checks);
        out.checks.push(coverage);
        out
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

/// Checks, free-form details and an optional data table from one suite.
#[derive(Debug, Clone)]
pub struct SuiteOutput {
    pub suite: Suite,
    pub checks: Vec<Check>,
    pub details: Map<String, Value>,
    pub table: Option<Table>,
}

impl SuiteOutput {
    fn new(suite: Suite) -> Self {
        Self {
            suite,
            checks: Vec::new(),
            details: Map::new(),
            table: None,
        }
    }

    fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    fn detail(&mut self, key: &str, v: Value) {
        self.details.insert(key.to_string(), v);
    }
}

pub const PLUMBING: &str = "plumbing";

/// Every required anchor has a row, and no row carries an anchor outside the map.
fn coverage_check(suite: Suite, checks: &[Check]) -> Check {
    let required: BTreeSet<&str> = suite.anchors().iter().copied().collect();
    let seen: BTreeSet<&str> = checks.iter().map(|c| c.anchor).collect();
    let missing: Vec<&str> = required.difference(&seen).copied().collect();
    let stray: Vec<&str> = seen
        .iter()
        .copied()
        .filter(|a| *a != PLUMBING && !required.contains(a))
        .collect();
    let c = Check::count("anchor-coverage", PLUMBING, missing.len() + stray.len());
    if missing.is_empty() && stray.is_empty() {
        c.with_note(format!("{} anchors covered", required.len()))
    } else {
        c.with_note(format!(
            "missing: [{}]; unmapped: [{}]",
            missing.join(", "),
            stray.join(", ")
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coverage_reports_missing_and_unmapped() {
        let rows = vec![
            Check::count("x", "groupoid.succession", 0),
            Check::count("y", "made.up", 0),
        ];
        let c = coverage_check(Suite::Algebra, &rows);
        assert!(!c.pass);
        assert!(c.note.unwrap().contains("made.up"));
    }

    #[test]
    fn names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
            assert!(!s.anchors().is_empty());
        }
    }
}
