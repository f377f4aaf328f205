//! Run configuration: a flat `key = value` file plus command-line overrides.
//!
//! Every setting goes through [`Settings::set`], so a bad value names its field whether it
//! came from a file or from a flag.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde_json::{json, Value};
use thiserror::Error;

use crate::suites::Suite;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("config: unknown field `{field}`{}", line_suffix(*line))]
    UnknownField { field: String, line: Option<usize> },
    #[error("config: field `{field}`: cannot parse `{value}` as {expected}{}", line_suffix(*line))]
    Invalid {
        field: String,
        value: String,
        expected: &'static str,
        line: Option<usize>,
    },
    #[error("config: line {line}: expected `key = value`, found `{text}`")]
    Malformed { line: usize, text: String },
    #[error("config: field `{field}`: {msg}")]
    Constraint { field: String, msg: String },
    #[error("config: cannot read {path}: {msg}")]
    Io { path: String, msg: String },
}

fn line_suffix(line: Option<usize>) -> String {
    line.map(|l| format!(" (line {l})")).unwrap_or_default()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
        })
    }
}

/// `a:b:steps`, evaluated at `steps + 1` equally spaced points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

impl Sweep {
    pub fn points(&self) -> Vec<f64> {
        if self.steps == 0 {
            return vec![self.start];
        }
        (0..=self.steps)
            .map(|k| self.start + (self.end - self.start) * k as f64 / self.steps as f64)
            .collect()
    }
}

impl fmt::Display for Sweep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.end, self.steps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum System {
    Free,
    Oscillator,
    Grid1d,
}

impl System {
    pub fn name(self) -> &'static str {
        match self {
            System::Free => "free",
            System::Oscillator => "oscillator",
            System::Grid1d => "grid1d",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub suites: Vec<Suite>,
    /// Fock cutoff of the thermofield suite.
    pub n: Option<usize>,
    /// Level count of the random systems in bilocal-quantum, largest level count in superops.
    pub levels: Option<usize>,
    pub seed: u64,
    /// Multiplies every absolute tolerance.
    pub tol: f64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub theta: Option<f64>,
    pub beta: Option<f64>,
    pub omega: f64,
    pub theta_sweep: Option<Sweep>,
    pub h: Option<f64>,
    pub dx: Option<f64>,
    pub dt: Option<f64>,
    pub grid: Option<usize>,
    pub system: Option<System>,
    pub timing: bool,
}

pub const DEFAULT_SEED: u64 = 7;
/// The doubled space has `n^2` states and is stored densely; beyond this the matrices
/// outgrow a few gigabytes.
pub const MAX_CUTOFF: usize = 72;
pub const MAX_LEVELS: usize = 16;

impl RunConfig {
    pub fn new(suites: Vec<Suite>) -> Self {
        Self {
            suites,
            n: None,
            levels: None,
            seed: DEFAULT_SEED,
            tol: 1.0,
            out: None,
            format: Format::Json,
            theta: None,
            beta: None,
            omega: 1.0,
            theta_sweep: None,
            h: None,
            dx: None,
            dt: None,
            grid: None,
            system: None,
            timing: false,
        }
    }

    /// Scaled absolute tolerance.
    pub fn tol(&self, base: f64) -> f64 {
        base * self.tol
    }

    /// The configuration as it appears in a report. The output path is left out, so the
    /// same run written to two places produces the same bytes.
    pub fn to_json(&self) -> Value {
        json!({
            "suites": self.suites.iter().map(|s| s.name()).collect::<Vec<_>>(),
            "seed": self.seed,
            "n": self.n,
            "levels": self.levels,
            "tol": self.tol,
            "format": self.format.to_string(),
            "theta": self.theta,
            "beta": self.beta,
            "omega": self.omega,
            "theta_sweep": self.theta_sweep.map(|s| s.to_string()),
            "h": self.h,
            "dx": self.dx,
            "dt": self.dt,
            "grid": self.grid,
            "system": self.system.map(System::name),
            "timing": self.timing,
        })
    }
}

/// Raw `key = value` settings, applied in order on top of the defaults.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    entries: Vec<(String, String, Option<usize>)>,
}

pub const FIELDS: [&str; 17] = [
    "suites",
    "n",
    "levels",
    "seed",
    "tol",
    "out",
    "format",
    "theta",
    "beta",
    "omega",
    "theta_sweep",
    "h",
    "dx",
    "dt",
    "grid",
    "system",
    "timing",
];

impl Settings {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses a flat config file: one `key = value` per line, `#` starts a comment.
    pub fn parse_text(text: &str) -> Result<Self, ConfigError> {
        let mut out = Self::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Malformed {
                line: k + 1,
                text: raw.trim().to_string(),
            })?;
            out.push_at(key.trim(), value.trim(), Some(k + 1))?;
        }
        Ok(out)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        Self::parse_text(&text)
    }

    pub fn push(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        self.push_at(key, value, None)
    }

    fn push_at(&mut self, key: &str, value: &str, line: Option<usize>) -> Result<(), ConfigError> {
        let key = key.replace('-', "_");
        if !FIELDS.contains(&key.as_str()) {
            return Err(ConfigError::UnknownField { field: key, line });
        }
        self.entries.push((key, value.to_string(), line));
        Ok(())
    }

    /// Later settings win over earlier ones.
    pub fn extend(&mut self, other: Settings) {
        self.entries.extend(other.entries);
    }

    /// Drops every entry for `key`.
    pub fn without(mut self, key: &str) -> Self {
        self.entries.retain(|(k, _, _)| k != key);
        self
    }

    pub fn apply(&self, cfg: &mut RunConfig) -> Result<(), ConfigError> {
        for (key, value, line) in &self.entries {
            set(cfg, key, value, *line)?;
        }
        validate(cfg)
    }
}

fn parse<T: FromStr>(
    field: &str,
    value: &str,
    expected: &'static str,
    line: Option<usize>,
) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::Invalid {
        field: field.to_string(),
        value: value.to_string(),
        expected,
        line,
    })
}

fn set(
    cfg: &mut RunConfig,
    key: &str,
    value: &str,
    line: Option<usize>,
) -> Result<(), ConfigError> {
    let real = |v: &str| parse::<f64>(key, v, "a real number", line);
    let count = |v: &str| parse::<usize>(key, v, "a non-negative integer", line);
    let invalid = |expected| ConfigError::Invalid {
        field: key.to_string(),
        value: value.to_string(),
        expected,
        line,
    };
    match key {
        "suites" => {
            cfg.suites = value
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<Suite>()
                        .map_err(|_| invalid("a comma-separated list of suite names"))
                })
                .collect::<Result<_, _>>()?;
        }
        "n" => cfg.n = Some(count(value)?),
        "levels" => cfg.levels = Some(count(value)?),
        "seed" => cfg.seed = parse(key, value, "an unsigned 64-bit integer", line)?,
        "tol" => cfg.tol = real(value)?,
        "out" => cfg.out = Some(PathBuf::from(value)),
        "format" => {
            cfg.format = match value {
                "json" => Format::Json,
                "csv" => Format::Csv,
                _ => return Err(invalid("`json` or `csv`")),
            }
        }
        "theta" => cfg.theta = Some(real(value)?),
        "beta" => cfg.beta = Some(real(value)?),
        "omega" => cfg.omega = real(value)?,
        "theta_sweep" => {
            let parts: Vec<&str> = value.split(':').collect();
            let sweep = match parts.as_slice() {
                [a, b, s] => (
                    a.trim().parse::<f64>(),
                    b.trim().parse::<f64>(),
                    s.trim().parse::<usize>(),
                ),
                _ => return Err(invalid("`start:end:steps`")),
            };
            match sweep {
                (Ok(start), Ok(end), Ok(steps)) => {
                    cfg.theta_sweep = Some(Sweep { start, end, steps })
                }
                _ => return Err(invalid("`start:end:steps`")),
            }
        }
        "h" => cfg.h = Some(real(value)?),
        "dx" => cfg.dx = Some(real(value)?),
        "dt" => cfg.dt = Some(real(value)?),
        "grid" => cfg.grid = Some(count(value)?),
        "system" => {
            cfg.system = Some(match value {
                "free" => System::Free,
                "oscillator" => System::Oscillator,
                "grid1d" => System::Grid1d,
                _ => return Err(invalid("`free`, `oscillator` or `grid1d`")),
            })
        }
        "timing" => cfg.timing = parse(key, value, "`true` or `false`", line)?,
        _ => {
            return Err(ConfigError::UnknownField {
                field: key.to_string(),
                line,
            })
        }
    }
    Ok(())
}

fn constraint(field: &str, msg: &str) -> ConfigError {
    ConfigError::Constraint {
        field: field.to_string(),
        msg: msg.to_string(),
    }
}

fn positive(field: &str, v: Option<f64>) -> Result<(), ConfigError> {
    match v {
        Some(x) if !(x.is_finite() && x > 0.0) => {
            Err(constraint(field, "must be a positive finite number"))
        }
        _ => Ok(()),
    }
}

pub fn validate(cfg: &RunConfig) -> Result<(), ConfigError> {
    if cfg.suites.is_empty() {
        return Err(constraint("suites", "at least one suite is required"));
    }
    if matches!(cfg.n, Some(n) if !(2..=MAX_CUTOFF).contains(&n)) {
        return Err(constraint("n", &format!("must be in 2..={MAX_CUTOFF}")));
    }
    if matches!(cfg.levels, Some(n) if !(2..=MAX_LEVELS).contains(&n)) {
        return Err(constraint(
            "levels",
            &format!("must be in 2..={MAX_LEVELS}"),
        ));
    }
    positive("tol", Some(cfg.tol))?;
    positive("omega", Some(cfg.omega))?;
    positive("beta", cfg.beta)?;
    positive("h", cfg.h)?;
    positive("dx", cfg.dx)?;
    positive("dt", cfg.dt)?;
    if matches!(cfg.theta, Some(t) if !(t.is_finite() && t >= 0.0)) {
        return Err(constraint("theta", "must be a non-negative finite number"));
    }
    if let Some(s) = cfg.theta_sweep {
        if !(s.start.is_finite() && s.end.is_finite() && 0.0 <= s.start && s.start <= s.end) {
            return Err(constraint("theta_sweep", "needs 0 <= start <= end"));
        }
    }
    if matches!(cfg.grid, Some(g) if !(2..=401).contains(&g)) {
        return Err(constraint("grid", "must lie in 2..=401"));
    }
    for suite in &cfg.suites {
        if let Some(sys) = cfg.system {
            if !suite.systems().contains(&sys) {
                return Err(constraint(
                    "system",
                    &format!("`{}` is not available for {}", sys.name(), suite.name()),
                ));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> RunConfig {
        RunConfig::new(vec![Suite::Algebra])
    }

    #[test]
    fn file_then_overrides() {
        let mut s = Settings::parse_text("# run\nseed = 11\nn=40  # cutoff\ntol = 2\n").unwrap();
        let mut cli = Settings::new();
        cli.push("seed", "3").unwrap();
        s.extend(cli);
        let mut cfg = base();
        s.apply(&mut cfg).unwrap();
        assert_eq!((cfg.seed, cfg.n, cfg.tol), (3, Some(40), 2.0));
    }

    #[test]
    fn errors_name_the_field() {
        let err = Settings::parse_text("seed = 1\nbogus = 2\n").unwrap_err();
        assert_eq!(
            err,
            ConfigError::UnknownField {
                field: "bogus".into(),
                line: Some(2)
            }
        );
        let mut cfg = base();
        let err = Settings::parse_text("n = -3")
            .unwrap()
            .apply(&mut cfg)
            .unwrap_err();
        assert!(err.to_string().contains("`n`"), "{err}");
        let err = Settings::parse_text("tol = 0")
            .unwrap()
            .apply(&mut cfg)
            .unwrap_err();
        assert!(err.to_string().contains("`tol`"), "{err}");
        assert!(matches!(
            Settings::parse_text("just words"),
            Err(ConfigError::Malformed { line: 1, .. })
        ));
    }

    #[test]
    fn sweep_points() {
        let mut cfg = base();
        let mut s = Settings::new();
        s.push("theta-sweep", "0:1:4").unwrap();
        s.apply(&mut cfg).unwrap();
        assert_eq!(
            cfg.theta_sweep.unwrap().points(),
            vec![0.0, 0.25, 0.5, 0.75, 1.0]
        );
    }

    #[test]
    fn system_must_fit_the_suite() {
        let mut cfg = RunConfig::new(vec![Suite::BilocalClassical]);
        let mut s = Settings::new();
        s.push("system", "grid1d").unwrap();
        assert!(matches!(
            s.apply(&mut cfg),
            Err(ConfigError::Constraint { .. })
        ));
    }
}
