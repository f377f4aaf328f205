use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use duron_core::moyal::BracketKind;
use duron_lab::{
    eval_expression, exit_code, phase_bracket, preset_table, run_suites, write_report, RunConfig,
    Settings, Suite, EXIT_FAIL, EXIT_USAGE,
};

#[derive(Parser)]
#[command(
    name = "duron-lab",
    version,
    about = "Runs the duron-core verification suites"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Process algebra and CCR kernel suite, or a single expression or preset.
    Algebra {
        #[command(subcommand)]
        action: Option<AlgebraAction>,
        #[command(flatten)]
        common: Common,
    },
    /// Classical bi-local action suite.
    BilocalClassical(Common),
    /// Two-time density matrix and quantum Hamilton-Jacobi suite.
    BilocalQuantum(Common),
    /// Star product and bracket suite, or a single bracket.
    Moyal {
        #[command(subcommand)]
        action: Option<MoyalAction>,
        #[command(flatten)]
        common: Common,
    },
    /// Liouville and energy super-operator suite.
    Superops(Common),
    /// Thermofield doubling suite.
    Thermofield(Common),
    /// Runs every suite; exits 0 only when every check passes.
    VerifyAll(Common),
    /// Runs the suites named by `suites` in the config file or on the command line.
    Run {
        #[arg(long)]
        suites: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand)]
enum AlgebraAction {
    /// Reduces a bracket expression such as "[A,B][B,C]".
    Eval { expr: String },
    /// Prints the bracket table of a named preset as JSON.
    Preset { name: String },
}

#[derive(Subcommand)]
enum MoyalAction {
    /// Bracket of two polynomials in x, p and h.
    Bracket {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        /// moyal, baker or poisson
        #[arg(long, default_value = "moyal")]
        kind: String,
        /// Print the term list as JSON instead of the reduced text.
        #[arg(long)]
        json: bool,
    },
}

/// Settings shared by every suite. Values are parsed and validated by the config layer, so
/// errors name the field whichever way the value arrived.
#[derive(Args, Default)]
struct Common {
    /// Flat `key = value` file; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Fock cutoff of the thermofield suite.
    #[arg(long)]
    n: Option<String>,
    /// Level count of the random systems in bilocal-quantum and superops.
    #[arg(long)]
    levels: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Scale factor applied to the absolute tolerances.
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// json or csv
    #[arg(long)]
    format: Option<String>,
    /// Record the wall-clock runtime in the report.
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    theta: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    omega: Option<String>,
    /// start:end:steps
    #[arg(long)]
    theta_sweep: Option<String>,
    #[arg(long)]
    h: Option<String>,
    #[arg(long)]
    dx: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    #[arg(long)]
    grid: Option<String>,
    /// free, oscillator or grid1d
    #[arg(long)]
    system: Option<String>,
}

impl Common {
    fn settings(&self, suites: Option<&str>) -> Result<Settings, duron_lab::ConfigError> {
        let mut s = match &self.config {
            Some(path) => Settings::from_file(path)?,
            None => Settings::new(),
        };
        let flags = [
            ("suites", suites),
            ("n", self.n.as_deref()),
            ("levels", self.levels.as_deref()),
            ("seed", self.seed.as_deref()),
            ("tol", self.tol.as_deref()),
            ("out", self.out.as_deref()),
            ("format", self.format.as_deref()),
            ("theta", self.theta.as_deref()),
            ("beta", self.beta.as_deref()),
            ("omega", self.omega.as_deref()),
            ("theta_sweep", self.theta_sweep.as_deref()),
            ("h", self.h.as_deref()),
            ("dx", self.dx.as_deref()),
            ("dt", self.dt.as_deref()),
            ("grid", self.grid.as_deref()),
            ("system", self.system.as_deref()),
            ("timing", self.timing.then_some("true")),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                s.push(key, v)?;
            }
        }
        Ok(s)
    }

    /// `fixed` pins the suite list for the single-suite commands and `verify-all`.
    fn run(&self, fixed: Option<Vec<Suite>>, suites: Option<&str>) -> ExitCode {
        let pinned = fixed.is_some();
        let mut cfg = RunConfig::new(fixed.unwrap_or_default());
        // a `suites` entry in a shared config file does not apply to a single-suite command
        let applied = self
            .settings(suites)
            .and_then(|s| if pinned { s.without("suites") } else { s }.apply(&mut cfg));
        if let Err(e) = applied {
            eprintln!("{e}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
        let report = run_suites(&cfg);
        if let Err(e) = write_report(&report, &cfg) {
            eprintln!("{e}");
            return ExitCode::from(EXIT_FAIL as u8);
        }
        eprintln!("passed {}, failed {}", report.passed(), report.failed());
        for f in report.failures() {
            eprintln!("FAIL {f}");
        }
        ExitCode::from(exit_code(&report) as u8)
    }
}

/// Prints a line to stdout; a closed pipe is not an error for a one-shot command.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("{msg}");
    ExitCode::from(EXIT_USAGE as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Algebra {
            action: Some(AlgebraAction::Eval { expr }),
            ..
        } => match eval_expression(&expr) {
            Ok(text) => {
                emit(&text);
                ExitCode::SUCCESS
            }
            Err(e) => usage_error(e),
        },
        Command::Algebra {
            action: Some(AlgebraAction::Preset { name }),
            ..
        } => match preset_table(&name) {
            Ok(table) => {
                emit(&serde_json::to_string_pretty(&table).expect("table serializes"));
                ExitCode::from(if table.all_pass() { 0 } else { EXIT_FAIL as u8 })
            }
            Err(e) => usage_error(e),
        },
        Command::Algebra {
            action: None,
            common,
        } => common.run(Some(vec![Suite::Algebra]), None),
        Command::Moyal {
            action: Some(MoyalAction::Bracket { f, g, kind, json }),
            ..
        } => {
            let kind = match kind.parse::<BracketKind>() {
                Ok(k) => k,
                Err(e) => return usage_error(e),
            };
            match phase_bracket(kind, &f, &g) {
                Ok((text, doc)) => {
                    if json {
                        emit(&serde_json::to_string_pretty(&doc).expect("bracket serializes"));
                    } else {
                        emit(&text);
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => usage_error(e),
            }
        }
        Command::Moyal {
            action: None,
            common,
        } => common.run(Some(vec![Suite::Moyal]), None),
        Command::BilocalClassical(c) => c.run(Some(vec![Suite::BilocalClassical]), None),
        Command::BilocalQuantum(c) => c.run(Some(vec![Suite::BilocalQuantum]), None),
        Command::Superops(c) => c.run(Some(vec![Suite::Superops]), None),
        Command::Thermofield(c) => c.run(Some(vec![Suite::Thermofield]), None),
        Command::VerifyAll(c) => c.run(Some(Suite::ALL.to_vec()), None),
        Command::Run { suites, common } => common.run(None, suites.as_deref()),
    }
}
