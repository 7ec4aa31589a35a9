//! Command-line front end. The binary is a thin wrapper around [`run`].
//!
//! Exit codes: 0 when every check passes, 1 on a failed check, 2 when a
//! numeric sign could not be decided, 64 for usage and input errors.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config::{parse_backend, Overrides, Settings};
use crate::error::{Error, Result};
use crate::exterior::Form;
use crate::io::{parse_form, AnyForm, JsonScalar};
use crate::report::Report;
use crate::scalar::Backend;
use crate::verify;

pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "threeform", version, about = "Invariants, orbits and leaf geometry of 3-forms on symplectic 6-space")]
pub struct Cli {
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Per-axis grid resolution.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Numeric tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Write the JSON output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_parser = ["rational", "float"])]
    pub backend: Option<String>,
    /// File of key=value lines (seed, samples, tolerance_numeric, grid).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a 3-form given as JSON (a path, or `-` for stdin).
    Classify {
        form: String,
        /// Symplectic form as a 2-form JSON file; enables the Sp orbit.
        #[arg(long)]
        omega: Option<PathBuf>,
    },
    /// Run a seeded verification suite.
    Verify { suite: String },
    /// Build one of the model geometries and run its checks.
    Example {
        #[command(subcommand)]
        example: ExampleCommand,
    },
    /// Print K, F, Q, q and the subspace dimensions of a 3-form.
    Invariants {
        form: String,
        #[arg(long)]
        omega: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ExampleCommand {
    /// Flat torus degeneration at parameter t in (0, 1].
    Torus {
        #[arg(long, default_value = "1/4")]
        t: String,
    },
    /// Cone-like example on the bundle of 2-forms over a flat 3-space.
    Lambda2 {
        #[arg(long = "C", default_value_t = 1.0, allow_hyphen_values = true)]
        c: f64,
        /// `identity`, `diag:a,b,c` or nine comma-separated entries.
        #[arg(long, default_value = "identity")]
        g: String,
    },
    /// Local K3 × T² patch for a positive function f(x2, y2).
    K3patch {
        #[arg(long, default_value = "1")]
        f: String,
    },
}

impl Cli {
    fn overrides(&self) -> Result<Overrides> {
        Ok(Overrides {
            seed: self.seed,
            samples: self.samples,
            tolerance_numeric: self.tol,
            tolerance_exactness_proxy: None,
            grid: self.grid,
            backend: self.backend.as_deref().map(parse_backend).transpose()?,
        })
    }

    pub fn settings(&self) -> Result<Settings> {
        let file = self.config.as_deref().map(Overrides::load).transpose()?;
        Settings::resolve(&self.overrides()?, file.as_ref())
    }
}

fn read_input(src: &str) -> Result<String> {
    if src == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        Ok(std::fs::read_to_string(src)?)
    }
}

/// Reads `φ` (and `ω`) and applies the backend flag: rational input may be
/// run in floats, float input cannot be made exact.
fn load_forms(form: &str, omega: Option<&Path>, backend: Option<Backend>) -> Result<(AnyForm, Option<AnyForm>)> {
    let phi = parse_form(&read_input(form)?)?;
    let omega = omega.map(|p| parse_form(&std::fs::read_to_string(p)?)).transpose()?;
    if let Some(w) = &omega {
        if w.backend() != phi.backend() {
            return Err(Error::BackendMismatch(phi.backend(), w.backend()));
        }
    }
    match (backend, phi.backend()) {
        (Some(Backend::Float), Backend::Rational) => {
            Ok((AnyForm::Float(phi.to_float()), omega.map(|w| AnyForm::Float(w.to_float()))))
        }
        (Some(Backend::Rational), Backend::Float) => Err(Error::BackendMismatch(Backend::Float, Backend::Rational)),
        _ => Ok((phi, omega)),
    }
}

fn with_forms<R>(
    phi: &AnyForm,
    omega: Option<&AnyForm>,
    rational: impl FnOnce(&Form<crate::scalar::Rational>, Option<&Form<crate::scalar::Rational>>) -> R,
    float: impl FnOnce(&Form<f64>, Option<&Form<f64>>) -> R,
) -> R {
    match (phi, omega) {
        (AnyForm::Rational(p), Some(AnyForm::Rational(w))) => rational(p, Some(w)),
        (AnyForm::Rational(p), _) => rational(p, None),
        (AnyForm::Float(p), Some(AnyForm::Float(w))) => float(p, Some(w)),
        (AnyForm::Float(p), _) => float(p, None),
    }
}

/// Tolerance for a backend: zero for exact arithmetic.
fn tol_for<S: JsonScalar>(settings: &Settings) -> f64 {
    if S::BACKEND == Backend::Rational {
        0.0
    } else {
        settings.tolerance_numeric
    }
}

/// What a command produced: the report, plus the JSON document to print.
pub struct Outcome {
    pub report: Report,
    pub document: String,
}

fn data_document(report: &Report, key: Option<&str>) -> String {
    let value = match key {
        Some(k) => report.data.get(k).cloned().unwrap_or(serde_json::Value::Null),
        None => serde_json::to_value(&report.data).unwrap_or(serde_json::Value::Null),
    };
    serde_json::to_string_pretty(&value).expect("json values serialize")
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    let settings = cli.settings()?;
    let backend = cli.backend.as_deref().map(parse_backend).transpose()?;
    match &cli.command {
        Command::Classify { form, omega } => {
            let (phi, omega) = load_forms(form, omega.as_deref(), backend)?;
            let report = with_forms(
                &phi,
                omega.as_ref(),
                |p, w| verify::classify_report(p, w, tol_for::<crate::scalar::Rational>(&settings)),
                |p, w| verify::classify_report(p, w, tol_for::<f64>(&settings)),
            )?;
            let document = data_document(&report, Some("classification"));
            Ok(Outcome { report, document })
        }
        Command::Invariants { form, omega } => {
            let (phi, omega) = load_forms(form, omega.as_deref(), backend)?;
            let report = with_forms(
                &phi,
                omega.as_ref(),
                |p, w| verify::invariants_report(p, w, tol_for::<crate::scalar::Rational>(&settings)),
                |p, w| verify::invariants_report(p, w, tol_for::<f64>(&settings)),
            )?;
            let document = data_document(&report, None);
            Ok(Outcome { report, document })
        }
        Command::Verify { suite } => {
            let report = verify::run_suite(suite, &settings)?;
            Ok(Outcome { document: report.to_json(), report })
        }
        Command::Example { example } => {
            let report = match example {
                ExampleCommand::Torus { t } => verify::example_torus(t, &settings)?,
                ExampleCommand::Lambda2 { c, g } => verify::example_lambda2(*c, verify::parse_metric(g)?, &settings)?,
                ExampleCommand::K3patch { f } => verify::example_k3(f, &settings)?,
            };
            Ok(Outcome { document: report.to_json(), report })
        }
    }
}

/// Exit code for an error that stopped a command before it produced a report.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Indeterminate(_) => 2,
        Error::Inconsistent(_) | Error::WrongOrbit(_) => 1,
        _ => EXIT_USAGE,
    }
}

fn emit(document: &str, out: Option<&Path>) -> std::io::Result<()> {
    match out {
        Some(p) => std::fs::write(p, format!("{document}\n")),
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{document}")
        }
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            if let Err(e) = emit(&outcome.document, cli.out.as_deref()) {
                eprintln!("error: {e}");
                return EXIT_USAGE;
            }
            let r = &outcome.report;
            let failed: Vec<&str> = r.checks.iter().filter(|c| !c.passed()).map(|c| c.name.as_str()).collect();
            eprintln!("{}: {:?} ({} checks{})", r.command, r.status(), r.checks.len(), if failed.is_empty() {
                String::new()
            } else {
                format!(", not passed: {}", failed.join(", "))
            });
            r.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            error_exit_code(&e)
        }
    }
}
