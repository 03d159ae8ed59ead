//! Command-line front end: validate a problem file, print curvature and
//! the correction series, compute star products, run invariant suites.
//!
//! Exit status is 0 on success, 1 when a validation or check fails and 2
//! for usage, I/O and parse errors. Every failure writes one line to
//! standard error of the form `error[<kind>]: <message>`.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use fedosov::checks::{run_suite, CheckOutcome, Suite};
use fedosov::fedosov::StarProduct;
use fedosov::problem::Problem;
use fedosov::{Error, RationalPoly, WeylFormElement};

#[derive(Parser)]
#[command(name = "fedosov", version, about = "Exact Fedosov quantization of polynomial symplectic structures")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Output::Json, global = true)]
    output: Output,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the structure and connection of a problem file.
    Validate { file: PathBuf },
    /// Print the curvature element R.
    Curvature { file: PathBuf },
    /// Print the correction series gamma through the file's truncation.
    Gamma { file: PathBuf },
    /// Print u * v through h^order.
    Star {
        file: PathBuf,
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
        #[arg(long, default_value_t = 1)]
        order: u32,
    },
    /// Run invariant suites.
    Check {
        file: PathBuf,
        /// fundamental, euler, d-squared, connection, flatness, oracle or all;
        /// a comma-separated list runs several.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Seed for the random samples.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

struct Failure {
    kind: &'static str,
    message: String,
    code: u8,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            kind: "usage",
            message: message.into(),
            code: 2,
        }
    }

    fn parse(message: impl Into<String>) -> Self {
        Failure {
            kind: "parse",
            message: message.into(),
            code: 2,
        }
    }

    fn check(message: impl Into<String>) -> Self {
        Failure {
            kind: "check",
            message: message.into(),
            code: 1,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (kind, code) = match &e {
            Error::Syntax { .. } | Error::VariableOutOfRange { .. } | Error::Problem(_) => ("parse", 2),
            Error::OddDimension(_)
            | Error::NotAntisymmetric { .. }
            | Error::NoPolynomialInverse { .. }
            | Error::Jacobi(..)
            | Error::Inconsistent(_)
            | Error::NotSymmetric(..)
            | Error::Torsion(..)
            | Error::NotParallel(..) => ("validation", 1),
            Error::Certification(_) | Error::NonTermination(_) => ("certification", 1),
            _ => ("computation", 1),
        };
        Failure {
            kind,
            message: e.to_string(),
            code,
        }
    }
}

fn single_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn load(path: &PathBuf) -> Result<Problem, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        kind: "io",
        message: format!("{}: {e}", path.display()),
        code: 2,
    })?;
    Ok(Problem::parse(&text)?)
}

fn poly_arg(name: &str, text: &str, nvars: usize) -> Result<RationalPoly, Failure> {
    RationalPoly::parse(text, nvars).map_err(|e| Failure::parse(format!("--{name}: {e}")))
}

fn element_output(e: &WeylFormElement, output: Output) -> String {
    match output {
        Output::Json => e.to_json(),
        Output::Text => e.to_string(),
    }
}

fn outcomes_output(outcomes: &[CheckOutcome], notes: &[String], output: Output) -> String {
    let passed = outcomes.iter().filter(|o| o.passed).count();
    match output {
        Output::Json => json!({
            "checks": outcomes
                .iter()
                .map(|o| json!({"name": o.name, "passed": o.passed, "detail": o.detail}))
                .collect::<Vec<_>>(),
            "notes": notes,
            "passed": passed,
            "total": outcomes.len(),
        })
        .to_string(),
        Output::Text => {
            let mut s = String::new();
            for o in outcomes {
                if o.passed && !o.detail.is_empty() {
                    writeln!(s, "{}: pass ({})", o.name, o.detail).unwrap();
                } else {
                    writeln!(s, "{o}").unwrap();
                }
            }
            for n in notes {
                writeln!(s, "note: {n}").unwrap();
            }
            write!(s, "summary: {passed}/{} passed", outcomes.len()).unwrap();
            s
        }
    }
}

fn validation_text(outcomes: &[CheckOutcome], notes: &[String]) -> String {
    let mut lines: Vec<String> = outcomes
        .iter()
        .map(|o| match o.passed {
            true => format!("{}: ok", o.name),
            false => format!("{}: FAIL ({})", o.name, o.detail),
        })
        .collect();
    lines.extend(notes.iter().map(|n| format!("note: {n}")));
    lines.join("\n")
}

/// Runs one command, returning its standard output.
fn run(cli: Cli) -> Result<String, Failure> {
    let output = cli.output;
    match cli.command {
        Command::Validate { file } => {
            let problem = load(&file)?;
            let mut outcomes = Vec::new();
            let mut first_failure = None;
            match problem.structure() {
                Ok(s) => {
                    outcomes.push(CheckOutcome::new("structure", true, ""));
                    match problem.connection(&s) {
                        Ok(_) => outcomes.push(CheckOutcome::new("connection", true, "")),
                        Err(e) => {
                            outcomes.push(CheckOutcome::new("connection", false, e.to_string()));
                            first_failure = Some(Failure::from(e));
                        }
                    }
                }
                Err(e) => {
                    outcomes.push(CheckOutcome::new("structure", false, e.to_string()));
                    outcomes.push(CheckOutcome::new("connection", false, "not checked"));
                    first_failure = Some(Failure::from(e));
                }
            }
            let text = match output {
                Output::Json => outcomes_output(&outcomes, &problem.notes, output),
                Output::Text => validation_text(&outcomes, &problem.notes),
            };
            match first_failure {
                None => Ok(text),
                Some(f) => {
                    println!("{text}");
                    Err(f)
                }
            }
        }
        Command::Curvature { file } => {
            let problem = load(&file)?;
            let data = problem.fedosov(problem.truncation.max(3))?;
            Ok(element_output(data.curvature(), output))
        }
        Command::Gamma { file } => {
            let problem = load(&file)?;
            let n = problem.truncation.max(3);
            let data = problem.fedosov(n)?;
            Ok(element_output(&data.gamma().truncate(n as i32), output))
        }
        Command::Star { file, u, v, order } => {
            let problem = load(&file)?;
            let u = poly_arg("u", &u, problem.dimension)?;
            let v = poly_arg("v", &v, problem.dimension)?;
            let data = problem.fedosov((2 * order + 2).max(3))?;
            let series = StarProduct::new(&data, order)?.star(&u, &v)?;
            Ok(match output {
                Output::Json => series.to_json(),
                Output::Text => series.to_string(),
            })
        }
        Command::Check { file, suite, seed } => {
            let suites = Suite::parse_list(&suite)
                .ok_or_else(|| Failure::usage(format!("unknown suite {suite:?}")))?;
            let problem = load(&file)?;
            let data = problem.fedosov(problem.truncation.max(3))?;
            let mut outcomes = Vec::new();
            for s in suites {
                outcomes.extend(run_suite(s, &data, seed)?);
            }
            let text = outcomes_output(&outcomes, &problem.notes, output);
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            if failed == 0 {
                Ok(text)
            } else {
                println!("{text}");
                Err(Failure::check(format!("{failed} of {} checks failed", outcomes.len())))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                e.exit();
            }
            let rendered = e.to_string();
            let message = rendered.split("Usage:").next().unwrap_or("");
            eprintln!("error[usage]: {}", single_line(message.trim_start_matches("error: ")));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(text) => {
            println!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error[{}]: {}", f.kind, single_line(&f.message));
            ExitCode::from(f.code)
        }
    }
}
