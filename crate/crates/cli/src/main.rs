//! `dpss`: simulate, check and fuzz perimeter-surveillance ensembles.
//!
//! Exit codes: 0 success, 1 property or assertion failure, 2 input or usage
//! error, 3 step budget exhausted.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dpss_core::fuzz::{run_campaign, FuzzConfig};
use dpss_core::harness::{check, converge_with_fuel, sampled_trace, simulate_trace, CheckKind};
use dpss_core::oracle::GeneratorConfig;
use dpss_core::scenario::parse_scenario;
use dpss_core::trace::write_trace;
use dpss_core::{Ensemble, Scalar, SimError, Simulator, StepBudget};

const EXIT_FAIL: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_FUEL: u8 = 3;

#[derive(Parser)]
#[command(name = "dpss", version, about = "Exact-rational perimeter surveillance simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write an event-aligned CSV trace.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, value_parser = non_negative)]
        duration: Scalar,
        /// Output file; stdout when omitted.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        fuel: Option<u64>,
        /// Emit rows at this fixed interval instead of at events.
        #[arg(long, value_parser = positive)]
        sample: Option<Scalar>,
    },
    /// Check period-2 behaviour after 2N-1 time units.
    Converge {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        fuel: Option<u64>,
    },
    /// Run the invariant monitors up to a horizon.
    Check {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, value_parser = non_negative)]
        horizon: Scalar,
        /// Comma-separated subset of first-event, have-met, synchronized, invariance.
        #[arg(long, value_delimiter = ',', value_parser = check_kind)]
        only: Option<Vec<CheckKind>>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        fuel: Option<u64>,
    },
    /// Randomized property campaign over seeded ensembles.
    Fuzz {
        #[arg(long, default_value_t = 500)]
        cases: u64,
        #[arg(long, default_value_t = 1)]
        n_min: usize,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        max_denominator: u64,
        /// Comma-separated perimeter lengths to draw from.
        #[arg(long, value_delimiter = ',', value_parser = positive, default_value = "1,2,7/3,10")]
        perimeters: Vec<Scalar>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        fuel: Option<u64>,
    },
}

fn rational(text: &str) -> Result<Scalar, String> {
    text.parse::<Scalar>().map_err(|e| e.to_string())
}

fn non_negative(text: &str) -> Result<Scalar, String> {
    let value = rational(text)?;
    if value.is_negative() {
        return Err(format!("{value} is negative"));
    }
    Ok(value)
}

fn positive(text: &str) -> Result<Scalar, String> {
    let value = rational(text)?;
    if !value.is_positive() {
        return Err(format!("{value} is not positive"));
    }
    Ok(value)
}

fn check_kind(text: &str) -> Result<CheckKind, String> {
    CheckKind::from_name(text).ok_or_else(|| {
        let names: Vec<_> = CheckKind::ALL.iter().map(|k| k.name()).collect();
        format!("unknown check `{text}`; expected one of {}", names.join(", "))
    })
}

struct Failure {
    code: u8,
    message: String,
}

impl From<SimError> for Failure {
    fn from(err: SimError) -> Self {
        let code = if err.is_fuel_exhausted() { EXIT_FUEL } else { EXIT_FAIL };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

fn load(path: &Path) -> Result<Ensemble, Failure> {
    let bytes = fs::read(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    parse_scenario(&bytes)
        .map(|s| s.into_ensemble())
        .map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn budget(fuel: Option<u64>, dt: &Scalar, ens: &Ensemble) -> StepBudget {
    fuel.map(StepBudget::new)
        .unwrap_or_else(|| StepBudget::default_for(dt, ens))
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("reports always serialize");
    writeln!(io::stdout(), "{text}").map_err(|e| input_error(format!("stdout: {e}")))
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Simulate {
            scenario,
            duration,
            trace,
            fuel,
            sample,
        } => {
            let ens = load(&scenario)?;
            let budget = budget(fuel, &duration, &ens);
            let rows = match sample {
                Some(interval) => sampled_trace(&ens, &duration, &interval, budget)?,
                None => simulate_trace(&ens, &duration, budget)?,
            };
            let written = match &trace {
                Some(path) => fs::File::create(path)
                    .map_err(csv::Error::from)
                    .and_then(|f| write_trace(&rows, io::BufWriter::new(f))),
                None => write_trace(&rows, io::stdout().lock()),
            };
            written.map_err(|e| input_error(format!("writing trace: {e}")))?;
            Ok(0)
        }
        Command::Converge { scenario, fuel } => {
            let ens = load(&scenario)?;
            let report = converge_with_fuel(&ens, fuel)?;
            print_json(&report)?;
            Ok(if report.passed() { 0 } else { EXIT_FAIL })
        }
        Command::Check {
            scenario,
            horizon,
            only,
            fuel,
        } => {
            let ens = load(&scenario)?;
            let selection = only.unwrap_or_else(|| CheckKind::ALL.to_vec());
            let report = check(&ens, &horizon, &selection, budget(fuel, &horizon, &ens))?;
            print_json(&report)?;
            Ok(if report.passed { 0 } else { EXIT_FAIL })
        }
        Command::Fuzz {
            cases,
            n_min,
            n_max,
            seed,
            max_denominator,
            perimeters,
            fuel,
        } => {
            let generator = GeneratorConfig {
                n_min,
                n_max,
                perimeters,
                max_denominator,
                seed,
                ..GeneratorConfig::default()
            };
            generator.validate().map_err(|e| input_error(e.to_string()))?;
            let cfg = FuzzConfig {
                generator,
                cases,
                fuel,
                ..FuzzConfig::default()
            };
            let summary = run_campaign(&Simulator::new(), &cfg);
            print_json(&summary)?;
            Ok(if summary.passed() { 0 } else { EXIT_FAIL })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("dpss: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
