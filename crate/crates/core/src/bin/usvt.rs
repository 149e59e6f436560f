use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use usvt::checks::{check_fixture, check_suite, Battery, Fixture, SuiteReport, SuiteSize};
use usvt::estimator::{EstimatorConfig, Interval, SymmetryMode};
use usvt::harness::{run_experiment, run_experiment_with_threads, ExperimentSpec};
use usvt::io::estimate_file;
use usvt::rng::RngSeed;
use usvt::Error;

const EXIT_VALIDATION: u8 = 1;
const EXIT_PROPERTY: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(name = "usvt", version, about = "Matrix estimation by universal singular value thresholding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Asym,
    Sym,
    Skew,
}

impl From<ModeArg> for SymmetryMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Asym => SymmetryMode::Asymmetric,
            ModeArg::Sym => SymmetryMode::Symmetric,
            ModeArg::Skew => SymmetryMode::SkewSymmetric,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BatteryArg {
    KeyLemma,
    Concentration,
    Norms,
    Generators,
    All,
}

impl From<BatteryArg> for Battery {
    fn from(b: BatteryArg) -> Self {
        match b {
            BatteryArg::KeyLemma => Battery::KeyLemma,
            BatteryArg::Concentration => Battery::Concentration,
            BatteryArg::Norms => Battery::Norms,
            BatteryArg::Generators => Battery::Generators,
            BatteryArg::All => Battery::All,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Estimate a matrix from a CSV file with NA-marked missing entries.
    Estimate {
        input: PathBuf,
        /// Output CSV for the estimate.
        #[arg(long)]
        out: PathBuf,
        /// JSON diagnostics path [default: <out>.json].
        #[arg(long)]
        diagnostics: Option<PathBuf>,
        /// Skip the first line of the input.
        #[arg(long)]
        header: bool,
        #[arg(long, default_value_t = 0.01)]
        eta: f64,
        /// Known noise variance bound on the [-1, 1] scale.
        #[arg(long)]
        sigma_sq: Option<f64>,
        #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
        interval: Option<Vec<f64>>,
        #[arg(long, value_enum, default_value = "asym")]
        mode: ModeArg,
    },
    /// Run an experiment described by a JSON spec.
    Run {
        #[arg(long)]
        spec: PathBuf,
        /// Directory for report.json, report.csv and timings.json.
        #[arg(long)]
        out: PathBuf,
        /// Worker threads [default: all cores].
        #[arg(long)]
        threads: Option<usize>,
        /// Overrides the spec's eta.
        #[arg(long)]
        eta: Option<f64>,
        /// Overrides the spec's sigma_sq.
        #[arg(long)]
        sigma_sq: Option<f64>,
        /// Overrides the spec's interval.
        #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
        interval: Option<Vec<f64>>,
        /// Overrides the spec's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the spec's trial count.
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Run property batteries, or certify a fixture file.
    Check {
        #[arg(long, value_enum, default_value = "all")]
        battery: BatteryArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Check this JSON fixture instead of running a battery.
        #[arg(long)]
        fixture: Option<PathBuf>,
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => EXIT_IO,
        Error::Json(j) if j.is_io() => EXIT_IO,
        _ => EXIT_VALIDATION,
    }
}

fn interval_arg(v: Option<Vec<f64>>) -> usvt::Result<Option<Interval>> {
    v.map(|v| Interval::new(v[0], v[1])).transpose()
}

fn print_suite(report: &SuiteReport) {
    for p in &report.properties {
        let status = if p.ok() { "PASS" } else { "FAIL" };
        println!("{status} {}: {}/{} passed", p.name, p.passed, p.cases());
    }
}

fn run(cli: Cli) -> usvt::Result<u8> {
    match cli.command {
        Command::Estimate { input, out, diagnostics, header, eta, sigma_sq, interval, mode } => {
            let mut config = EstimatorConfig::new(eta, mode.into())?;
            if let Some(s) = sigma_sq {
                config = config.with_sigma_sq(s)?;
            }
            if let Some(i) = interval_arg(interval)? {
                config = config.with_interval(i);
            }
            let diagnostics = diagnostics.unwrap_or_else(|| out.with_extension("json"));
            let diag = estimate_file(&input, header, &config, &out, &diagnostics)?;
            println!(
                "p_hat={} threshold={} retained_rank={}{}",
                diag.p_hat,
                diag.threshold,
                diag.retained_rank,
                if diag.no_data { " no_data" } else { "" }
            );
            Ok(0)
        }
        Command::Run { spec, out, threads, eta, sigma_sq, interval, seed, trials } => {
            let mut spec: ExperimentSpec = serde_json::from_str(&fs::read_to_string(spec)?)?;
            if let Some(e) = eta {
                spec.eta = e;
            }
            if sigma_sq.is_some() {
                spec.sigma_sq = sigma_sq;
            }
            if let Some(i) = interval {
                spec.interval = Some([i[0], i[1]]);
            }
            if let Some(s) = seed {
                spec.seed = RngSeed(s);
            }
            if let Some(t) = trials {
                spec.trials = t;
            }
            let report = match threads {
                Some(t) => run_experiment_with_threads(&spec, t)?,
                None => run_experiment(&spec)?,
            };
            report.write_to_dir(&out)?;
            let failed = report.cells.iter().filter(|c| c.failure.is_some()).count();
            println!("{} cells written to {} ({failed} failed)", report.cells.len(), out.display());
            Ok(0)
        }
        Command::Check { battery, seed, fixture, out } => {
            let report = match fixture {
                Some(path) => {
                    let fixture: Fixture = serde_json::from_str(&fs::read_to_string(path)?)?;
                    check_fixture(&fixture)?
                }
                None => check_suite(battery.into(), &SuiteSize::default(), RngSeed(seed))?,
            };
            print_suite(&report);
            if let Some(path) = out {
                fs::write(path, serde_json::to_string_pretty(&report)? + "\n")?;
            }
            Ok(if report.ok() { 0 } else { EXIT_PROPERTY })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
