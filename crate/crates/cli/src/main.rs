use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qcompat_cli::commands::{self, Common, Outcome};
use qcompat_cli::error::{exit, CliError};
use qcompat_cli::verify;

#[derive(Parser)]
#[command(name = "qcompat", version, about = "Compatible-parameter analysis for multiparameter quantum estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug, Default)]
struct Output {
    /// Write the full report as JSON.
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,
    /// Write a per-point table as CSV.
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
    /// Override a tolerance: NAME=VALUE, or VALUE for all. Repeatable.
    #[arg(long, value_name = "TOL")]
    tol: Vec<String>,
}

impl From<Output> for Common {
    fn from(o: Output) -> Self {
        Common { json: o.json, csv: o.csv, tol: o.tol }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Fisher information, SLDs and compatibility at given points.
    Analyze {
        model: PathBuf,
        /// JSON array of points.
        #[arg(long, value_name = "FILE", conflicts_with = "at")]
        points: Option<PathBuf>,
        /// A single point, comma separated.
        #[arg(long, value_name = "X1,X2,...", allow_hyphen_values = true)]
        at: Option<String>,
        #[command(flatten)]
        out: Output,
    },
    /// Sample a parameter box and classify every sample by stratum.
    Scan {
        model: PathBuf,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        /// Falls back to QCOMPAT_SEED, then the model file, then 0.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_name = "LO:HI,...", allow_hyphen_values = true)]
        region: Option<String>,
        #[command(flatten)]
        out: Output,
    },
    /// Per-stratum bound on the number of compatible parameters.
    Bound {
        model: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Run the built-in acceptance checks.
    Verify {
        #[arg(long, default_value_t = verify::DEFAULT_SEED)]
        seed: u64,
        /// Run only these checks.
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
    /// List the built-in algebras.
    Presets,
}

fn finish(result: Result<Outcome, CliError>, common: &Common) -> Result<i32, CliError> {
    let outcome = result?;
    print!("{}", outcome.summary);
    commands::emit(&outcome, common)
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Analyze { model, points, at, out } => {
            let common = Common::from(out);
            finish(commands::run_analyze(&model, at.as_deref(), points.as_deref(), &common), &common)
        }
        Command::Scan { model, n, seed, region, out } => {
            let common = Common::from(out);
            finish(commands::run_scan(&model, region.as_deref(), n, seed, &common), &common)
        }
        Command::Bound { model, out } => {
            let common = Common::from(out);
            finish(commands::run_bound(&model, &common), &common)
        }
        Command::Verify { seed, only } => {
            let cfg = verify::Config { seed, ..Default::default() };
            let ids = if only.is_empty() { verify::check_ids() } else { only };
            let mut failed = 0;
            for id in ids {
                let r = verify::run_check(id, &cfg).ok_or_else(|| CliError::invalid(format!("no check {id}")))?;
                println!("{}", r.line());
                failed += usize::from(!r.passed);
            }
            println!("{}", if failed == 0 { "all checks passed".to_string() } else { format!("{failed} check(s) failed") });
            Ok(if failed == 0 { exit::OK } else { exit::CHECK_FAILED })
        }
        Command::Presets => {
            print!("{}", commands::presets());
            Ok(exit::OK)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let code = match run(Cli::parse()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    };
    ExitCode::from(code as u8)
}
