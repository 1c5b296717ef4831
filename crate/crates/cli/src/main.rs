use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

/// Set metrics and optimal mean-square estimation for multi-Bernoulli posteriors.
#[derive(Parser, Debug)]
#[command(name = "gospa", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Distance between two target sets given as JSON arrays of points.
    Metric(commands::MetricArgs),
    /// Mean-square error of a detection vector.
    Mse(commands::MseArgs),
    /// Run one estimator on a model.
    Estimate(commands::EstimateArgs),
    /// Decision regions over two existence probabilities, as CSV.
    SweepRegions(commands::SweepRegionsArgs),
    /// Optimal reported count against the number of identical components, as CSV.
    SweepCardinality(commands::SweepCardinalityArgs),
    /// Check closed forms against enumeration and Monte-Carlo; exits 2 on failure.
    Validate(commands::ValidateArgs),
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

const EXIT_USAGE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };

    let (result, out) = match cli.command {
        Command::Metric(a) => (commands::metric(&a), a.output.out),
        Command::Mse(a) => (commands::mse(&a), a.output.out),
        Command::Estimate(a) => (commands::estimate(&a), a.output.out),
        Command::SweepRegions(a) => (commands::sweep_regions(&a), a.output.out),
        Command::SweepCardinality(a) => (commands::sweep_cardinality(&a), a.output.out),
        Command::Validate(a) => (commands::validate(&a), a.output.out),
    };

    let output = match result {
        Ok(output) => output,
        Err(err) => {
            eprintln!("error: {err:#}");
            return ExitCode::from(EXIT_USAGE);
        }
    };

    let written = match &out {
        Some(path) => fs::write(path, &output.text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout()
            .lock()
            .write_all(output.text.as_bytes())
            .map_err(|e| e.to_string()),
    };
    if let Err(err) = written {
        eprintln!("error: {err}");
        return ExitCode::from(EXIT_USAGE);
    }

    if output.failed {
        eprintln!("validation failed");
        ExitCode::from(EXIT_VALIDATION)
    } else {
        ExitCode::SUCCESS
    }
}
