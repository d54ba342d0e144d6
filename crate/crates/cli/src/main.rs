use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use toricount::{ClosedForm, ReduceOptions};
use toricount_cli::commands::{self, CliError, Engine, Format, Outcome};
use toricount_cli::parse_vectors;

/// Exact vector partition functions: count, reduce, and print closed forms.
#[derive(Parser)]
#[command(name = "toricount", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Vector system, one vector per line; standard input when omitted or `-`.
    input: Option<PathBuf>,

    /// Abort the reduction once an intermediate sum exceeds this many terms.
    #[arg(long)]
    max_terms: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Count the representations of one point.
    Count {
        #[command(flatten)]
        common: Common,
        /// Comma-separated coordinates.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, value_enum, default_value_t = Engine::Closed)]
        engine: Engine,
    },
    /// Print the reduced generating function.
    Reduce {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print the closed form as polynomials on shifted cones.
    ClosedForm {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Compare all engines on every point of a box.
    Verify {
        #[command(flatten)]
        common: Common,
        /// `lo:hi` for every coordinate, or comma-separated per coordinate.
        #[arg(long = "box", allow_hyphen_values = true, default_value = "-6:12")]
        bounds: String,
        /// Seed for the generic points of the generating-function identity check.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Check a closed form previously written with `closed-form --format json`
        /// instead of deriving one.
        #[arg(long, value_name = "FILE")]
        against: Option<PathBuf>,
    },
    /// Time each engine on a box.
    Bench {
        #[command(flatten)]
        common: Common,
        #[arg(long = "box", allow_hyphen_values = true, default_value = "-6:12")]
        bounds: String,
    },
}

fn read_input(path: Option<&PathBuf>) -> Result<String, CliError> {
    let mut text = String::new();
    match path {
        Some(p) if p.as_os_str() != "-" => {
            text = std::fs::read_to_string(p).map_err(|source| CliError::Io {
                path: p.display().to_string(),
                source,
            })?;
        }
        _ => {
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|source| CliError::Io {
                    path: "<stdin>".into(),
                    source,
                })?;
        }
    }
    Ok(text)
}

fn read_closed_form(path: &PathBuf) -> Result<ClosedForm, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(toricount_cli::json::parse_closed_form(&text)?)
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let common = match &cli.command {
        Command::Count { common, .. }
        | Command::Reduce { common, .. }
        | Command::ClosedForm { common, .. }
        | Command::Verify { common, .. }
        | Command::Bench { common, .. } => common,
    };
    let spec = parse_vectors(&read_input(common.input.as_ref())?)?;
    let options = ReduceOptions {
        max_terms: common.max_terms,
    };
    let dim = spec.dimension;
    match &cli.command {
        Command::Count { point, engine, .. } => {
            let alpha = commands::parse_point(point, dim)?;
            commands::cmd_count(&spec, &alpha, *engine, &options)
        }
        Command::Reduce { format, .. } => commands::cmd_reduce(&spec, *format, &options),
        Command::ClosedForm { format, .. } => commands::cmd_closed_form(&spec, *format, &options),
        Command::Verify {
            bounds,
            seed,
            against,
            ..
        } => {
            let b = commands::parse_box(bounds, dim)?;
            let given = match against {
                Some(path) => Some(read_closed_form(path)?),
                None => None,
            };
            commands::cmd_verify(&spec, &b, *seed, given.as_ref(), &options)
        }
        Command::Bench { bounds, .. } => {
            let b = commands::parse_box(bounds, dim)?;
            commands::cmd_bench(&spec, &b, &options)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            ExitCode::from(outcome.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
