use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use simcheck_cli::commands::{
    self, direction_from_flag, parse_cost_flag, AttackArgs, AttackOutput, CheckArgs,
};
use simcheck_cli::CliError;

/// Decide whether a joint PMF admits a simulating channel, and build one.
#[derive(Parser)]
#[command(name = "simcheck", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the decision pipeline on a PMF file and print a JSON report.
    ///
    /// Exit code 0 when the condition holds, 1 when it does not, 2 on
    /// input or solver errors.
    Check {
        /// PMF file (JSON schema with x/y/z labels and the p table).
        input: PathBuf,
        /// 'y' decides whether Z can simulate X against Y; 'x' swaps roles.
        #[arg(long, default_value = "y")]
        direction: String,
        /// Always solve the full LP instead of the nullspace reduction.
        #[arg(long)]
        full_lp: bool,
        /// Relative rank tolerance override.
        #[arg(long)]
        tol_rank: Option<f64>,
        /// Verdict tolerance override.
        #[arg(long)]
        tol_verdict: Option<f64>,
        /// Recorded in the report; reserved for randomized diagnostics.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Synthesize a channel witnessing the condition.
    ///
    /// Exit code 0 with a channel report on success, 1 with a Farkas
    /// certificate when no channel exists, 2 on input errors.
    Attack {
        input: PathBuf,
        #[arg(long, default_value = "y")]
        direction: String,
        /// Comma-separated strictly positive cost, one entry per channel
        /// cell (row-major). Defaults to all ones.
        #[arg(long)]
        cost: Option<String>,
        /// Write the report here instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Sweep the binary-symmetric-erasure family and emit CSV verdicts.
    Sweep {
        /// Template declaring the family and the alpha/gamma grids.
        template: PathBuf,
        /// Write the CSV here instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Check {
            input,
            direction,
            full_lp,
            tol_rank,
            tol_verdict,
            seed,
        } => {
            let args = CheckArgs {
                direction: direction_from_flag(&direction)?,
                full_lp,
                tol_rank,
                tol_verdict,
                seed,
            };
            let report = commands::run_check(&input, &args)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(ExitCode::from(if report.holds { 0 } else { 1 }))
        }
        Command::Attack {
            input,
            direction,
            cost,
            output,
        } => {
            let args = AttackArgs {
                direction: direction_from_flag(&direction)?,
                cost: cost.as_deref().map(parse_cost_flag).transpose()?,
            };
            let (text, code) = match commands::run_attack(&input, &args)? {
                AttackOutput::Channel(report) => {
                    (serde_json::to_string_pretty(&report)?, ExitCode::from(0))
                }
                AttackOutput::Refused(refusal) => {
                    (serde_json::to_string_pretty(&refusal)?, ExitCode::from(1))
                }
            };
            emit(&text, output.as_deref())?;
            Ok(code)
        }
        Command::Sweep { template, output } => {
            let csv = commands::run_sweep(&template)?;
            emit(csv.trim_end(), output.as_deref())?;
            Ok(ExitCode::from(0))
        }
    }
}

fn emit(text: &str, output: Option<&std::path::Path>) -> Result<(), CliError> {
    match output {
        Some(path) => std::fs::write(path, format!("{text}\n"))?,
        None => println!("{text}"),
    }
    Ok(())
}
