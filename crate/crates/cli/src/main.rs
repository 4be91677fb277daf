use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use koenigs_cli::commands::{self, Common};

#[derive(Debug, Parser)]
#[command(name = "koenigs", version, about = "Koenigs semigroup orbits, criteria and audits")]
struct Cli {
    /// Scenario file (trace, criterion) or audit configuration (examples, audit).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Seed for randomized sampling.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Slit pairs for slit-strip domains, or the channel truncation for the fitted channel.
    #[arg(long, global = true, value_name = "N")]
    truncation: Option<f64>,
    /// Probe horizon for backward exit times.
    #[arg(long, global = true, value_name = "T")]
    tmax: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write orbit CSVs for every start and direction in the scenario.
    Trace,
    /// Run the backward criterion and any requested analyses.
    Criterion,
    /// Reproduce one of the worked example domains.
    Examples {
        /// Example number: 1, 2 or 3.
        #[arg(long, value_name = "K")]
        id: u8,
    },
    /// Run an invariant suite.
    Audit {
        /// metrics, semigroup, forward, backward, shift, ahlfors, haymanwu or all.
        #[arg(long, value_name = "NAME", default_value = "all")]
        suite: String,
    },
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let common = Common {
        config: cli.config,
        out: cli.out,
        seed: cli.seed,
        truncation: cli.truncation,
        tmax: cli.tmax,
    };
    let mut stdout = std::io::stdout().lock();
    match cli.command {
        Command::Trace => {
            for path in commands::run_trace(&common)? {
                writeln!(stdout, "{}", path.display())?;
            }
        }
        Command::Criterion => {
            stdout.write_all(commands::run_criterion(&common)?.as_bytes())?;
        }
        Command::Examples { id } => {
            let (body, summary) = commands::run_examples(&common, id)?;
            if common.out.is_some() {
                stdout.write_all(summary.as_bytes())?;
            } else {
                stdout.write_all(body.as_bytes())?;
                eprint!("{summary}");
            }
        }
        Command::Audit { suite } => {
            let (body, pass) = commands::run_audit_command(&common, &suite)?;
            if common.out.is_some() {
                stdout.write_all(commands::audit_summary(&body).as_bytes())?;
            } else {
                stdout.write_all(body.as_bytes())?;
            }
            if !pass {
                eprint!("{}", commands::audit_summary(&body));
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(commands::exit_code(&err))
        }
    }
}
