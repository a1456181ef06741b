//! `sicprob`: find and verify SICs, convert between density matrices and
//! SIC probabilities, compare Born-rule forms and run dual-track circuits.
//!
//! Exit codes: 0 success, 1 verification failed, 2 invalid input,
//! 3 search found nothing, 4 internal error.

mod commands;
mod manifest;
mod output;
mod session;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::born::{born, BornArgs};
use commands::convert::{convert, ConvertArgs};
use commands::sic::{find, verify, FindArgs, VerifyArgs};
use commands::simulate::{simulate, SimulateArgs};
use session::{ExitStatus, Session};

#[derive(Debug, Parser)]
#[command(name = "sicprob", version, about = "SIC-POVM probability toolkit")]
struct Cli {
    /// Suppress the human-readable summary on standard output.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Search for or verify SICs.
    #[command(subcommand)]
    Sic(SicCommand),
    /// Convert a state to SIC/MIC probabilities or back.
    Convert(ConvertArgs),
    /// Evaluate the Born rule directly, via probabilities, or both.
    Born(BornArgs),
    /// Run a circuit on the amplitude and probability tracks.
    Simulate(SimulateArgs),
}

#[derive(Debug, Subcommand)]
enum SicCommand {
    Find(FindArgs),
    Verify(VerifyArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut session = Session::new(std::env::args().collect(), cli.quiet);
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| match &cli.command {
        Command::Sic(SicCommand::Find(args)) => find(args, &mut session),
        Command::Sic(SicCommand::Verify(args)) => verify(args, &mut session),
        Command::Convert(args) => convert(args, &mut session),
        Command::Born(args) => born(args, &mut session),
        Command::Simulate(args) => simulate(args, &mut session),
    }));
    let status = match outcome {
        Ok(Ok(status)) => status,
        Ok(Err(e)) => {
            eprintln!("sicprob: {e}");
            e.status()
        }
        Err(_) => ExitStatus::Internal,
    };
    ExitCode::from(status.code() as u8)
}
