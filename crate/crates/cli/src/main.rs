use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use nniquad_cli::commands::{
    cmd_check_ni, cmd_simulate, cmd_sweep, cmd_validate_params, SweepArgs, SweepParam,
};
use nniquad_cli::exit;

/// Velocity-free quadrotor position control: analysis and simulation.
#[derive(Parser)]
#[command(name = "nniquad", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a closed-loop simulation and write the trajectory.
    Simulate {
        config: PathBuf,
        /// Run even if delta is below delta_min.
        #[arg(long)]
        allow_invalid: bool,
    },
    /// Check the sector-bound parameter condition (exit 1 on failure).
    ValidateParams { config: PathBuf },
    /// Classify the controller and certify the per-axis plant.
    CheckNi {
        config: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Simulate over a grid of one parameter and tabulate settling metrics.
    Sweep {
        config: PathBuf,
        #[arg(long, value_enum)]
        param: SweepParam,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        allow_invalid: bool,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if e.kind() == ErrorKind::InvalidSubcommand {
                eprintln!("UNKNOWN_SUBCOMMAND");
            }
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE } else { exit::SUCCESS });
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let result = match cli.command {
        Command::Simulate { config, allow_invalid } => cmd_simulate(&config, allow_invalid, &mut out),
        Command::ValidateParams { config } => cmd_validate_params(&config, &mut out),
        Command::CheckNi { config, json } => cmd_check_ni(&config, json, &mut out),
        Command::Sweep { config, param, from, to, steps, allow_invalid, json } => {
            let args = SweepArgs { param, from, to, steps, allow_invalid, json };
            cmd_sweep(&config, &args, &mut out)
        }
    };
    let _ = out.flush();
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
